"""Vietoris-Rips complexes with a dimension cap, subcomplex handles and
inclusion maps between scales."""
from __future__ import annotations

from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import BudgetError, InternalError, simplex_budget
from .metric import FiniteMetricSpace, near_pairs

DEFAULT_DIM_CAP = 3


class SimplicialComplex:
    """Face-closed simplices stored per dimension as sorted vertex tuples."""

    def __init__(self, simplices: Sequence[Sequence[tuple]], dim_cap: int, scale: Optional[int] = None):
        self.dim_cap = int(dim_cap)
        self.scale = scale
        self.simplices = [sorted(set(tuple(s) for s in level)) for level in simplices]
        while len(self.simplices) < self.dim_cap + 1:
            self.simplices.append([])
        self._index = [None] * len(self.simplices)

    @property
    def vertices(self) -> list[int]:
        return [s[0] for s in self.simplices[0]]

    def count(self, q: int) -> int:
        return len(self.simplices[q]) if 0 <= q < len(self.simplices) else 0

    def counts(self) -> list[int]:
        return [len(level) for level in self.simplices]

    def index(self, q: int) -> dict:
        if self._index[q] is None:
            self._index[q] = {s: i for i, s in enumerate(self.simplices[q])}
        return self._index[q]

    def dimension(self) -> int:
        nonempty = [q for q, level in enumerate(self.simplices) if level]
        return max(nonempty) if nonempty else -1

    def check(self):
        """Raise ``ValueError`` unless face-closed and duplicate-free."""
        for q, level in enumerate(self.simplices):
            for s in level:
                if len(s) != q + 1 or any(a >= b for a, b in zip(s, s[1:])):
                    raise ValueError(f"bad simplex {s} in dimension {q}")
            if q:
                faces = self.index(q - 1)
                for s in level:
                    for i in range(q + 1):
                        if s[:i] + s[i + 1:] not in faces:
                            raise ValueError(f"face of {s} missing")

    def to_dict(self) -> dict:
        return {"scale": self.scale, "dim_cap": self.dim_cap,
                "simplices": [[list(s) for s in level] for level in self.simplices]}

    @classmethod
    def from_dict(cls, data):
        return cls([[tuple(s) for s in level] for level in data["simplices"]], data["dim_cap"], data.get("scale"))

    def __repr__(self):
        return f"SimplicialComplex(counts={self.counts()}, dim_cap={self.dim_cap}, scale={self.scale})"


def clique_complex(vertices: Iterable[int], edges: Iterable[tuple], dim_cap: int = DEFAULT_DIM_CAP,
                   budget: Optional[int] = None, scale=None) -> SimplicialComplex:
    """Flag complex of a graph, expanded in vertex order up to ``dim_cap``."""
    if dim_cap < 0:
        raise ValueError("dim_cap must be non-negative")
    limit = simplex_budget(budget)
    verts = sorted(set(int(v) for v in vertices))
    up = {v: set() for v in verts}
    for a, b in edges:
        a, b = int(a), int(b)
        if a == b:
            continue
        lo, hi = min(a, b), max(a, b)
        up[lo].add(hi)
    levels = [[(v,) for v in verts]]
    total = len(verts)
    frontier = [((v,), up[v]) for v in verts]
    for q in range(1, dim_cap + 1):
        nxt = []
        for simplex, cand in frontier:
            for w in sorted(cand):
                nxt.append((simplex + (w,), cand & up[w]))
        total += len(nxt)
        if total > limit:
            raise BudgetError("simplices", limit, f"reached dimension {q}")
        levels.append([s for s, _ in nxt])
        frontier = nxt
        if not nxt:
            break
    return SimplicialComplex(levels, dim_cap, scale)


def rips_complex(space: FiniteMetricSpace, R: int, dim_cap: int = DEFAULT_DIM_CAP,
                 points: Optional[Sequence[int]] = None, budget: Optional[int] = None) -> SimplicialComplex:
    """Simplices of at most ``dim_cap`` dimensions with pairwise distances ``<= R``."""
    if R < 0:
        raise ValueError("R must be non-negative")
    pts = np.arange(space.n) if points is None else np.array(sorted(set(points)), dtype=np.int64)
    xs, ys, _ = near_pairs(space, pts, R)
    keep = np.isin(ys, pts) & (xs < ys)
    return clique_complex(pts.tolist(), zip(xs[keep].tolist(), ys[keep].tolist()), dim_cap, budget, scale=int(R))


def full_simplex(n_vertices: int, dim_cap: Optional[int] = None) -> SimplicialComplex:
    cap = n_vertices - 1 if dim_cap is None else dim_cap
    edges = [(a, b) for a in range(n_vertices) for b in range(a + 1, n_vertices)]
    return clique_complex(range(n_vertices), edges, cap)


class SubcomplexHandle:
    """Membership flags over a complex, marked ``closed`` (face-closed) or
    ``open`` (closed under cofaces)."""

    def __init__(self, parent: SimplicialComplex, flags: Sequence[np.ndarray], kind: str):
        if kind not in ("open", "closed"):
            raise ValueError("kind must be 'open' or 'closed'")
        self.parent = parent
        self.flags = [np.asarray(f, dtype=bool) for f in flags]
        self.kind = kind

    def members(self, q: int) -> np.ndarray:
        return np.flatnonzero(self.flags[q]) if q < len(self.flags) else np.zeros(0, dtype=np.int64)

    def contains(self, q: int, simplex: tuple) -> bool:
        i = self.parent.index(q).get(tuple(simplex))
        return i is not None and bool(self.flags[q][i])

    def size(self) -> int:
        return int(sum(f.sum() for f in self.flags))

    def complement(self) -> "SubcomplexHandle":
        return SubcomplexHandle(self.parent, [~f for f in self.flags], "closed" if self.kind == "open" else "open")

    def is_valid(self) -> bool:
        closed = self if self.kind == "closed" else self.complement()
        cx = closed.parent
        for q in range(1, len(cx.simplices)):
            for i in closed.members(q).tolist():
                s = cx.simplices[q][i]
                for j in range(q + 1):
                    if not closed.contains(q - 1, s[:j] + s[j + 1:]):
                        return False
        return True


def full_subcomplex(cx: SimplicialComplex, vertex_set: Iterable[int]) -> SubcomplexHandle:
    """Closed subcomplex of simplices with every vertex in ``vertex_set``."""
    vs = set(int(v) for v in vertex_set)
    flags = [np.array([all(v in vs for v in s) for s in level], dtype=bool) for level in cx.simplices]
    return SubcomplexHandle(cx, flags, "closed")


def open_star(cx: SimplicialComplex, vertex_set: Iterable[int]) -> SubcomplexHandle:
    """Open subcomplex of simplices with at least one vertex in ``vertex_set``."""
    vs = set(int(v) for v in vertex_set)
    flags = [np.array([any(v in vs for v in s) for s in level], dtype=bool) for level in cx.simplices]
    return SubcomplexHandle(cx, flags, "open")


def simplicial_neighborhood(cx: SimplicialComplex, space: FiniteMetricSpace, A: Iterable[int], r: int) -> SubcomplexHandle:
    """U(A, r): simplices having a vertex within ``r`` of ``A``."""
    A = sorted(set(int(a) for a in A))
    verts = set(cx.vertices)
    if not set(A) <= verts:
        raise ValueError("A must consist of vertices of the complex")
    thick = np.flatnonzero(space.within(A, r)) if A else []
    return open_star(cx, thick)


def inclusion(cx_R: SimplicialComplex, cx_S: SimplicialComplex) -> list[np.ndarray]:
    """Per dimension, the index in ``cx_S`` of each simplex of ``cx_R``."""
    out = []
    for q in range(min(len(cx_R.simplices), len(cx_S.simplices))):
        idx = cx_S.index(q)
        try:
            out.append(np.array([idx[s] for s in cx_R.simplices[q]], dtype=np.int64))
        except KeyError as exc:
            raise InternalError(f"simplex {exc.args[0]} of the smaller complex is missing") from None
    return out
