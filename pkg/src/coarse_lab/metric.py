"""Finite metric spaces with exact scaled-integer distances.

A :class:`FiniteMetricSpace` stores labels, a positive integer ``scale`` (true
distance = stored integer / scale), an optional base point and the radius the
space was truncated at. Distances come from one of three backings:

* a dense integer matrix,
* an undirected graph with a uniform edge length (hop counts via BFS, evaluated
  lazily so that large Cayley balls never need an n-by-n matrix),
* a subset of a product of two spaces with the l1 product metric.

All backings answer the same vectorised queries (``pair_dist``, ``rows``,
``within``), which is all the auditors use.
"""
from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Hashable, Iterable, Optional, Sequence

import numpy as np

from . import kernels
from .errors import BudgetError, DisconnectedError, MissingBasePointError, point_budget
from .groups import ExplicitGraph, GroupSpec

DENSE_LIMIT = 4096


def label_key(label):
    """Total order on labels used for every lexicographic tie-break."""
    if isinstance(label, tuple):
        return (2, tuple(label_key(x) for x in label))
    if isinstance(label, bool) or label is None:
        return (0, str(label))
    if isinstance(label, int):
        return (1, label)
    return (3, str(label))


class _Dense:
    kind = "dense"

    def __init__(self, dist):
        self.dist = dist

    def pair(self, us, vs):
        return self.dist[us, vs].astype(np.int64)

    def rows(self, sources):
        return self.dist[np.asarray(sources, dtype=np.int64)].astype(np.int64)

    def within(self, sources, r):
        sources = np.asarray(sources, dtype=np.int64)
        n = self.dist.shape[0]
        mask = np.zeros(n, dtype=bool)
        for start in range(0, len(sources), 1024):
            mask |= (self.dist[sources[start:start + 1024]] <= r).any(axis=0)
        return mask


class _Graph:
    kind = "graph"

    def __init__(self, indptr, indices, edge_length):
        self.indptr = np.ascontiguousarray(indptr, dtype=np.int32)
        self.indices = np.ascontiguousarray(indices, dtype=np.int32)
        self.edge_length = int(edge_length)
        self.n = len(self.indptr) - 1
        self._dense = None

    def dense(self):
        if self._dense is None and self.n <= DENSE_LIMIT:
            hops = kernels.bfs_rows(self.indptr, self.indices, np.arange(self.n))
            if (hops < 0).any():
                raise DisconnectedError(_components_from_hops(hops))
            self._dense = hops.astype(np.int64) * self.edge_length
        return self._dense

    def pair(self, us, vs):
        dense = self.dense()
        if dense is not None:
            return dense[us, vs]
        us = np.asarray(us, dtype=np.int64)
        vs = np.asarray(vs, dtype=np.int64)
        lo, hi = np.minimum(us, vs), np.maximum(us, vs)
        keys = lo * self.n + hi
        uniq, inv = np.unique(keys, return_inverse=True)
        hops = kernels.pair_hops(self.indptr, self.indices, uniq // self.n, uniq % self.n)
        if (hops < 0).any():
            raise DisconnectedError([])
        return hops.astype(np.int64)[inv.reshape(us.shape)] * self.edge_length

    def rows(self, sources):
        dense = self.dense()
        if dense is not None:
            return dense[np.asarray(sources, dtype=np.int64)]
        hops = kernels.bfs_rows(self.indptr, self.indices, sources)
        return hops.astype(np.int64) * self.edge_length

    def within(self, sources, r):
        hops = kernels.bfs_bounded(self.indptr, self.indices, sources, int(r) // self.edge_length)
        return hops >= 0


class _Product:
    kind = "product"

    def __init__(self, left, right, ia, ib):
        self.left = left
        self.right = right
        self.ia = np.asarray(ia, dtype=np.int64)
        self.ib = np.asarray(ib, dtype=np.int64)

    def pair(self, us, vs):
        us = np.asarray(us, dtype=np.int64)
        vs = np.asarray(vs, dtype=np.int64)
        return self.left.pair_dist(self.ia[us], self.ia[vs]) + self.right.pair_dist(self.ib[us], self.ib[vs])

    def rows(self, sources):
        sources = np.asarray(sources, dtype=np.int64)
        return self.left.rows(self.ia[sources])[:, self.ia] + self.right.rows(self.ib[sources])[:, self.ib]

    def within(self, sources, r):
        sources = np.asarray(sources, dtype=np.int64)
        mask = np.zeros(len(self.ia), dtype=bool)
        for start in range(0, len(sources), 256):
            mask |= (self.rows(sources[start:start + 256]) <= r).any(axis=0)
        return mask


def _components_from_hops(hops):
    seen = np.zeros(hops.shape[1], dtype=bool)
    comps = []
    for v in range(hops.shape[1]):
        if not seen[v]:
            members = np.flatnonzero(hops[v] >= 0)
            seen[members] = True
            comps.append(members.tolist())
    return comps


class FiniteMetricSpace:
    """A finite metric space; treat instances as immutable."""

    def __init__(
        self,
        labels: Sequence[Hashable],
        backing,
        *,
        scale: int = 1,
        base_point: Optional[int] = None,
        truncation_radius: int = 0,
        group: Optional[GroupSpec] = None,
        name: str = "",
    ):
        if scale <= 0:
            raise ValueError("scale must be a positive integer")
        self.labels = list(labels)
        self._backing = backing
        self.scale = int(scale)
        self.base_point = None if base_point is None else int(base_point)
        self.truncation_radius = int(truncation_radius)
        self.group = group
        self.name = name
        self._index = None
        self._radial = None
        if self.base_point is not None and not 0 <= self.base_point < len(self.labels):
            raise ValueError("base point out of range")

    # construction ---------------------------------------------------------

    @classmethod
    def from_matrix(cls, labels, dist, *, scale=1, base_point=None, truncation_radius=None, validate=True, **kw):
        dist = np.array(dist, dtype=np.int64)
        n = len(labels)
        if dist.shape != (n, n):
            raise ValueError(f"distance matrix shape {dist.shape} does not match {n} labels")
        if validate:
            _check_basic_axioms(dist)
        if truncation_radius is None:
            truncation_radius = int(dist[base_point].max()) if base_point is not None and n else 0
        small = dist.astype(np.int32) if n and dist.max() < 2**31 else dist
        return cls(labels, _Dense(small), scale=scale, base_point=base_point,
                   truncation_radius=truncation_radius, **kw)

    @classmethod
    def from_graph(cls, labels, adjacency, *, edge_length=1, scale=1, base_point=None, truncation_radius=0, **kw):
        indptr = [0]
        indices = []
        for nbrs in adjacency:
            indices.extend(sorted(set(int(v) for v in nbrs)))
            indptr.append(len(indices))
        backing = _Graph(np.array(indptr), np.array(indices, dtype=np.int32), edge_length)
        return cls(labels, backing, scale=scale, base_point=base_point, truncation_radius=truncation_radius, **kw)

    # basic queries --------------------------------------------------------

    def __len__(self):
        return len(self.labels)

    @property
    def n(self):
        return len(self.labels)

    @property
    def backing(self):
        return self._backing

    def _label_index(self):
        if self._index is None:
            self._index = {lab: i for i, lab in enumerate(self.labels)}
        return self._index

    def index(self, label) -> int:
        return self._label_index()[label]

    def has_label(self, label) -> bool:
        return label in self._label_index()

    def d(self, x: int, y: int) -> int:
        return int(self.pair_dist(np.array([x]), np.array([y]))[0])

    def pair_dist(self, us, vs) -> np.ndarray:
        us = np.asarray(us, dtype=np.int64)
        vs = np.asarray(vs, dtype=np.int64)
        if us.size == 0:
            return np.zeros(us.shape, dtype=np.int64)
        return self._backing.pair(us, vs)

    def rows(self, sources) -> np.ndarray:
        return self._backing.rows(np.asarray(sources, dtype=np.int64))

    def row(self, x: int) -> np.ndarray:
        return self.rows([x])[0]

    def within(self, sources, r) -> np.ndarray:
        """Boolean mask of points within distance ``r`` of some source."""
        sources = np.asarray(sources, dtype=np.int64)
        if sources.size == 0:
            return np.zeros(self.n, dtype=bool)
        return self._backing.within(sources, int(r))

    def submatrix(self, points) -> np.ndarray:
        points = np.asarray(points, dtype=np.int64)
        return self.rows(points)[:, points]

    def dense_matrix(self, limit: int = 20_000) -> np.ndarray:
        if self.n > limit:
            raise BudgetError("dense matrix", limit, f"space has {self.n} points")
        return self.rows(np.arange(self.n))

    def radial(self) -> np.ndarray:
        """Distances from the base point."""
        if self.base_point is None:
            raise MissingBasePointError("space has no base point")
        if self._radial is None:
            self._radial = self.row(self.base_point)
        return self._radial

    def lex_order(self) -> list[int]:
        return sorted(range(self.n), key=lambda i: label_key(self.labels[i]))

    def interior(self, collar: int) -> np.ndarray:
        """Points at distance at most ``truncation_radius - collar`` from the base point."""
        return np.flatnonzero(self.radial() <= self.truncation_radius - collar)

    def with_base_point(self, base_point: int) -> "FiniteMetricSpace":
        return FiniteMetricSpace(self.labels, self._backing, scale=self.scale, base_point=base_point,
                                 truncation_radius=self.truncation_radius, group=self.group, name=self.name)

    def __repr__(self):
        return (f"FiniteMetricSpace(n={self.n}, backing={self._backing.kind}, scale={self.scale}, "
                f"base_point={self.base_point}, truncation_radius={self.truncation_radius})")


def _check_basic_axioms(dist):
    n = dist.shape[0]
    if n == 0:
        return
    if (np.diag(dist) != 0).any():
        raise ValueError("distance matrix has nonzero diagonal")
    if not np.array_equal(dist, dist.T):
        raise ValueError("distance matrix is not symmetric")
    off = dist + np.eye(n, dtype=dist.dtype)
    if (off <= 0).any():
        raise ValueError("distinct points at non-positive distance")


def check_metric_axioms(space: FiniteMetricSpace, exhaustive_limit: int = 2000, samples: int = 200_000, seed: int = 0):
    """Raise ``ValueError`` if the space violates a metric axiom.

    Exhaustive (min-plus closure) up to ``exhaustive_limit`` points, sampled
    triples above it.
    """
    n = space.n
    if n <= exhaustive_limit:
        dist = space.dense_matrix().astype(np.int64)
        _check_basic_axioms(dist)
        closed = kernels.floyd_warshall(dist.copy(), kernels.INF)
        if not np.array_equal(closed, dist):
            i, j = np.argwhere(closed != dist)[0]
            raise ValueError(f"triangle inequality fails between points {i} and {j}")
        return
    rng = np.random.default_rng(seed)
    x, y, z = (rng.integers(0, n, samples) for _ in range(3))
    dxy, dyz, dxz = space.pair_dist(x, y), space.pair_dist(y, z), space.pair_dist(x, z)
    if (dxz > dxy + dyz).any():
        k = int(np.argmax(dxz > dxy + dyz))
        raise ValueError(f"triangle inequality fails at {(x[k], y[k], z[k])}")
    if (space.pair_dist(x, y) != space.pair_dist(y, x)).any():
        raise ValueError("asymmetric distances")
    if ((dxy == 0) != (x == y)).any():
        raise ValueError("distinct points at distance zero")


# ---------------------------------------------------------------------------
# constructors


def build_cayley_graph(spec: GroupSpec, radius: int, *, budget: Optional[int] = None, scale: int = 1) -> FiniteMetricSpace:
    """Closed word-metric ball of ``radius`` around the identity.

    Points are indexed in breadth-first discovery order (generator order
    breaks ties); distances are BFS distances inside the ball's induced
    subgraph, times ``scale``.
    """
    if radius < 0:
        raise ValueError("radius must be non-negative")
    limit = point_budget(budget)
    graph = isinstance(spec, ExplicitGraph)
    index = {spec.identity: 0}
    elems = [spec.identity]
    level = [0]
    queue = deque([spec.identity])
    while queue:
        g = queue.popleft()
        lg = level[index[g]]
        if lg >= radius:
            continue
        nbrs = spec.neighbours(g) if graph else (spec.mul(g, t) for t in spec.generators())
        for h in nbrs:
            if h not in index:
                if len(elems) >= limit:
                    raise BudgetError("points", limit, f"Cayley ball of radius {radius}")
                index[h] = len(elems)
                elems.append(h)
                level.append(lg + 1)
                queue.append(h)
    adjacency = []
    for g in elems:
        nbrs = spec.neighbours(g) if graph else (spec.mul(g, t) for t in spec.generators())
        adjacency.append([index[h] for h in nbrs if h in index and h != g])
    return FiniteMetricSpace.from_graph(
        elems, adjacency, edge_length=scale, scale=scale, base_point=0,
        truncation_radius=radius * scale, group=spec, name=f"cayley:{spec.to_dict()['type']}:{radius}",
    )


def interval_space(length: int) -> FiniteMetricSpace:
    """The points ``0..length`` of the half-line with base point 0."""
    pts = np.arange(length + 1)
    dist = np.abs(pts[:, None] - pts[None, :])
    return FiniteMetricSpace.from_matrix(list(range(length + 1)), dist, base_point=0,
                                         truncation_radius=length, validate=False, name=f"interval:{length}")


def uniform_space(k: int, distance: int = 1, scale: int = 1) -> FiniteMetricSpace:
    """``k`` points at mutual distance ``distance`` (true units)."""
    dist = np.full((k, k), distance * scale, dtype=np.int64)
    np.fill_diagonal(dist, 0)
    return FiniteMetricSpace.from_matrix(list(range(k)), dist, scale=scale, base_point=0, name=f"uniform:{k}")


def product_space(left: FiniteMetricSpace, right: FiniteMetricSpace, radius: Optional[int] = None,
                  *, budget: Optional[int] = None) -> FiniteMetricSpace:
    """l1 product of two based spaces, optionally cut to the ball of ``radius``
    around the base pair (default: the smaller truncation radius)."""
    if left.scale != right.scale:
        raise ValueError("product factors must share a scale")
    if radius is None:
        radius = min(left.truncation_radius, right.truncation_radius)
    ra, rb = left.radial(), right.radial()
    ia, ib = np.nonzero(ra[:, None] + rb[None, :] <= radius)
    limit = point_budget(budget)
    if len(ia) > limit:
        raise BudgetError("points", limit, "product space")
    labels = []
    for a, b in zip(ia.tolist(), ib.tolist()):
        la, lb = left.labels[a], right.labels[b]
        if isinstance(la, tuple) and isinstance(lb, tuple):
            labels.append(la + lb)
        else:
            labels.append((la, lb))
    base = int(np.flatnonzero((ia == left.base_point) & (ib == right.base_point))[0])
    return FiniteMetricSpace(labels, _Product(left, right, ia, ib), scale=left.scale, base_point=base,
                             truncation_radius=radius, name=f"product({left.name},{right.name})")


def chain_metric(n_points: int, bound) -> np.ndarray:
    """Largest metric pointwise at most ``bound``: all-pairs shortest paths on
    the complete graph weighted by the bound.

    ``bound`` is either a callable ``(i, j) -> int | None | math.inf`` or an
    (n, n) array-like with ``None``/``inf``/negative entries meaning no edge.
    """
    inf = kernels.INF
    w = np.full((n_points, n_points), inf, dtype=np.int64)
    if callable(bound):
        for i in range(n_points):
            for j in range(n_points):
                b = bound(i, j)
                if b is not None and b != math.inf:
                    w[i, j] = int(b)
    else:
        arr = np.array(bound, dtype=object)
        for (i, j), b in np.ndenumerate(arr):
            if b is not None and b != math.inf and b >= 0:
                w[i, j] = int(b)
    if (np.diag(w) != 0).any():
        raise ValueError("bound(i, i) must be 0")
    if not np.array_equal(w, w.T):
        raise ValueError("bound must be symmetric")
    off = w + np.eye(n_points, dtype=np.int64)
    if (off <= 0).any():
        raise ValueError("bound must be positive between distinct points")
    dist = kernels.floyd_warshall(w, inf)
    if (dist >= inf).any():
        comps = []
        seen = np.zeros(n_points, dtype=bool)
        for v in range(n_points):
            if not seen[v]:
                members = np.flatnonzero(dist[v] < inf)
                seen[members] = True
                comps.append(members.tolist())
        raise DisconnectedError(comps)
    return dist


# ---------------------------------------------------------------------------
# balls, products, hyperbolicity


def ball(space: FiniteMetricSpace, center: int, r: int) -> set[int]:
    if r < 0:
        raise ValueError("radius must be non-negative")
    return set(np.flatnonzero(space.within([center], r)).tolist())


def annulus(space: FiniteMetricSpace, center: int, r_lo: int, r_hi: int) -> set[int]:
    if not 0 <= r_lo <= r_hi:
        raise ValueError("need 0 <= r_lo <= r_hi")
    row = space.row(center)
    return set(np.flatnonzero((row >= r_lo) & (row <= r_hi)).tolist())


def gromov_product(space: FiniteMetricSpace, x: int, y: int) -> Fraction:
    """(x|y) with respect to the base point, in scaled units (a half-integer)."""
    if space.base_point is None:
        raise MissingBasePointError("Gromov product needs a base point")
    rad = space.radial()
    return Fraction(int(rad[x]) + int(rad[y]) - space.d(x, y), 2)


def _four_point_defect(space, quads):
    x, y, z, w = quads.T
    s1 = space.pair_dist(x, y) + space.pair_dist(z, w)
    s2 = space.pair_dist(x, z) + space.pair_dist(y, w)
    s3 = space.pair_dist(x, w) + space.pair_dist(y, z)
    sums = np.sort(np.stack([s1, s2, s3]), axis=0)
    return sums[2] - sums[1]


def estimate_hyperbolicity(space: FiniteMetricSpace, sample_budget: int = 200_000, seed: int = 0,
                           points: Optional[Iterable[int]] = None) -> Fraction:
    """Four-point-condition estimate: max over quadruples of (largest - middle)/2
    of the three pair sums, in scaled units.

    Exhaustive over ``points`` (default: all points) when the number of
    4-subsets fits the budget, otherwise ``sample_budget`` random quadruples.
    """
    pts = np.arange(space.n) if points is None else np.array(sorted(set(points)), dtype=np.int64)
    m = len(pts)
    if m < 4:
        return Fraction(0)
    best = 0
    if math.comb(m, 4) <= sample_budget:
        combos = itertools.combinations(range(m), 4)
        while True:
            chunk = np.fromiter(itertools.chain.from_iterable(itertools.islice(combos, 50_000)), dtype=np.int64)
            if chunk.size == 0:
                break
            best = max(best, int(_four_point_defect(space, pts[chunk.reshape(-1, 4)]).max()))
    else:
        rng = np.random.default_rng(seed)
        for start in range(0, sample_budget, 50_000):
            k = min(50_000, sample_budget - start)
            quads = pts[rng.integers(0, m, size=(k, 4))]
            best = max(best, int(_four_point_defect(space, quads).max()))
    return Fraction(best, 2)


# ---------------------------------------------------------------------------
# asymptotic dimension


@dataclass
class AsdimEstimate:
    scales: list[int]
    nerve_dims: list[int]
    upper_bound: int
    diameter_bounds: list[int] = field(default_factory=list)
    cover_sizes: list[int] = field(default_factory=list)

    def to_dict(self):
        return {"scales": self.scales, "nerve_dims": self.nerve_dims, "upper_bound": self.upper_bound,
                "diameter_bounds": self.diameter_bounds, "cover_sizes": self.cover_sizes}


def estimate_asdim_upper(space: FiniteMetricSpace, scales: Sequence[int]) -> AsdimEstimate:
    """Upper estimate of asymptotic dimension from greedy ball covers.

    At scale ``s`` centres are taken in lexicographic label order, each one the
    first point not yet covered, and the cover consists of their closed
    ``s``-balls (diameter at most ``2s``). Consecutive centres are more than
    ``s`` apart, so every ball is an enlargement of the block of points it was
    the first to cover. The reported dimension is the cover multiplicity minus
    one; nothing here claims the bound is tight.
    """
    scales = [int(s) for s in scales]
    if any(s <= 0 for s in scales) or scales != sorted(scales):
        raise ValueError("scales must be positive and increasing")
    order = space.lex_order()
    dims, sizes = [], []
    for s in scales:
        covered = np.zeros(space.n, dtype=bool)
        mult = np.zeros(space.n, dtype=np.int64)
        count = 0
        for c in order:
            if covered[c]:
                continue
            member = space.within([c], s)
            covered |= member
            mult += member
            count += 1
        dims.append(int(mult.max()) - 1 if space.n else 0)
        sizes.append(count)
    return AsdimEstimate(scales, dims, max(dims) if dims else 0, [2 * s for s in scales], sizes)


def sphere_count_free_group(rank: int, n: int) -> int:
    return 1 if n == 0 else 2 * rank * (2 * rank - 1) ** (n - 1)


def label_tuple(obj):
    """JSON lists back to hashable tuples, recursively."""
    if isinstance(obj, list):
        return tuple(label_tuple(x) for x in obj)
    return obj


def near_pairs(space: FiniteMetricSpace, sources, r: int):
    """All pairs ``(x, y, d(x, y))`` with ``x`` in ``sources`` and ``d(x, y) <= r``.

    Returned grouped by source in the given order.
    """
    sources = np.asarray(sources, dtype=np.int64)
    backing = space.backing
    if isinstance(backing, _Graph) and backing.dense() is None:
        pos, ys, hops = kernels.ball_pairs(backing.indptr, backing.indices, sources, int(r) // backing.edge_length)
        return sources[pos], ys.astype(np.int64), hops.astype(np.int64) * backing.edge_length
    xs_l, ys_l, ds_l = [], [], []
    for start in range(0, len(sources), 512):
        block = sources[start:start + 512]
        rows = space.rows(block)
        i, j = np.nonzero(rows <= r)
        xs_l.append(block[i])
        ys_l.append(j.astype(np.int64))
        ds_l.append(rows[i, j])
    if not xs_l:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty, empty
    return np.concatenate(xs_l), np.concatenate(ys_l), np.concatenate(ds_l).astype(np.int64)
