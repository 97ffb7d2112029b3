"""Simplicial cochains with finite supports, relative cohomology, restriction
maps between scales, uniform-triviality probes and stabilisation reports."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Sequence

import numpy as np

from .errors import MissingBasePointError
from .metric import FiniteMetricSpace
from .rips import SimplicialComplex, SubcomplexHandle, full_subcomplex, inclusion, rips_complex, simplicial_neighborhood
from .snf import QQ, ZZ, Ring, invariant_factors, kernel_basis, matvec, rank, solve


@dataclass
class CochainMatrix:
    """Matrix of the coboundary C^q -> C^{q+1} on the simplices outside a closed subcomplex."""

    q: int
    rows: np.ndarray  # indices of (q+1)-simplices
    cols: np.ndarray  # indices of q-simplices
    entries: list  # sparse rows: {column position: value}

    @property
    def shape(self):
        return len(self.rows), len(self.cols)

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.shape, dtype=np.int64)
        for i, r in enumerate(self.entries):
            for j, v in r.items():
                out[i, j] = int(v)
        return out

    def to_triplets(self) -> str:
        """One ``row col value`` line per nonzero entry."""
        lines = [f"{i} {j} {int(v)}" for i, r in enumerate(self.entries) for j, v in sorted(r.items())]
        return "\n".join(lines) + ("\n" if lines else "")


def _support(cx: SimplicialComplex, q: int, relative_to: Optional[SubcomplexHandle]) -> np.ndarray:
    if q < 0 or q >= len(cx.simplices):
        return np.zeros(0, dtype=np.int64)
    if relative_to is None:
        return np.arange(cx.count(q))
    return np.flatnonzero(~relative_to.flags[q])


def _check_relative(cx, relative_to):
    if relative_to is None:
        return
    if relative_to.kind != "closed":
        raise ValueError("cohomology is taken relative to a closed subcomplex")
    if relative_to.parent is not cx:
        raise ValueError("relative handle belongs to a different complex")


def coboundary(cx: SimplicialComplex, q: int, ring: Ring = ZZ,
               relative_to: Optional[SubcomplexHandle] = None) -> CochainMatrix:
    """delta^q with entry (-1)^i between a (q+1)-simplex and its i-th face."""
    if q < 0:
        raise ValueError("degree must be non-negative")
    if q >= cx.dim_cap:
        raise ValueError(f"degree {q} needs simplices above dim_cap {cx.dim_cap}")
    _check_relative(cx, relative_to)
    rows = _support(cx, q + 1, relative_to)
    cols = _support(cx, q, relative_to)
    col_pos = {int(c): k for k, c in enumerate(cols)}
    faces = cx.index(q)
    entries = []
    for r in rows.tolist():
        s = cx.simplices[q + 1][r]
        row = {}
        for i in range(q + 2):
            k = col_pos.get(faces[s[:i] + s[i + 1:]])
            if k is not None:
                row[k] = ring.norm(-1 if i % 2 else 1)
        entries.append(row)
    return CochainMatrix(q, rows, cols, entries)


@dataclass
class CohomologyResult:
    ring: str
    betti: dict
    torsion: dict = field(default_factory=dict)

    def signature(self) -> list[int]:
        """Degrees with a nonzero group."""
        return sorted(q for q in self.betti if self.betti[q] or self.torsion.get(q))

    def to_dict(self):
        return {"ring": self.ring, "betti": {str(q): b for q, b in sorted(self.betti.items())},
                "torsion": {str(q): t for q, t in sorted(self.torsion.items())}}


def cohomology(cx: SimplicialComplex, ring: Ring = ZZ, degrees: Optional[Sequence[int]] = None,
               relative_to: Optional[SubcomplexHandle] = None) -> CohomologyResult:
    """H^q = ker delta^q / im delta^{q-1} on cochains vanishing on ``relative_to``."""
    _check_relative(cx, relative_to)
    degrees = list(range(cx.dim_cap)) if degrees is None else sorted(int(q) for q in degrees)
    cache = {}

    def factors(q):
        # invariant factors of delta^q over Z (ranks over every ring follow from them)
        if q not in cache:
            if q < 0:
                cache[q] = []
            else:
                m = coboundary(cx, q, ZZ, relative_to)
                cache[q] = invariant_factors(m.entries, m.shape[1]) if m.shape[0] and m.shape[1] else []
        return cache[q]

    def rk(q):
        f = factors(q)
        if ring.kind == "GF":
            return sum(1 for d in f if d % ring.p)
        return len(f)

    if any(q < 0 or q >= cx.dim_cap for q in degrees):
        raise ValueError(f"degrees must lie in 0..{cx.dim_cap - 1} for dim_cap {cx.dim_cap}")
    betti, torsion = {}, {}
    for q in degrees:
        n_q = len(_support(cx, q, relative_to))
        betti[q] = n_q - rk(q) - rk(q - 1)
        if ring.kind == "ZZ":
            tors = [d for d in factors(q - 1) if d > 1]
            if tors:
                torsion[q] = tors
    return CohomologyResult(str(ring), betti, torsion)


def _cocycle_generators(cx, q, relative_to, ring=QQ):
    """Integer cocycles whose classes form a rational basis of H^q."""
    d_q = coboundary(cx, q, ZZ, relative_to)
    n_q = d_q.shape[1]
    if n_q == 0:
        return [], d_q
    kernel = kernel_basis(d_q.entries, n_q) if d_q.shape[0] else [[int(i == j) for j in range(n_q)] for i in range(n_q)]
    if q > 0:
        d_prev = coboundary(cx, q - 1, ZZ, relative_to)
        image_cols = _columns(d_prev)
    else:
        image_cols = []
    chosen = []
    current = rank(_rows_from_columns(image_cols, n_q), max(len(image_cols), 1), QQ) if image_cols else 0
    for z in kernel:
        trial = image_cols + chosen + [z]
        r = rank(_rows_from_columns(trial, n_q), len(trial), QQ)
        if r > current:
            chosen.append(z)
            current = r
    return chosen, d_q


def _columns(m: CochainMatrix):
    cols = [[0] * m.shape[0] for _ in range(m.shape[1])]
    for i, r in enumerate(m.entries):
        for j, v in r.items():
            cols[j][i] = int(v)
    return cols


def _rows_from_columns(columns, n_rows):
    rows = [dict() for _ in range(n_rows)]
    for j, col in enumerate(columns):
        for i, v in enumerate(col):
            if v:
                rows[i][j] = v
    return rows


def is_coboundary(cx, q, cochain, ring: Ring, relative_to=None):
    """Solve delta xi = cochain over the ring; returns (verdict, xi).

    Verdicts: ``"coboundary"``, ``"no integral primitive"`` (solvable over Q
    only), ``"nonzero"``.
    """
    if q == 0:
        return ("coboundary", []) if not any(cochain) else ("nonzero", None)
    d_prev = coboundary(cx, q - 1, ring, relative_to)
    n = d_prev.shape[1]
    rhs = [ring.norm(v) for v in cochain]
    if n == 0:
        return ("coboundary", []) if not any(rhs) else ("nonzero", None)
    xi = solve(d_prev.entries, n, rhs, ring)
    if xi is not None:
        return "coboundary", [int(v) if ring.kind != "QQ" else v for v in xi]
    if ring.kind == "ZZ" and solve(d_prev.entries, n, [Fraction(v) for v in cochain], QQ) is not None:
        return "no integral primitive", None
    return "nonzero", None


@dataclass
class RestrictionResult:
    degree: int
    matrix: list  # sparse rows: target cochain position -> {source position: 1}
    source_generators: list
    target_generators: list
    induced: list  # coordinates (over Q) of each restricted source generator
    verdicts: list
    certificates: list

    def to_dict(self):
        return {
            "degree": self.degree,
            "source_rank": len(self.source_generators),
            "target_rank": len(self.target_generators),
            "induced": [[str(v) for v in row] for row in self.induced],
            "verdicts": self.verdicts,
            "certificates": [None if c is None else [str(v) for v in c] for c in self.certificates],
        }


def restriction_map(cx_S: SimplicialComplex, cx_R: SimplicialComplex, incl: Optional[list], ring: Ring, degree: int,
                    relative: tuple = (None, None)) -> RestrictionResult:
    """Restrict q-cochains along ``cx_R`` into ``cx_S`` and decide which
    restricted source generators vanish in the cohomology of ``cx_R``."""
    rel_S, rel_R = relative
    _check_relative(cx_S, rel_S)
    _check_relative(cx_R, rel_R)
    incl = inclusion(cx_R, cx_S) if incl is None else incl
    q = degree
    src_support = _support(cx_S, q, rel_S)
    tgt_support = _support(cx_R, q, rel_R)
    src_pos = {int(s): k for k, s in enumerate(src_support)}
    if rel_S is not None and rel_R is not None:
        for k in range(len(cx_R.simplices)):
            if k < len(incl) and rel_R.flags[k].any() and not rel_S.flags[k][incl[k][rel_R.flags[k]]].all():
                raise ValueError("relative subcomplexes are not compatible with the inclusion")
    matrix = []
    for t in tgt_support.tolist():
        k = src_pos.get(int(incl[q][t]))
        matrix.append({k: 1} if k is not None else {})
    gens_S, _ = _cocycle_generators(cx_S, q, rel_S)
    gens_R, _ = _cocycle_generators(cx_R, q, rel_R)
    image_cols = _columns(coboundary(cx_R, q - 1, ZZ, rel_R)) if q > 0 else []
    basis = gens_R + image_cols
    induced, verdicts, certs = [], [], []
    for g in gens_S:
        img = matvec(matrix, g) if matrix else []
        if basis:
            coords = solve(_rows_from_columns(basis, len(img)), len(basis), [Fraction(v) for v in img], QQ)
            induced.append(coords[: len(gens_R)] if coords is not None else None)
        else:
            induced.append([])
        verdict, xi = is_coboundary(cx_R, q, img, ring, rel_R)
        verdicts.append(verdict)
        certs.append(xi)
    return RestrictionResult(q, matrix, gens_S, gens_R, induced, verdicts, certs)


@dataclass
class UniformTrivialityProbe:
    degree: int
    n: int
    N: int
    r: int
    s: int
    centers: list
    results: list  # per center: {"center", "generators", "verdicts"}

    @property
    def vanishes(self) -> bool:
        return all(v == "coboundary" for res in self.results for v in res["verdicts"])

    def to_dict(self):
        return {"degree": self.degree, "n": self.n, "N": self.N, "r": self.r, "s": self.s,
                "centers": self.centers, "vanishes": self.vanishes, "results": self.results}


def default_centers(space: FiniteMetricSpace, samples: int = 8) -> list[int]:
    """Base point plus up to ``samples`` points of the sphere at half the truncation radius."""
    p = space.base_point
    rad = space.radial()
    half = space.truncation_radius // 2
    sphere = np.flatnonzero(rad == half).tolist() if half > 0 else []
    if len(sphere) > samples:
        step = len(sphere) / samples
        sphere = [sphere[int(i * step)] for i in range(samples)]
    return [p] + [x for x in sphere if x != p]


def uniform_triviality_probe(space: FiniteMetricSpace, k: int, n: int, N: int, r: int, s: int, ring: Ring = ZZ,
                             centers: Optional[Sequence[int]] = None, dim_cap: Optional[int] = None
                             ) -> UniformTrivialityProbe:
    """Does H^k_c(U_N({x}, r)) -> H^k_c(U_n({x}, s)) vanish for each centre x?

    The map restricts cochains from P_N to P_n and extends them by zero from
    U({x}, r) to U({x}, s).
    """
    if space.base_point is None:
        raise MissingBasePointError("uniform triviality probe needs a base point")
    if not (n <= N and r <= s):
        raise ValueError("need n <= N and r <= s")
    cap = k + 1 if dim_cap is None else dim_cap
    P_N = rips_complex(space, N, cap)
    P_n = rips_complex(space, n, cap)
    incl = inclusion(P_n, P_N)
    centers = default_centers(space) if centers is None else [int(c) for c in centers]
    results = []
    for x in centers:
        U_src = simplicial_neighborhood(P_N, space, [x], r)
        U_tgt = simplicial_neighborhood(P_n, space, [x], s)
        rel_src, rel_tgt = U_src.complement(), U_tgt.complement()
        gens, _ = _cocycle_generators(P_N, k, rel_src)
        src_support = _support(P_N, k, rel_src)
        src_pos = {int(a): i for i, a in enumerate(src_support)}
        tgt_support = _support(P_n, k, rel_tgt)
        verdicts, certs = [], []
        for g in gens:
            img = []
            for t in tgt_support.tolist():
                i = src_pos.get(int(incl[k][t]))
                img.append(g[i] if i is not None else 0)
            verdict, xi = is_coboundary(P_n, k, img, ring, rel_tgt)
            verdicts.append(verdict)
            certs.append(None if xi is None else [str(v) for v in xi])
        results.append({"center": int(x), "generators": len(gens), "verdicts": verdicts, "certificates": certs})
    return UniformTrivialityProbe(k, n, N, r, s, centers, results)


@dataclass
class StabilizationReport:
    truncations: list
    scales: list
    degrees: list
    table: dict  # (T, R) -> CohomologyResult
    verdict: str
    signature_verdict: str
    top_degree: Optional[int]
    window: list

    def to_dict(self):
        return {
            "truncations": self.truncations,
            "scales": self.scales,
            "degrees": self.degrees,
            "table": [{"T": T, "R": R, **res.to_dict()} for (T, R), res in sorted(self.table.items())],
            "verdict": self.verdict,
            "signature_verdict": self.signature_verdict,
            "top_degree": self.top_degree,
            "window": [list(w) for w in self.window],
        }


def collar_subcomplex(cx: SimplicialComplex, space: FiniteMetricSpace, collar: int) -> SubcomplexHandle:
    """Closed full subcomplex on the points farther than ``truncation_radius - collar`` from the base point."""
    rad = space.radial()
    outer = np.flatnonzero(rad > space.truncation_radius - collar)
    return full_subcomplex(cx, outer.tolist())


def coarse_cohomology_report(spaces: Mapping[int, FiniteMetricSpace], R_list: Sequence[int], degrees: Sequence[int],
                             collar: int, ring: Ring = ZZ, dim_cap: Optional[int] = None) -> StabilizationReport:
    """Relative cohomology of (P_R(box T), P_R(collar of box T)) over a grid of T and R.

    ``Stable`` when every cell of the window formed by the two largest T and
    the (up to) two largest R agrees; the signature verdict compares only the
    sets of degrees with nonzero groups.
    """
    Ts = sorted(spaces)
    Rs = sorted(int(R) for R in R_list)
    degrees = sorted(int(q) for q in degrees)
    cap = max(degrees) + 1 if dim_cap is None else dim_cap
    table = {}
    for T in Ts:
        sp = spaces[T]
        for R in Rs:
            cx = rips_complex(sp, R, cap)
            rel = collar_subcomplex(cx, sp, collar)
            table[(T, R)] = cohomology(cx, ring, degrees, rel)
    window = [(T, R) for T in Ts[-2:] for R in Rs[-2:]]
    vals = {tuple(sorted(table[w].betti.items())) + tuple(sorted((q, tuple(t)) for q, t in table[w].torsion.items()))
            for w in window}
    sigs = {tuple(table[w].signature()) for w in window}
    verdict = "Stable" if len(vals) == 1 else "Unstable"
    sig_verdict = "Stable" if len(sigs) == 1 else "Unstable"
    top = None
    if sig_verdict == "Stable":
        sig = next(iter(sigs))
        top = max(sig) if sig else None
    return StabilizationReport(Ts, Rs, degrees, table, verdict, sig_verdict, top, window)
