"""Exact linear algebra over Z, Q and F_p on sparse integer matrices.

Matrices are lists of sparse rows (``{col: value}``). Elimination first uses
unit pivots, which keeps integer entries small and handles the +-1 matrices
coming from simplicial coboundaries almost completely; whatever is left over
is reduced by a dense Smith normal form with transforms.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .errors import BudgetError, matrix_budget


def _is_prime(p):
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


@dataclass(frozen=True)
class Ring:
    kind: str  # "ZZ", "QQ" or "GF"
    p: int = 0

    def __post_init__(self):
        if self.kind not in ("ZZ", "QQ", "GF"):
            raise ValueError(f"unknown ring {self.kind!r}")
        if self.kind == "GF" and not _is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")

    @property
    def is_field(self):
        return self.kind != "ZZ"

    def __str__(self):
        return f"GF({self.p})" if self.kind == "GF" else self.kind

    def norm(self, v):
        if self.kind == "GF":
            return int(v) % self.p
        if self.kind == "QQ":
            return Fraction(v)
        return int(v)

    def is_unit(self, v):
        if self.kind == "ZZ":
            return v in (1, -1)
        return v != 0

    def inv(self, v):
        if self.kind == "ZZ":
            return v
        if self.kind == "QQ":
            return 1 / Fraction(v)
        return pow(int(v), -1, self.p)

    @classmethod
    def parse(cls, text: str) -> "Ring":
        t = text.strip().upper()
        if t in ("ZZ", "Z", "INTEGERS"):
            return ZZ
        if t in ("QQ", "Q", "RATIONALS"):
            return QQ
        if t.startswith("GF(") and t.endswith(")"):
            return GF(int(t[3:-1]))
        if t.startswith("F") and t[1:].isdigit():
            return GF(int(t[1:]))
        raise ValueError(f"unknown ring {text!r}")


ZZ = Ring("ZZ")
QQ = Ring("QQ")


def GF(p: int) -> Ring:
    return Ring("GF", int(p))


# ---------------------------------------------------------------------------
# dense Smith normal form


def smith_normal_form(A: Sequence[Sequence[int]]):
    """Return ``(U, D, V)`` with ``U A V = D`` diagonal, unimodular ``U``, ``V``,
    non-negative diagonal entries dividing each other in order."""
    m = len(A)
    n = len(A[0]) if m else 0
    D = [[int(v) for v in row] for row in A]
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(a, b):
        D[a], D[b] = D[b], D[a]
        U[a], U[b] = U[b], U[a]

    def swap_cols(a, b):
        for row in D:
            row[a], row[b] = row[b], row[a]
        for row in V:
            row[a], row[b] = row[b], row[a]

    def add_row(dst, src, f):  # row_dst += f * row_src
        if f:
            D[dst] = [x + f * y for x, y in zip(D[dst], D[src])]
            U[dst] = [x + f * y for x, y in zip(U[dst], U[src])]

    def add_col(dst, src, f):
        if f:
            for row in D:
                row[dst] += f * row[src]
            for row in V:
                row[dst] += f * row[src]

    for t in range(min(m, n)):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                v = D[i][j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
        if best is None:
            break
        swap_rows(t, best[1])
        swap_cols(t, best[2])
        while True:
            piv = D[t][t]
            changed = False
            for i in range(t + 1, m):
                if D[i][t]:
                    add_row(i, t, -(D[i][t] // piv))
                    if D[i][t]:
                        changed = True
            for j in range(t + 1, n):
                if D[t][j]:
                    add_col(j, t, -(D[t][j] // piv))
                    if D[t][j]:
                        changed = True
            if changed:
                cands = [(abs(D[i][t]), i, t) for i in range(t, m) if D[i][t]]
                cands += [(abs(D[t][j]), t, j) for j in range(t, n) if D[t][j]]
                _, i, j = min(cands)
                swap_rows(t, i)
                swap_cols(t, j)
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if D[i][j] % piv), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            U[t] = [-x for x in U[t]]
    return U, D, V


def invariant_factors_dense(A) -> list[int]:
    _, D, _ = smith_normal_form(A)
    return [D[i][i] for i in range(min(len(D), len(D[0]) if D else 0)) if D[i][i]]


# ---------------------------------------------------------------------------
# sparse elimination


@dataclass
class Elimination:
    ring: Ring
    ncols: int
    pivots: list  # (row dict at pivot time, pivot column, rhs value)
    residual_rows: list  # rows (dicts) left after unit elimination
    residual_rhs: list
    pivot_cols: set

    @property
    def unit_rank(self):
        return len(self.pivots)


def eliminate(rows: Sequence[dict], ncols: int, ring: Ring, rhs: Optional[Sequence] = None) -> Elimination:
    """Unit-pivot elimination with row operations only.

    Pivot choice is deterministic: the shortest remaining row (ties: lowest
    row index) that has a unit entry, and in it the unit entry whose column
    is shortest (ties: lowest column).
    """
    R = [{c: ring.norm(v) for c, v in r.items() if ring.norm(v) != 0} for r in rows]
    b = [ring.norm(v) for v in rhs] if rhs is not None else [ring.norm(0)] * len(R)
    cols: dict[int, set] = {}
    for i, r in enumerate(R):
        for c in r:
            cols.setdefault(c, set()).add(i)
    alive = set(range(len(R)))
    heap = [(len(r), i) for i, r in enumerate(R)]
    heapq.heapify(heap)
    pivots = []
    pivot_cols = set()
    stale = set()
    while heap:
        length, i = heapq.heappop(heap)
        if i not in alive or length != len(R[i]):
            continue
        row = R[i]
        if not row:
            continue
        units = [c for c, v in row.items() if ring.is_unit(v)]
        if not units:
            stale.add(i)
            continue
        c = min(units, key=lambda col: (len(cols[col]), col))
        inv = ring.inv(row[c])
        alive.discard(i)
        stale.discard(i)
        for col in row:
            cols[col].discard(i)
        others = sorted(cols[c])
        for j in others:
            f = R[j][c] * inv
            target = R[j]
            for col, v in row.items():
                nv = ring.norm(target.get(col, 0) - f * v)
                if nv:
                    if col not in target:
                        cols[col].add(j)
                    target[col] = nv
                elif col in target:
                    del target[col]
                    cols[col].discard(j)
            b[j] = ring.norm(b[j] - f * b[i])
            stale.discard(j)
            heapq.heappush(heap, (len(target), j))
        pivots.append((row, c, b[i]))
        pivot_cols.add(c)
        del cols[c]
    residual = sorted(i for i in alive if R[i])
    zero_rows = [i for i in alive if not R[i]]
    res_rows = [R[i] for i in residual]
    res_rhs = [b[i] for i in residual] + [b[i] for i in sorted(zero_rows)]
    # zero rows carry consistency conditions on the right-hand side
    res_rows += [{} for _ in zero_rows]
    return Elimination(ring, ncols, pivots, res_rows, res_rhs, pivot_cols)


def _residual_dense(el: Elimination):
    cols = sorted({c for r in el.residual_rows for c in r})
    nrows = sum(1 for r in el.residual_rows if r)
    limit = matrix_budget()
    if nrows * len(cols) > limit:
        raise BudgetError("matrix cells", limit, f"residual {nrows}x{len(cols)}")
    pos = {c: k for k, c in enumerate(cols)}
    dense = []
    for r in el.residual_rows:
        row = [0] * len(cols)
        for c, v in r.items():
            row[pos[c]] = v
        dense.append(row)
    return dense, cols


def invariant_factors(rows: Sequence[dict], ncols: int) -> list[int]:
    """Nonzero invariant factors of an integer matrix, in divisibility order."""
    el = eliminate(rows, ncols, ZZ)
    dense, cols = _residual_dense(el)
    dense = [r for r in dense if any(r)]
    rest = invariant_factors_dense(dense) if dense and cols else []
    return [1] * el.unit_rank + rest


def rank(rows: Sequence[dict], ncols: int, ring: Ring) -> int:
    if ring.is_field:
        return eliminate(rows, ncols, ring).unit_rank
    return len(invariant_factors(rows, ncols))


def solve(rows: Sequence[dict], ncols: int, rhs: Sequence, ring: Ring) -> Optional[list]:
    """A solution ``x`` of ``A x = rhs`` over the ring, or ``None``."""
    el = eliminate(rows, ncols, ring, rhs)
    x = {}
    if ring.is_field:
        if any(v != 0 for v in el.residual_rhs):
            return None
    else:
        dense, cols = _residual_dense(el)
        if not cols:
            if any(v != 0 for v in el.residual_rhs):
                return None
        else:
            U, D, V = smith_normal_form(dense)
            c = [sum(u * v for u, v in zip(urow, el.residual_rhs)) for urow in U]
            y = [0] * len(cols)
            for i, ci in enumerate(c):
                d = D[i][i] if i < len(cols) else 0
                if d == 0:
                    if ci != 0:
                        return None
                elif ci % d:
                    return None
                else:
                    y[i] = ci // d
            for k, col in enumerate(cols):
                x[col] = sum(V[k][j] * y[j] for j in range(len(cols)))
    for row, c, bv in reversed(el.pivots):
        acc = bv
        for col, v in row.items():
            if col != c:
                acc -= v * x.get(col, 0)
        x[c] = ring.norm(acc * ring.inv(row[c]))
    return [x.get(j, ring.norm(0)) for j in range(ncols)]


def kernel_basis(rows: Sequence[dict], ncols: int) -> list[list[int]]:
    """Primitive integer vectors spanning the rational kernel, one per free column."""
    el = eliminate(rows, ncols, QQ)
    free = [j for j in range(ncols) if j not in el.pivot_cols]
    basis = []
    for f in free:
        x = {f: Fraction(1)}
        for row, c, _ in reversed(el.pivots):
            acc = Fraction(0)
            for col, v in row.items():
                if col != c:
                    acc -= v * x.get(col, 0)
            x[c] = acc / row[c]
        basis.append(_primitive([x.get(j, Fraction(0)) for j in range(ncols)]))
    return basis


def _primitive(vec):
    from math import gcd

    den = 1
    for v in vec:
        den = den * v.denominator // gcd(den, v.denominator)
    ints = [int(v * den) for v in vec]
    g = 0
    for v in ints:
        g = gcd(g, v)
    if g > 1:
        ints = [v // g for v in ints]
    for v in ints:
        if v:
            if v < 0:
                ints = [-w for w in ints]
            break
    return ints


def dense_to_rows(A) -> list[dict]:
    return [{j: int(v) for j, v in enumerate(row) if v} for row in A]


def matvec(rows: Sequence[dict], x: Sequence) -> list:
    return [sum(v * x[c] for c, v in r.items()) for r in rows]
