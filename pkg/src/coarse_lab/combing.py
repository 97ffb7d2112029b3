"""Combings stored as explicit tables, and the standard constructors.

A combing on a truncated space is an integer table ``H[x, n]`` for stages
``0 <= n <= horizon`` with ``H[x, 0] = p``, ``H[p, n] = p`` and ``H[x, n] = x``
from the settle time of ``x`` on. ``stage_length`` is the scaled distance one
stage is meant to cover (the space scale for graph combings, the height
resolution for cones); auditors use it to convert stages into radii.
"""
from __future__ import annotations

from typing import Callable, Hashable, Optional, Sequence

import numpy as np

from .errors import DisconnectedError, MissingBasePointError, TruncationError
from .metric import FiniteMetricSpace, _Dense, _Graph, _Product, interval_space, product_space

UNSETTLED = -1


class Combing:
    """Table-backed combing ``H: X x {0..horizon} -> X``."""

    def __init__(self, space: FiniteMetricSpace, table, *, stage_length: Optional[int] = None, name: str = "",
                 validate: bool = True):
        if space.base_point is None:
            raise MissingBasePointError("a combing needs a based space")
        table = np.ascontiguousarray(table, dtype=np.int64)
        if table.ndim != 2 or table.shape[0] != space.n or table.shape[1] < 1:
            raise ValueError(f"table shape {table.shape} does not fit a space of {space.n} points")
        self.space = space
        self.table = table
        self.table.setflags(write=False)
        self.stage_length = int(stage_length if stage_length is not None else space.scale)
        self.name = name
        self.settle = _settle_times(table)
        if validate:
            self.validate()

    @property
    def base_point(self) -> int:
        return self.space.base_point

    @property
    def horizon(self) -> int:
        return self.table.shape[1] - 1

    @property
    def n_points(self) -> int:
        return self.table.shape[0]

    def validate(self):
        """Check the combing axioms that can be checked on a finite table."""
        p = self.base_point
        t = self.table
        if (t < 0).any() or (t >= self.n_points).any():
            raise ValueError("table entries out of range")
        if (t[:, 0] != p).any():
            x = int(np.flatnonzero(t[:, 0] != p)[0])
            raise ValueError(f"H[{x}][0] != base point")
        if (t[p] != p).any():
            raise ValueError("combing path of the base point is not constant")
        if (self.settle == UNSETTLED).any():
            x = int(np.flatnonzero(self.settle == UNSETTLED)[0])
            raise ValueError(f"point {x} does not settle within horizon {self.horizon}")

    def column(self, n: int) -> np.ndarray:
        """``H_n`` as an array; stages past the horizon are the identity."""
        if n < 0:
            raise ValueError("stage must be non-negative")
        if n <= self.horizon:
            return self.table[:, n]
        if (self.settle == UNSETTLED).any():
            raise ValueError("stage beyond horizon on an unsettled combing")
        return np.arange(self.n_points, dtype=np.int64)

    def __call__(self, x: int, n: int) -> int:
        return int(self.column(n)[x])

    def path(self, x: int) -> list[int]:
        return self.table[x, : max(int(self.settle[x]), 0) + 1].tolist()

    def __repr__(self):
        return f"Combing({self.name or 'unnamed'}, n={self.n_points}, horizon={self.horizon})"


def _settle_times(table):
    n, width = table.shape
    ids = np.arange(n)[:, None]
    off = table != ids
    settled_at_end = ~off[:, -1]
    # last stage with H != x, plus one
    last_off = width - 1 - np.argmax(off[:, ::-1], axis=1)
    settle = np.where(off.any(axis=1), last_off + 1, 0)
    return np.where(settled_at_end, settle, UNSETTLED).astype(np.int64)


def _table_from_parents(parent, depth, horizon):
    n = len(parent)
    table = np.empty((n, horizon + 1), dtype=np.int64)
    cur = np.arange(n, dtype=np.int64)
    for stage in range(horizon, -1, -1):
        move = depth[cur] > stage
        cur[move] = parent[cur[move]]
        table[:, stage] = cur
    return table


def unit_graph(space: FiniteMetricSpace):
    """CSR adjacency of pairs at distance exactly one unit (``space.scale``)."""
    backing = space.backing
    if isinstance(backing, _Graph) and backing.edge_length == space.scale:
        return backing.indptr, backing.indices
    if isinstance(backing, _Dense):
        rows, cols = np.nonzero(backing.dist == space.scale)
    elif isinstance(backing, _Product):
        rows, cols = _product_unit_edges(space)
    else:
        rows_l, cols_l = [], []
        for x in range(space.n):
            nb = np.flatnonzero(space.row(x) == space.scale)
            rows_l.append(np.full(len(nb), x))
            cols_l.append(nb)
        rows, cols = np.concatenate(rows_l), np.concatenate(cols_l)
    order = np.lexsort((cols, rows))
    rows, cols = rows[order], cols[order]
    indptr = np.zeros(space.n + 1, dtype=np.int32)
    np.add.at(indptr, rows + 1, 1)
    return np.cumsum(indptr).astype(np.int32), cols.astype(np.int32)


def _product_unit_edges(space):
    b = space.backing
    lookup = {(int(a), int(c)): i for i, (a, c) in enumerate(zip(b.ia, b.ib))}
    rows, cols = [], []
    for factor, coord in ((b.left, 0), (b.right, 1)):
        ip, idx = unit_graph(factor)
        for i, (a, c) in enumerate(zip(b.ia.tolist(), b.ib.tolist())):
            own = a if coord == 0 else c
            for nb in idx[ip[own]:ip[own + 1]].tolist():
                key = (nb, c) if coord == 0 else (a, nb)
                j = lookup.get(key)
                if j is not None:
                    rows.append(i)
                    cols.append(j)
    return np.array(rows, dtype=np.int64), np.array(cols, dtype=np.int64)


def geodesic_combing(space: FiniteMetricSpace, tie_break: Optional[Callable[[int], object]] = None) -> Combing:
    """Combing along a breadth-first geodesic tree of the unit graph.

    The parent of each point is its neighbour one level closer to the base
    point that is least under ``tie_break`` (default: point index).
    """
    p = space.base_point
    if p is None:
        raise MissingBasePointError("geodesic combing needs a base point")
    indptr, indices = unit_graph(space)
    from . import kernels

    depth = kernels.bfs_bounded(indptr, indices, np.array([p]), -1).astype(np.int64)
    if (depth < 0).any():
        raise DisconnectedError([np.flatnonzero(depth >= 0).tolist(), np.flatnonzero(depth < 0).tolist()])
    key = tie_break or (lambda v: v)
    parent = np.arange(space.n, dtype=np.int64)
    for v in range(space.n):
        if v == p:
            continue
        nbrs = indices[indptr[v]:indptr[v + 1]]
        cands = nbrs[depth[nbrs] == depth[v] - 1].tolist()
        parent[v] = min(cands, key=key)
    horizon = int(depth.max()) if space.n else 0
    return Combing(space, _table_from_parents(parent, depth, horizon), name="geodesic")


def _lattice_step_path(target):
    """Balanced digital segment from 0 to ``target``: at step k take the axis
    with the largest deficit k*|a_j| - c_j*L (ties: lowest axis)."""
    a = [abs(v) for v in target]
    sign = [1 if v >= 0 else -1 for v in target]
    total = sum(a)
    c = [0] * len(a)
    pos = [0] * len(a)
    path = [tuple(pos)]
    for k in range(1, total + 1):
        best, best_def = -1, None
        for j, aj in enumerate(a):
            deficit = k * aj - c[j] * total
            if best_def is None or deficit > best_def:
                best, best_def = j, deficit
        c[best] += 1
        pos[best] += sign[best]
        path.append(tuple(pos))
    return path


def bresenham_combing(space: FiniteMetricSpace) -> Combing:
    """Digitised straight-line combing on a space labelled by Z^d lattice points."""
    labels = space.labels
    if not all(isinstance(lab, tuple) and all(isinstance(v, (int, np.integer)) for v in lab) for lab in labels):
        raise ValueError("bresenham combing needs lattice-point labels")
    origin = labels[space.base_point]
    if any(origin):
        raise ValueError("base point must be the origin")
    paths = [_lattice_step_path(lab) for lab in labels]
    horizon = max(len(pth) - 1 for pth in paths)
    table = np.empty((space.n, horizon + 1), dtype=np.int64)
    for x, pth in enumerate(paths):
        try:
            idx = [space.index(q) for q in pth]
        except KeyError as exc:
            raise TruncationError(f"digital segment to {labels[x]} leaves the space at {exc.args[0]}") from None
        table[x, : len(idx)] = idx
        table[x, len(idx):] = x
    return Combing(space, table, name="bresenham")


def product_combing(c_a: Combing, c_b: Combing, radius: Optional[int] = None) -> Combing:
    """Walk the first factor's path with the second coordinate at its base point,
    then the second factor's path; settles at ``settle_a + settle_b``."""
    if c_a.stage_length != c_b.stage_length:
        raise ValueError("factor combings must share a stage length")
    space = product_space(c_a.space, c_b.space, radius)
    b = space.backing
    lookup = {(int(a), int(c)): i for i, (a, c) in enumerate(zip(b.ia, b.ib))}
    horizon = c_a.horizon + c_b.horizon
    table = np.empty((space.n, horizon + 1), dtype=np.int64)
    pb = c_b.base_point
    for i, (a, c) in enumerate(zip(b.ia.tolist(), b.ib.tolist())):
        sa = int(c_a.settle[a])
        row = [(int(c_a.table[a, n]), pb) for n in range(sa + 1)]
        row += [(a, int(c_b.table[c, n])) for n in range(1, int(c_b.settle[c]) + 1)]
        try:
            idx = [lookup[q] for q in row]
        except KeyError as exc:
            raise TruncationError(f"product path leaves the truncated product at {exc.args[0]}") from None
        table[i, : len(idx)] = idx
        table[i, len(idx):] = i
    return Combing(space, table, stage_length=c_a.stage_length, name="product")


def nonproper_example(T: int) -> Combing:
    """H(x, n) = 0 for n <= x, n - x for x <= n <= 2x, x for n >= 2x on {0..T}."""
    if T < 1:
        raise ValueError("T must be positive")
    space = interval_space(T)
    x = np.arange(T + 1)[:, None]
    n = np.arange(2 * T + 1)[None, :]
    table = np.where(n <= x, 0, np.where(n <= 2 * x, n - x, x))
    return Combing(space, table, name=f"nonproper({T})")


def noncoherent_example(T: int) -> Combing:
    """H(x, n) = n for 3n <= x, 4n - x for 2n <= x <= 3n, x for x <= 2n on {0..T}."""
    if T < 1:
        raise ValueError("T must be positive")
    space = interval_space(T)
    x = np.arange(T + 1)[:, None]
    n = np.arange(T + 1)[None, :]
    table = np.where(3 * n <= x, n, np.where(2 * n <= x, 4 * n - x, x))
    return Combing(space, table, name=f"noncoherent({T})")


def normal_form_combing(space: FiniteMetricSpace, normal_form: Callable[[Hashable], Sequence]) -> Combing:
    """Prefix combing of a normal form: ``H[x][n]`` is the element spelled by the
    first ``n`` letters of ``normal_form(label of x)``."""
    group = space.group
    if group is None:
        raise ValueError("normal-form combings need a space built from a group")
    rows = []
    for x, lab in enumerate(space.labels):
        g = group.identity
        row = [space.index(g)]
        for token in normal_form(lab):
            g = group.mul(g, token)
            if not space.has_label(g):
                raise TruncationError(f"prefix of the normal form of {lab!r} leaves the truncation at {g!r}")
            row.append(space.index(g))
        if row[-1] != x:
            raise ValueError(f"normal form of {lab!r} evaluates to {space.labels[row[-1]]!r}")
        rows.append(row)
    horizon = max(len(r) - 1 for r in rows)
    table = np.empty((space.n, horizon + 1), dtype=np.int64)
    for x, row in enumerate(rows):
        table[x, : len(row)] = row
        table[x, len(row):] = x
    return Combing(space, table, name="normal_form")


def shortlex_normal_form(space: FiniteMetricSpace, order: Optional[Sequence] = None) -> Callable[[Hashable], Sequence]:
    """Shortlex-least geodesic words for the elements of a Cayley ball.

    ``order`` lists the generator tokens from least to greatest (default: the
    group's own generator order). Words of string tokens are returned as
    strings.
    """
    group = space.group
    if group is None:
        raise ValueError("shortlex normal forms need a space built from a group")
    tokens = list(order) if order is not None else list(group.generators())
    words = {group.identity: ()}
    frontier = [group.identity]
    while frontier:
        nxt = []
        for g in frontier:
            for t in tokens:
                h = group.mul(g, t)
                if h not in words and space.has_label(h):
                    words[h] = words[g] + (t,)
                    nxt.append(h)
        frontier = nxt
    as_str = all(isinstance(t, str) for t in tokens)

    def normal_form(label):
        w = words[label]
        return "".join(w) if as_str else w

    return normal_form


def reduced_word(label) -> str:
    """Normal form of a free-group element: its reduced word."""
    return "" if label == "e" else label
