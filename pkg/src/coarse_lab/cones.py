"""Finite open cones and warped cones over a sampled base.

Heights live on the grid ``Δ, 2Δ, ..., T`` (scaled integers); the whole of
``B x {0}`` is a single apex point. ``phi`` is a table of positive integer
multipliers, one per positive height, so the bound between ``(x, t)`` and
``(y, s)`` is ``|t - s| + phi(min(t, s)) * d_B(x, y)``. The cone metric is the
largest metric below that bound.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .combing import Combing
from .errors import BudgetError, matrix_budget
from .metric import FiniteMetricSpace, chain_metric
from . import kernels

APEX = "apex"


@dataclass(frozen=True)
class ConeSpec:
    base: FiniteMetricSpace
    phi: tuple
    height_max: int
    resolution: int

    def __post_init__(self):
        object.__setattr__(self, "phi", tuple(int(v) for v in self.phi))
        if self.resolution <= 0 or self.height_max <= 0 or self.height_max % self.resolution:
            raise ValueError("height_max must be a positive multiple of the resolution")
        if len(self.phi) != self.height_max // self.resolution:
            raise ValueError(f"phi needs one value per positive height ({self.height_max // self.resolution})")
        if any(v <= 0 for v in self.phi):
            raise ValueError("phi must be positive")
        if any(a > b for a, b in zip(self.phi, self.phi[1:])):
            raise ValueError("phi must be non-decreasing")
        if self.base.n < 1:
            raise ValueError("cone base must have at least one point")

    @property
    def heights(self) -> list[int]:
        return list(range(self.resolution, self.height_max + 1, self.resolution))

    @classmethod
    def with_phi(cls, base, height_max, resolution, phi):
        """Tabulate a callable ``phi(height)`` on the height grid."""
        hs = range(resolution, height_max + 1, resolution)
        return cls(base, tuple(int(phi(h)) for h in hs), height_max, resolution)

    @property
    def sampling_radius(self) -> int:
        """Vertical distance from any height in [0, height_max] to the nearest sampled height.

        This is the only sampling error: the base is taken as given, so a
        continuum cone over the same base differs from the sample by at most
        this much in height. It bounds where the samples sit, not the
        distortion of the chain metric.
        """
        return -(-self.resolution // 2)

    def to_dict(self):
        return {"phi": list(self.phi), "height_max": self.height_max, "resolution": self.resolution,
                "sampling_radius": self.sampling_radius}


@dataclass(frozen=True)
class WarpSpec:
    cone: ConeSpec
    action: tuple

    def __post_init__(self):
        perms = tuple(tuple(int(v) for v in g) for g in self.action)
        object.__setattr__(self, "action", perms)
        k = self.cone.base.n
        for g in perms:
            if sorted(g) != list(range(k)):
                raise ValueError("each generator must permute the base sample")


def _cone_points(spec):
    labels = [APEX] + [(b, h) for h in spec.heights for b in range(spec.base.n)]
    return labels


def _bound_matrix(spec):
    base = spec.base.dense_matrix().astype(np.int64)
    hs = np.array(spec.heights, dtype=np.int64)
    phi = np.array(spec.phi, dtype=np.int64)
    k = spec.base.n
    n_h = len(hs)
    n = 1 + k * n_h
    cells = n * n
    if cells > matrix_budget():
        raise BudgetError("matrix cells", matrix_budget(), f"cone with {n} points")
    h_idx = np.repeat(np.arange(n_h), k)
    b_idx = np.tile(np.arange(k), n_h)
    lo = np.minimum(h_idx[:, None], h_idx[None, :])
    w = np.abs(hs[h_idx][:, None] - hs[h_idx][None, :]) + phi[lo] * base[b_idx][:, b_idx]
    bound = np.zeros((n, n), dtype=np.int64)
    bound[1:, 1:] = w
    bound[0, 1:] = hs[h_idx]
    bound[1:, 0] = hs[h_idx]
    return bound, h_idx, b_idx


def _finish(spec, labels, dist, name):
    space = FiniteMetricSpace.from_matrix(labels, dist, scale=spec.base.scale, base_point=0,
                                          truncation_radius=spec.height_max, validate=False, name=name)
    return space, cone_combing(space, spec)


def cone_combing(space: FiniteMetricSpace, spec: ConeSpec) -> Combing:
    """H_n(x, t) = (x, min(n Δ, t)), H_0 = apex."""
    k = spec.base.n
    steps = spec.height_max // spec.resolution
    table = np.zeros((space.n, steps + 1), dtype=np.int64)
    for i in range(1, space.n):
        b, h = space.labels[i]
        level = h // spec.resolution
        for n in range(1, steps + 1):
            table[i, n] = 1 + (min(n, level) - 1) * k + b
    return Combing(space, table, stage_length=spec.resolution, name="cone")


def open_cone(spec: ConeSpec):
    """Open cone as a finite space with its canonical height combing."""
    bound, _, _ = _bound_matrix(spec)
    dist = kernels.floyd_warshall(bound.copy(), kernels.INF)
    return _finish(spec, _cone_points(spec), dist, "open_cone")


def cone_bound(spec: ConeSpec) -> np.ndarray:
    return _bound_matrix(spec)[0]


def warped_cone(spec: WarpSpec, warp_length: int | None = None):
    """Cone over the base with extra edges (x, t) -- (g x, t) of length one unit."""
    cone = spec.cone
    bound, h_idx, b_idx = _bound_matrix(cone)
    step = int(cone.base.scale if warp_length is None else warp_length)
    k = cone.base.n
    for g in spec.action:
        g = np.array(g)
        src = np.arange(1, bound.shape[0])
        dst = 1 + h_idx * k + g[b_idx]
        keep = src != dst
        s, t = src[keep], dst[keep]
        bound[s, t] = np.minimum(bound[s, t], step)
        bound[t, s] = np.minimum(bound[t, s], step)
    dist = chain_metric(bound.shape[0], bound)
    return _finish(cone, _cone_points(cone), dist, "warped_cone")


def rotation_action(k: int, shifts: Sequence[int]) -> tuple:
    """Rotations of a k-point cycle by each shift (and their inverses)."""
    perms = []
    for s in shifts:
        for t in (s, -s):
            p = tuple((i + t) % k for i in range(k))
            if p not in perms:
                perms.append(p)
    return tuple(perms)
