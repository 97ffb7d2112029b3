"""Finite-stage approximation of the combing corona by clustering combing rays.

Two points of an annulus are ``s``-close at stage ``n`` when
``rho_n(x, y) = max_{m <= n} d(H_m x, H_m y) <= s``; clusters are the
single-linkage classes of that relation. Nothing here claims to compute the
corona itself; every result records its stage, threshold and annulus.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Union

import numpy as np

from .cohomology import CohomologyResult, cohomology
from .combing import Combing
from .metric import FiniteMetricSpace, label_key
from .rips import clique_complex
from .snf import ZZ, Ring


class UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, a):
        root = a
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[a] != root:
            self.parent[a], a = root, self.parent[a]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        # the smaller root wins so representatives do not depend on merge order
        if rb < ra:
            ra, rb = rb, ra
        self.parent[rb] = ra
        return True


def ray_distance(c: Combing, x: int, y: int, n: int) -> int:
    """rho_n(x, y) = max over m <= n of d(H_m x, H_m y)."""
    sp = c.space
    return max(sp.d(c(x, m), c(y, m)) for m in range(n + 1))


def _ray_matrix(c: Combing, rays: np.ndarray, n: int) -> np.ndarray:
    """rho_n between distinct ray prefixes (rows of ``rays``, shape k x (n+1))."""
    k = len(rays)
    rho = np.zeros((k, k), dtype=np.int64)
    for m in range(n + 1):
        pts = rays[:, m]
        uniq, inv = np.unique(pts, return_inverse=True)
        sub = c.space.submatrix(uniq)
        np.maximum(rho, sub[inv][:, inv], out=rho)
    return rho


@dataclass
class ClusterPartition:
    stage: int
    threshold: int
    annulus: tuple
    clusters: list
    representatives: list
    # rho_n between clusters: minimum over cross pairs (used by the nerve)
    cross: np.ndarray = field(repr=False, default=None)
    # rho_n between representatives
    rep_rho: np.ndarray = field(repr=False, default=None)

    def to_dict(self, space: Optional[FiniteMetricSpace] = None):
        out = {"stage": self.stage, "threshold": self.threshold, "annulus": list(self.annulus),
               "clusters": self.clusters, "representatives": self.representatives,
               "count": len(self.clusters)}
        if space is not None:
            out["representative_labels"] = [_jsonable(space.labels[r]) for r in self.representatives]
        return out


def _jsonable(label):
    if isinstance(label, tuple):
        return [_jsonable(v) for v in label]
    if isinstance(label, np.integer):
        return int(label)
    return label


def boundary_clusters(c: Combing, annulus: tuple, n: int, s: int) -> ClusterPartition:
    """Single-linkage clusters of the annulus ``r_lo <= d(p, x) <= r_hi`` under rho_n <= s."""
    sp = c.space
    r_lo, r_hi = int(annulus[0]), int(annulus[1])
    if not 0 <= n <= c.horizon:
        raise ValueError("stage out of range")
    rad = sp.radial()
    pts = np.flatnonzero((rad >= r_lo) & (rad <= r_hi))
    if len(pts) == 0:
        raise ValueError("annulus is empty")
    prefixes = c.table[pts, : n + 1]
    rays, ray_of = np.unique(prefixes, axis=0, return_inverse=True)
    ray_of = ray_of.reshape(-1)
    rho = _ray_matrix(c, rays, n)
    k = len(rays)
    uf = UnionFind(k)
    ii, jj = np.nonzero(np.triu(rho <= s, 1))
    for a, b in zip(ii.tolist(), jj.tolist()):
        uf.union(a, b)
    roots = np.array([uf.find(a) for a in range(k)])
    members: dict[int, list] = {}
    for x, r in zip(pts.tolist(), ray_of.tolist()):
        members.setdefault(int(roots[r]), []).append(x)
    clusters = []
    for root, xs in members.items():
        xs.sort(key=lambda v: label_key(sp.labels[v]))
        clusters.append(xs)
    clusters.sort(key=lambda xs: label_key(sp.labels[xs[0]]))
    reps = [xs[0] for xs in clusters]
    # cluster-to-cluster minimum rho
    root_list = sorted(members, key=lambda r: label_key(sp.labels[members[r][0]]))
    pos = {r: i for i, r in enumerate(root_list)}
    cid = np.array([pos[int(r)] for r in roots])
    m = len(clusters)
    cross = np.full((m, m), np.iinfo(np.int64).max, dtype=np.int64)
    for a in range(m):
        sel_a = cid == a
        for b in range(a, m):
            v = int(rho[np.ix_(sel_a, cid == b)].min())
            cross[a, b] = cross[b, a] = v
    np.fill_diagonal(cross, 0)
    rep_ray = np.array([ray_of[np.searchsorted(pts, r)] for r in reps], dtype=np.int64)
    rep_rho = rho[np.ix_(rep_ray, rep_ray)]
    return ClusterPartition(n, int(s), (r_lo, r_hi), clusters, reps, cross, rep_rho)


@dataclass
class NerveGraph:
    nodes: list  # representative point of each cluster
    edges: list  # (i, j, weight) with i < j
    threshold: int

    def to_dict(self, space: Optional[FiniteMetricSpace] = None):
        out = {"nodes": self.nodes, "edges": [list(e) for e in self.edges], "threshold": self.threshold}
        if space is not None:
            out["node_labels"] = [_jsonable(space.labels[v]) for v in self.nodes]
        return out

    def to_dot(self, space: Optional[FiniteMetricSpace] = None) -> str:
        lines = ["graph nerve {"]
        for i, v in enumerate(self.nodes):
            label = str(space.labels[v]) if space is not None else str(v)
            lines.append(f'  n{i} [label="{label}"];')
        for i, j, w in self.edges:
            lines.append(f'  n{i} -- n{j} [weight={w}, label="{w}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"

    def degrees(self) -> list[int]:
        deg = [0] * len(self.nodes)
        for i, j, _ in self.edges:
            deg[i] += 1
            deg[j] += 1
        return deg

    def is_cycle(self) -> bool:
        """True for a single cycle on at least three nodes."""
        k = len(self.nodes)
        if k < 3 or len(self.edges) != k or any(d != 2 for d in self.degrees()):
            return False
        uf = UnionFind(k)
        for i, j, _ in self.edges:
            uf.union(i, j)
        return len({uf.find(i) for i in range(k)}) == 1


def cluster_nerve(p: ClusterPartition, edge_threshold: int) -> NerveGraph:
    """Join two clusters when their representatives' rays stay within
    ``edge_threshold`` up to stage n; the weight is the cross-pair minimum."""
    if edge_threshold < p.threshold:
        raise ValueError("edge threshold must be at least the clustering threshold")
    m = len(p.clusters)
    edges = [(a, b, int(p.cross[a, b])) for a in range(m) for b in range(a + 1, m)
             if p.rep_rho[a, b] <= edge_threshold]
    return NerveGraph(list(p.representatives), edges, int(edge_threshold))


def nerve_complex(g: NerveGraph, dim_cap: int = 2):
    return clique_complex(range(len(g.nodes)), [(i, j) for i, j, _ in g.edges], dim_cap)


def nerve_cohomology(g: NerveGraph, ring: Ring = ZZ) -> CohomologyResult:
    """Cohomology in degrees 0 and 1 of the clique complex (cap 2) of the nerve."""
    return cohomology(nerve_complex(g, 2), ring, [0, 1])


def corona_compare(p: ClusterPartition, space: FiniteMetricSpace, reference: FiniteMetricSpace,
                   label_map: Union[Mapping, Callable]) -> dict:
    """Compare clusters against a reference model of the corona.

    ``label_map`` sends a representative's label to a reference label.
    Reported: counts, how many clusters land on an already-hit reference
    point, which reference points are missed, and the Hausdorff distance
    between the image of the representatives and the reference.
    """
    fn = label_map if callable(label_map) else (lambda lab: label_map[lab])
    images = []
    for r in p.representatives:
        lab = space.labels[r]
        try:
            target = fn(lab)
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"cannot map label {lab!r} into the reference") from exc
        if not reference.has_label(target):
            raise ValueError(f"label {lab!r} maps to {target!r}, which is not a reference point")
        images.append(reference.index(target))
    hit = sorted(set(images))
    collisions = len(images) - len(hit)
    missed = [i for i in range(reference.n) if i not in set(hit)]
    D = reference.dense_matrix()
    if images:
        to_ref = int(D[np.array(images)].min(axis=0).max())
        to_img = int(D[:, np.array(images)].min(axis=1).max())
        hausdorff = max(to_ref, to_img)
    else:
        hausdorff = None
    return {
        "clusters": len(p.clusters),
        "reference_points": reference.n,
        "count_difference": len(p.clusters) - reference.n,
        "collisions": collisions,
        "missed": [_jsonable(reference.labels[i]) for i in missed],
        "hausdorff": hausdorff,
        "scale": reference.scale,
        "exact_match": collisions == 0 and not missed and len(p.clusters) == reference.n,
        "stage": p.stage,
        "threshold": p.threshold,
    }


@dataclass
class CoronaRecipe:
    annulus: tuple
    stage: int
    threshold: int
    edge_threshold: int


def default_recipe(c: Combing, step_max: Optional[int] = None) -> CoronaRecipe:
    """Annulus = top 10% of the truncation radius, stage = 40% of it (in
    stages), s = 2 x step constant, s' = 2 s."""
    sp = c.space
    T = sp.truncation_radius
    if step_max is None:
        from .audits import audit_controlled

        step_max = audit_controlled(c, collar=0).constants["step_max"]
    lo = T - T // 10
    stage = min(c.horizon, (4 * T) // (10 * c.stage_length))
    s = 2 * int(step_max)
    return CoronaRecipe((lo, T), stage, s, 2 * s)
