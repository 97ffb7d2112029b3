"""Pure-Python/numpy implementations of the metric kernels.

Used when the Cython extension is not built, and as the reference side of
``benchmarks/bench_kernels.py``.
"""
from collections import deque

import numpy as np
import scipy.sparse as sps


def bfs_bounded(indptr, indices, sources, max_hops=-1):
    n = len(indptr) - 1
    dist = np.full(n, -1, dtype=np.int32)
    queue = deque()
    for s in np.asarray(sources, dtype=np.int64).tolist():
        if dist[s] < 0:
            dist[s] = 0
            queue.append(s)
    indptr = np.asarray(indptr)
    indices = np.asarray(indices)
    while queue:
        node = queue.popleft()
        dn = int(dist[node])
        if 0 <= max_hops <= dn:
            continue
        for nbr in indices[indptr[node]:indptr[node + 1]].tolist():
            if dist[nbr] < 0:
                dist[nbr] = dn + 1
                queue.append(nbr)
    return dist


def _adjacency(indptr, indices):
    n = len(indptr) - 1
    data = np.ones(len(indices), dtype=np.int8)
    return sps.csr_matrix((data, np.asarray(indices), np.asarray(indptr)), shape=(n, n))


def bfs_rows(indptr, indices, sources, chunk=256):
    n = len(indptr) - 1
    sources = np.asarray(sources, dtype=np.int64)
    out = np.full((len(sources), n), -1, dtype=np.int32)
    if len(sources) == 0:
        return out
    adj = _adjacency(indptr, indices).astype(bool)
    for start in range(0, len(sources), chunk):
        block = sources[start:start + chunk]
        rows = np.arange(len(block))
        frontier = sps.csr_matrix(
            (np.ones(len(block), dtype=bool), (rows, block)), shape=(len(block), n)
        )
        visited = frontier.toarray()
        out[start + rows, block] = 0
        level = 0
        while frontier.nnz:
            level += 1
            reached = (frontier @ adj).toarray() & ~visited
            if not reached.any():
                break
            visited |= reached
            out[start:start + len(block)][reached] = level
            frontier = sps.csr_matrix(reached)
    return out


def pair_hops(indptr, indices, us, vs):
    indptr = np.asarray(indptr)
    indices = np.asarray(indices)
    us = np.asarray(us, dtype=np.int64).tolist()
    vs = np.asarray(vs, dtype=np.int64).tolist()
    out = np.empty(len(us), dtype=np.int32)
    for i, (u, v) in enumerate(zip(us, vs)):
        if u == v:
            out[i] = 0
            continue
        du, dv = {u: 0}, {v: 0}
        fu, fv = [u], [v]
        best = -1
        while fu and fv and best < 0:
            if len(fu) <= len(fv):
                this, other, frontier = du, dv, fu
            else:
                this, other, frontier = dv, du, fv
            nxt = []
            for node in frontier:
                dn = this[node]
                for nbr in indices[indptr[node]:indptr[node + 1]].tolist():
                    if nbr in other:
                        cand = dn + 1 + other[nbr]
                        if best < 0 or cand < best:
                            best = cand
                    if nbr not in this:
                        this[nbr] = dn + 1
                        nxt.append(nbr)
            if frontier is fu:
                fu = nxt
            else:
                fv = nxt
        out[i] = best
    return out


def floyd_warshall(dist, inf):
    d = dist
    n = d.shape[0]
    for k in range(n):
        col = d[:, k:k + 1]
        row = d[k:k + 1, :]
        cand = np.where((col >= inf) | (row >= inf), inf, col + row)
        np.minimum(d, cand, out=d)
    return d


def ball_pairs(indptr, indices, sources, max_hops):
    indptr = np.asarray(indptr)
    indices = np.asarray(indices)
    out_s, out_v, out_h = [], [], []
    for s, src in enumerate(np.asarray(sources, dtype=np.int64).tolist()):
        hops = {src: 0}
        queue = deque([src])
        while queue:
            node = queue.popleft()
            dn = hops[node]
            out_s.append(s)
            out_v.append(node)
            out_h.append(dn)
            if dn >= max_hops:
                continue
            for nbr in indices[indptr[node]:indptr[node + 1]].tolist():
                if nbr not in hops:
                    hops[nbr] = dn + 1
                    queue.append(nbr)
    return (np.array(out_s, dtype=np.int64), np.array(out_v, dtype=np.int32),
            np.array(out_h, dtype=np.int32))
