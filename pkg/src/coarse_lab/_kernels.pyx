# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled metric kernels: breadth-first search on CSR graphs and min-plus closure.

Signatures and return conventions match :mod:`coarse_lab._pykernels` exactly;
unreachable vertices are reported as -1 hops.
"""
import numpy as np
cimport numpy as cnp
from libc.stdint cimport int32_t, int64_t

cnp.import_array()

ctypedef int32_t i32
ctypedef int64_t i64


def bfs_bounded(const i32[::1] indptr, const i32[::1] indices, sources, Py_ssize_t max_hops=-1):
    """Multi-source BFS; hop counts up to ``max_hops`` (negative means unbounded)."""
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef cnp.ndarray[i32, ndim=1] dist_arr = np.full(n, -1, dtype=np.int32)
    cdef i32[::1] dist = dist_arr
    cdef cnp.ndarray[i32, ndim=1] queue_arr = np.empty(n, dtype=np.int32)
    cdef i32[::1] queue = queue_arr
    cdef Py_ssize_t head = 0, tail = 0, k, node, nbr
    cdef i32 dn
    cdef i64[::1] src = np.ascontiguousarray(sources, dtype=np.int64)
    for k in range(src.shape[0]):
        node = src[k]
        if dist[node] < 0:
            dist[node] = 0
            queue[tail] = <i32>node
            tail += 1
    while head < tail:
        node = queue[head]
        head += 1
        dn = dist[node]
        if max_hops >= 0 and dn >= max_hops:
            continue
        for k in range(indptr[node], indptr[node + 1]):
            nbr = indices[k]
            if dist[nbr] < 0:
                dist[nbr] = dn + 1
                queue[tail] = <i32>nbr
                tail += 1
    return dist_arr


def bfs_rows(const i32[::1] indptr, const i32[::1] indices, sources):
    """Full BFS rows for each source, shape (len(sources), n)."""
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef i64[::1] src = np.ascontiguousarray(sources, dtype=np.int64)
    cdef Py_ssize_t m = src.shape[0]
    cdef cnp.ndarray[i32, ndim=2] out_arr = np.full((m, n), -1, dtype=np.int32)
    cdef i32[:, ::1] out = out_arr
    cdef cnp.ndarray[i32, ndim=1] queue_arr = np.empty(max(n, 1), dtype=np.int32)
    cdef i32[::1] queue = queue_arr
    cdef Py_ssize_t s, head, tail, k, node, nbr
    cdef i32 dn
    for s in range(m):
        node = src[s]
        out[s, node] = 0
        queue[0] = <i32>node
        head = 0
        tail = 1
        while head < tail:
            node = queue[head]
            head += 1
            dn = out[s, node]
            for k in range(indptr[node], indptr[node + 1]):
                nbr = indices[k]
                if out[s, nbr] < 0:
                    out[s, nbr] = dn + 1
                    queue[tail] = <i32>nbr
                    tail += 1
    return out_arr


def pair_hops(const i32[::1] indptr, const i32[::1] indices, us, vs):
    """Hop distance for each pair (us[i], vs[i]) by level-synchronous bidirectional BFS."""
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef i64[::1] a = np.ascontiguousarray(us, dtype=np.int64)
    cdef i64[::1] b = np.ascontiguousarray(vs, dtype=np.int64)
    cdef Py_ssize_t m = a.shape[0]
    cdef cnp.ndarray[i32, ndim=1] out_arr = np.empty(m, dtype=np.int32)
    cdef i32[::1] out = out_arr
    cdef i64[::1] stamp_u = np.zeros(max(n, 1), dtype=np.int64)
    cdef i64[::1] stamp_v = np.zeros(max(n, 1), dtype=np.int64)
    cdef i32[::1] du = np.zeros(max(n, 1), dtype=np.int32)
    cdef i32[::1] dv = np.zeros(max(n, 1), dtype=np.int32)
    cdef i32[::1] qu = np.empty(max(n, 1), dtype=np.int32)
    cdef i32[::1] qv = np.empty(max(n, 1), dtype=np.int32)
    cdef Py_ssize_t i, k, node, nbr, hu, tu, hv, tv, level_end
    cdef i64 stamp = 0
    cdef i32 best, cand
    cdef bint expand_u
    for i in range(m):
        if a[i] == b[i]:
            out[i] = 0
            continue
        stamp += 1
        stamp_u[a[i]] = stamp
        du[a[i]] = 0
        qu[0] = <i32>a[i]
        hu = 0
        tu = 1
        stamp_v[b[i]] = stamp
        dv[b[i]] = 0
        qv[0] = <i32>b[i]
        hv = 0
        tv = 1
        best = -1
        while hu < tu and hv < tv:
            expand_u = (tu - hu) <= (tv - hv)
            if expand_u:
                level_end = tu
                while hu < level_end:
                    node = qu[hu]
                    hu += 1
                    for k in range(indptr[node], indptr[node + 1]):
                        nbr = indices[k]
                        if stamp_v[nbr] == stamp:
                            cand = du[node] + 1 + dv[nbr]
                            if best < 0 or cand < best:
                                best = cand
                        if stamp_u[nbr] != stamp:
                            stamp_u[nbr] = stamp
                            du[nbr] = du[node] + 1
                            qu[tu] = <i32>nbr
                            tu += 1
            else:
                level_end = tv
                while hv < level_end:
                    node = qv[hv]
                    hv += 1
                    for k in range(indptr[node], indptr[node + 1]):
                        nbr = indices[k]
                        if stamp_u[nbr] == stamp:
                            cand = dv[node] + 1 + du[nbr]
                            if best < 0 or cand < best:
                                best = cand
                        if stamp_v[nbr] != stamp:
                            stamp_v[nbr] = stamp
                            dv[nbr] = dv[node] + 1
                            qv[tv] = <i32>nbr
                            tv += 1
            if best >= 0:
                break
        out[i] = best
    return out_arr


def floyd_warshall(cnp.ndarray[i64, ndim=2] dist, i64 inf):
    """In-place min-plus closure; entries >= ``inf`` are treated as missing edges."""
    cdef i64[:, ::1] d = dist
    cdef Py_ssize_t n = d.shape[0], i, j, k
    cdef i64 dik, cand
    for k in range(n):
        for i in range(n):
            dik = d[i, k]
            if dik >= inf:
                continue
            for j in range(n):
                if d[k, j] >= inf:
                    continue
                cand = dik + d[k, j]
                if cand < d[i, j]:
                    d[i, j] = cand
    return dist


def ball_pairs(const i32[::1] indptr, const i32[::1] indices, sources, Py_ssize_t max_hops):
    """Every (source position, vertex, hops) with hops <= ``max_hops``.

    Sources in the given order, vertices in BFS order from each source.
    """
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef i64[::1] src = np.ascontiguousarray(sources, dtype=np.int64)
    cdef Py_ssize_t m = src.shape[0]
    cdef i64[::1] stamp_of = np.zeros(max(n, 1), dtype=np.int64)
    cdef i32[::1] hop = np.zeros(max(n, 1), dtype=np.int32)
    cdef i32[::1] queue = np.empty(max(n, 1), dtype=np.int32)
    cdef Py_ssize_t cap = max(16, 4 * m)
    out_s_arr = np.empty(cap, dtype=np.int64)
    out_v_arr = np.empty(cap, dtype=np.int32)
    out_h_arr = np.empty(cap, dtype=np.int32)
    cdef i64[::1] out_s = out_s_arr
    cdef i32[::1] out_v = out_v_arr
    cdef i32[::1] out_h = out_h_arr
    cdef Py_ssize_t s, head, tail, k, node, nbr, cnt = 0
    cdef i64 stamp = 0
    for s in range(m):
        stamp += 1
        node = src[s]
        stamp_of[node] = stamp
        hop[node] = 0
        queue[0] = <i32>node
        head = 0
        tail = 1
        while head < tail:
            node = queue[head]
            head += 1
            if cnt == cap:
                cap *= 2
                out_s_arr = np.resize(out_s_arr, cap)
                out_v_arr = np.resize(out_v_arr, cap)
                out_h_arr = np.resize(out_h_arr, cap)
                out_s = out_s_arr
                out_v = out_v_arr
                out_h = out_h_arr
            out_s[cnt] = s
            out_v[cnt] = <i32>node
            out_h[cnt] = hop[node]
            cnt += 1
            if hop[node] >= max_hops:
                continue
            for k in range(indptr[node], indptr[node + 1]):
                nbr = indices[k]
                if stamp_of[nbr] != stamp:
                    stamp_of[nbr] = stamp
                    hop[nbr] = hop[node] + 1
                    queue[tail] = <i32>nbr
                    tail += 1
    return out_s_arr[:cnt].copy(), out_v_arr[:cnt].copy(), out_h_arr[:cnt].copy()
