import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from coarse_lab import kernels

from conftest import bfs_oracle, random_connected_graph

BACKENDS = kernels.backends()


def _csr(adj):
    indptr = np.zeros(len(adj) + 1, dtype=np.int32)
    indptr[1:] = np.cumsum([len(a) for a in adj])
    indices = np.array([v for a in adj for v in a], dtype=np.int32)
    return indptr, indices


def test_backend_selection():
    assert kernels.BACKEND in ("python", "cython")
    assert "python" in BACKENDS


@pytest.mark.parametrize("name", sorted(BACKENDS))
@given(seed=st.integers(0, 10_000), n=st.integers(1, 40), extra=st.integers(0, 30))
def test_bfs_rows_matches_oracle(name, seed, n, extra):
    adj = random_connected_graph(np.random.default_rng(seed), n, extra)
    indptr, indices = _csr(adj)
    rows = BACKENDS[name].bfs_rows(indptr, indices, np.arange(n, dtype=np.int64))
    for s in range(n):
        assert np.array_equal(rows[s], bfs_oracle(adj, s))


@given(seed=st.integers(0, 10_000), n=st.integers(2, 40), extra=st.integers(0, 30), hops=st.integers(0, 5))
def test_backends_agree(seed, n, extra, hops):
    rng = np.random.default_rng(seed)
    adj = random_connected_graph(rng, n, extra)
    indptr, indices = _csr(adj)
    src = rng.integers(0, n, 4).astype(np.int64)
    us = rng.integers(0, n, 20).astype(np.int64)
    vs = rng.integers(0, n, 20).astype(np.int64)
    outs = {}
    for name, mod in BACKENDS.items():
        outs[name] = (mod.bfs_bounded(indptr, indices, src, hops),
                      mod.pair_hops(indptr, indices, us, vs),
                      mod.ball_pairs(indptr, indices, src, hops))
    ref = outs.pop("python")
    for other in outs.values():
        assert np.array_equal(ref[0], other[0])
        assert np.array_equal(ref[1], other[1])
        for a, b in zip(ref[2], other[2]):
            assert np.array_equal(a, b)
    full = np.array([bfs_oracle(adj, int(s)) for s in src])
    nearest = full.min(axis=0)
    expect = np.where(nearest <= hops, nearest, -1)
    assert np.array_equal(ref[0], expect)
    assert ref[1].tolist() == [int(bfs_oracle(adj, int(u))[int(v)]) for u, v in zip(us, vs)]


@pytest.mark.parametrize("name", sorted(BACKENDS))
@given(seed=st.integers(0, 10_000), n=st.integers(1, 25))
def test_floyd_warshall_matches_scipy(name, seed, n):
    rng = np.random.default_rng(seed)
    w = rng.integers(1, 30, (n, n)).astype(np.int64)
    w = np.minimum(w, w.T)
    np.fill_diagonal(w, 0)
    got = BACKENDS[name].floyd_warshall(w.copy(), kernels.INF)
    ref = shortest_path(csr_matrix(w), method="FW", directed=False)
    assert np.array_equal(got, ref.astype(np.int64))


def test_ball_pairs_order_and_content():
    adj = [[1], [0, 2], [1, 3], [2]]
    indptr, indices = _csr(adj)
    for mod in BACKENDS.values():
        pos, vert, hops = mod.ball_pairs(indptr, indices, np.array([0, 3], dtype=np.int64), 1)
        assert sorted(zip(pos.tolist(), vert.tolist(), hops.tolist())) == [(0, 0, 0), (0, 1, 1), (1, 2, 1), (1, 3, 0)]
