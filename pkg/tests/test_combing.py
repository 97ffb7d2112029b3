import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from coarse_lab.combing import (Combing, bresenham_combing, geodesic_combing, noncoherent_example,
                                nonproper_example, normal_form_combing, product_combing, reduced_word,
                                shortlex_normal_form, unit_graph)
from coarse_lab.errors import TruncationError
from coarse_lab.groups import FreeAbelian, FreeGroup
from coarse_lab.metric import build_cayley_graph, interval_space

from conftest import graph_space, random_connected_graph


def labels_of(c, x):
    return [c.space.labels[v] for v in c.path(x)]


def check_combing_axioms(c):
    H, p = c.table, c.base_point
    assert (H[:, 0] == p).all()
    assert (H[p] == p).all()
    for x in range(c.n_points):
        s = c.settle[x]
        assert 0 <= s <= c.horizon
        assert (H[x, s:] == x).all()


def test_tree_geodesic_combing():
    sp = build_cayley_graph(FreeGroup(2), 4)
    c = geodesic_combing(sp)
    check_combing_axioms(c)
    x = sp.index("aab")
    assert labels_of(c, x) == ["e", "a", "aa", "aab"]
    assert sp.labels[c(x, 2)] == "aa"
    assert (c.table[sp.base_point] == sp.base_point).all()


def test_lattice_geodesic_tie_break():
    sp = build_cayley_graph(FreeAbelian(2), 4)
    c = geodesic_combing(sp)
    assert labels_of(c, sp.index((2, 1))) == [(0, 0), (1, 0), (2, 0), (2, 1)]


@given(st.integers(0, 10_000), st.integers(1, 30), st.integers(0, 20))
def test_geodesic_combing_on_random_graphs(seed, n, extra):
    sp = graph_space(random_connected_graph(np.random.default_rng(seed), n, extra))
    c = geodesic_combing(sp)
    check_combing_axioms(c)
    rad = sp.radial()
    for x in range(sp.n):
        path = c.path(x)
        assert len(path) == rad[x] + 1
        assert all(sp.d(a, b) == 1 for a, b in zip(path, path[1:]))


def test_bresenham_examples():
    sp = build_cayley_graph(FreeAbelian(2), 8)
    c = bresenham_combing(sp)
    check_combing_axioms(c)
    assert labels_of(c, sp.index((3, 0))) == [(0, 0), (1, 0), (2, 0), (3, 0)]
    assert labels_of(c, sp.index((0, -2))) == [(0, 0), (0, -1), (0, -2)]
    assert sp.labels[c(sp.index((4, 2)), 3)] == (2, 1)
    assert labels_of(c, sp.index((3, 3)))[1:] == [(1, 0), (1, 1), (2, 1), (2, 2), (3, 2), (3, 3)]


def test_bresenham_paths_are_geodesic():
    sp = build_cayley_graph(FreeAbelian(2), 10)
    c = bresenham_combing(sp)
    rad = sp.radial()
    for x in range(sp.n):
        assert c.settle[x] == rad[x]


def test_bresenham_needs_lattice_labels():
    with pytest.raises(ValueError):
        bresenham_combing(build_cayley_graph(FreeGroup(2), 2))


def test_bresenham_truncation_error():
    sp = build_cayley_graph(FreeAbelian(2), 4)
    keep = [i for i, (x, y) in enumerate(sp.labels) if not (x == 1 and y == 0)]
    sub = sp.dense_matrix()[np.ix_(keep, keep)]
    from coarse_lab.metric import FiniteMetricSpace

    hole = FiniteMetricSpace.from_matrix([sp.labels[i] for i in keep], sub, base_point=0, validate=False)
    with pytest.raises(TruncationError):
        bresenham_combing(hole)


def test_product_combing_examples():
    line = build_cayley_graph(FreeAbelian(1), 8)
    g = geodesic_combing(line)
    c = product_combing(g, g, radius=8)
    check_combing_axioms(c)
    sp = c.space
    x = sp.index((3, 2))
    assert sp.labels[c(x, 4)] == (3, 1)
    assert (c.table[sp.base_point] == sp.base_point).all()
    for b in (1, 2, 3):
        u, v = sp.index((4, b)), sp.index((-4, b))
        assert all(sp.d(c(u, n), c(v, n)) == 8 for n in range(4, 4 + b + 1))


def test_product_combing_truncation():
    line = build_cayley_graph(FreeAbelian(1), 4)
    g = geodesic_combing(line)
    c = product_combing(g, g, radius=4)
    assert c.space.n == 41


def test_nonproper_formula():
    c = nonproper_example(20)
    check_combing_axioms(c)
    assert c(5, 3) == 0 and c(5, 7) == 2 and c(5, 12) == 5
    for x in range(21):
        for n in range(c.horizon + 1):
            expect = 0 if n <= x else (n - x if n <= 2 * x else x)
            assert c(x, n) == expect


def test_noncoherent_formula():
    c = noncoherent_example(120)
    check_combing_axioms(c)
    assert c(12, 4) == 4 and c(12, 5) == 8 and c(8, 4) == 8
    for k in range(1, 11):
        assert c(12 * k, 4 * k) == 4 * k
        assert c(c(12 * k, 5 * k), 4 * k) == 8 * k
    for x in range(121):
        for n in range(c.horizon + 1):
            expect = n if 3 * n <= x else (4 * n - x if 2 * n <= x else x)
            assert c(x, n) == expect


def test_shortlex_normal_forms():
    sp = build_cayley_graph(FreeAbelian(2), 4)
    order = sp.group.generators()
    nf = shortlex_normal_form(sp)
    word = nf((2, 2))
    assert [order.index(t) for t in word] == [0, 0, 2, 2]
    c = normal_form_combing(sp, nf)
    assert sp.labels[c(sp.index((2, 2)), 2)] == (2, 0)


def test_reduced_words_match_geodesic_combing():
    sp = build_cayley_graph(FreeGroup(2), 6)
    assert reduced_word("e") == ""
    assert np.array_equal(normal_form_combing(sp, reduced_word).table, geodesic_combing(sp).table)


def test_identity_point_and_validation():
    sp = interval_space(3)
    table = np.array([[0, 0], [0, 1], [0, 2], [0, 3]])
    c = Combing(sp, table)
    assert c.column(10).tolist() == [0, 1, 2, 3]
    with pytest.raises(ValueError):
        Combing(sp, np.array([[1, 0], [0, 1], [0, 2], [0, 3]]))
    with pytest.raises(ValueError):
        Combing(sp, np.array([[0, 0], [0, 1], [0, 1], [0, 3]]))


def test_unit_graph_degrees():
    sp = build_cayley_graph(FreeGroup(2), 3)
    indptr, _ = unit_graph(sp)
    deg = np.diff(indptr)
    assert deg[sp.index("e")] == 4
