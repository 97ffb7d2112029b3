import numpy as np
import pytest

from coarse_lab.audits import SUPPORTED, audit_coherent, audit_expanding
from coarse_lab.cones import APEX, ConeSpec, WarpSpec, cone_bound, open_cone, rotation_action, warped_cone
from coarse_lab.combing import geodesic_combing
from coarse_lab.errors import BudgetError, budgets
from coarse_lab.groups import cycle_graph
from coarse_lab.metric import build_cayley_graph, check_metric_axioms, interval_space, uniform_space


def cone(base, T, phi):
    return ConeSpec.with_phi(base, T, 1, phi)


@pytest.fixture(scope="module")
def three_points():
    return uniform_space(3)


def test_cone_over_point_is_a_ray():
    space, comb = open_cone(cone(uniform_space(1), 10, lambda t: t))
    ray = interval_space(10)
    assert np.array_equal(space.dense_matrix(), ray.dense_matrix())
    assert np.array_equal(comb.table, geodesic_combing(ray).table[:, : comb.table.shape[1]])


def test_identity_cone_separates_top_slice(three_points):
    spec = cone(three_points, 30, lambda t: t)
    space, _ = open_cone(spec)
    a, b = space.index((0, 30)), space.index((1, 30))
    assert space.d(a, b) >= 30
    check_metric_axioms(space)
    assert (space.dense_matrix() <= cone_bound(spec)).all()


def test_constant_cone_top_slice(three_points):
    space, _ = open_cone(cone(three_points, 30, lambda t: 1))
    assert space.d(space.index((0, 30)), space.index((1, 30))) == 1


def test_labels_and_apex(three_points):
    space, comb = open_cone(cone(three_points, 5, lambda t: t))
    assert space.labels[0] == APEX and space.base_point == 0
    assert space.n == 1 + 3 * 5
    assert [space.labels[v] for v in comb.path(space.index((2, 3)))] == [APEX, (2, 1), (2, 2), (2, 3)]


def test_phi_validation(three_points):
    with pytest.raises(ValueError):
        ConeSpec(three_points, (2, 1, 3), 3, 1)
    with pytest.raises(ValueError):
        ConeSpec(three_points, (0, 1, 3), 3, 1)
    with pytest.raises(ValueError):
        ConeSpec(three_points, (1, 2), 3, 1)


def test_warped_cone_below_open_cone():
    base = build_cayley_graph(cycle_graph(6), 3)
    spec = cone(base, 10, lambda t: t)
    open_space, _ = open_cone(spec)
    warped, _ = warped_cone(WarpSpec(spec, rotation_action(6, [1])))
    assert (warped.dense_matrix() <= open_space.dense_matrix()).all()
    check_metric_axioms(warped)
    trivial, _ = warped_cone(WarpSpec(spec, (tuple(range(6)),)))
    assert np.array_equal(trivial.dense_matrix(), open_space.dense_matrix())


def test_rotation_warp_hops():
    k = 6
    base = build_cayley_graph(cycle_graph(k), k // 2)
    spec = cone(base, 8, lambda t: t)
    warped, _ = warped_cone(WarpSpec(spec, rotation_action(k, [1])))
    for h in (4, 8):
        for a in range(k):
            for b in range(k):
                assert warped.d(warped.index((a, h)), warped.index((b, h))) <= k // 2


def test_slice_diameters_grow_linearly():
    base = build_cayley_graph(cycle_graph(6), 3)
    space, _ = warped_cone(WarpSpec(cone(base, 12, lambda t: t), (tuple(range(6)),)))
    diam = []
    for h in (2, 4, 6, 8):
        pts = [space.index((b, h)) for b in range(6)]
        diam.append(int(space.submatrix(pts).max()))
    steps = np.diff(diam)
    assert (steps > 0).all() and len(set(steps.tolist())) == 1


def test_cone_combing_coherent(three_points):
    for phi in (lambda t: t, lambda t: 1):
        _, comb = open_cone(cone(three_points, 20, phi))
        rep = audit_coherent(comb)
        assert rep.verdict == SUPPORTED and set(rep.constants["coh"]) == {0}


def test_bounded_phi_tails_bounded(three_points):
    c_val = 2
    space, comb = open_cone(cone(three_points, 24, lambda t: c_val))
    rep = audit_expanding(comb, [1, 2, 3], range(8))
    diam = int(three_points.dense_matrix().max())
    assert rep.constants["tail_max"] <= c_val * diam + 2


def test_unbounded_phi_tails_shrink(three_points):
    space, comb = open_cone(cone(three_points, 24, lambda t: t))
    rep = audit_expanding(comb, [1, 2, 3], range(1, 8))
    for (r, n), f in rep.table.f.items():
        assert f[-1] <= f[0]


def test_cone_matrix_budget(three_points):
    with budgets(matrix_cells=100):
        with pytest.raises(BudgetError) as info:
            open_cone(cone(three_points, 30, lambda t: t))
    assert "matrix cells" in str(info.value)
