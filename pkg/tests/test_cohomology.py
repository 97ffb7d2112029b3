import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from coarse_lab.cohomology import (coarse_cohomology_report, coboundary, cohomology, collar_subcomplex,
                                   restriction_map, uniform_triviality_probe)
from coarse_lab.config import build_space
from coarse_lab.groups import FreeAbelian, FreeGroup, cycle_graph
from coarse_lab.metric import build_cayley_graph, interval_space
from coarse_lab.rips import SimplicialComplex, full_simplex, full_subcomplex, inclusion, open_star, rips_complex
from coarse_lab.snf import GF, QQ, ZZ


def closure(tops, dim_cap):
    levels = [set() for _ in range(dim_cap + 1)]
    for t in tops:
        for k in range(1, len(t) + 1):
            for f in itertools.combinations(sorted(t), k):
                levels[k - 1].add(f)
    return SimplicialComplex([sorted(lv) for lv in levels], dim_cap)


RP2 = closure([(0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 5), (0, 1, 5), (1, 2, 4), (2, 3, 5), (1, 3, 4),
               (1, 3, 5), (2, 4, 5)], 3)
CYCLE8 = build_cayley_graph(cycle_graph(8), 4)


def corpus():
    yield full_simplex(5)
    yield RP2
    yield rips_complex(CYCLE8, 1, 3)
    yield rips_complex(CYCLE8, 2, 3)
    yield rips_complex(build_cayley_graph(FreeAbelian(2), 3), 2, 3)
    yield rips_complex(build_cayley_graph(FreeGroup(2), 2), 2, 3)


@pytest.mark.parametrize("cx", list(corpus()), ids=lambda cx: repr(cx)[:40])
def test_coboundary_squares_to_zero(cx):
    for q in range(cx.dim_cap - 1):
        a = coboundary(cx, q).to_dense()
        b = coboundary(cx, q + 1).to_dense()
        if a.size and b.size:
            assert not (b @ a).any()
    rel = open_star(cx, cx.vertices[:2]).complement()
    for q in range(cx.dim_cap - 1):
        a = coboundary(cx, q, relative_to=rel).to_dense()
        b = coboundary(cx, q + 1, relative_to=rel).to_dense()
        if a.size and b.size:
            assert not (b @ a).any()


def test_cycle_and_simplex():
    c = cohomology(rips_complex(CYCLE8, 1, 2), ZZ, [0, 1])
    assert c.betti == {0: 1, 1: 1} and c.torsion == {}
    s = cohomology(full_simplex(5), ZZ)
    assert s.betti == {0: 1, 1: 0, 2: 0, 3: 0}


def test_projective_plane_torsion():
    z = cohomology(RP2, ZZ, [0, 1, 2])
    assert z.betti == {0: 1, 1: 0, 2: 0} and z.torsion == {2: [2]}
    assert cohomology(RP2, GF(2), [0, 1, 2]).betti == {0: 1, 1: 1, 2: 1}
    assert cohomology(RP2, QQ, [0, 1, 2]).betti == {0: 1, 1: 0, 2: 0}
    assert cohomology(RP2, GF(3), [0, 1, 2]).betti == {0: 1, 1: 0, 2: 0}


def test_relative_interval():
    sp = interval_space(4)
    cx = rips_complex(sp, 1, 2)
    rel = full_subcomplex(cx, [sp.index(4)])
    assert cohomology(cx, ZZ, [0, 1], rel).betti == {0: 0, 1: 0}
    ends = full_subcomplex(cx, [sp.index(0), sp.index(4)])
    assert cohomology(cx, ZZ, [0, 1], ends).betti == {0: 0, 1: 1}


def test_relative_needs_closed():
    cx = full_simplex(3)
    with pytest.raises(ValueError):
        cohomology(cx, ZZ, [0], open_star(cx, [0]))


def test_restriction_identity_and_scale_change():
    r1, r2 = rips_complex(CYCLE8, 1, 2), rips_complex(CYCLE8, 2, 2)
    same = restriction_map(r1, r1, None, ZZ, 1)
    assert same.verdicts == ["nonzero"]
    assert [[int(v) for v in row] for row in same.induced] == [[1]]
    up = restriction_map(r2, r1, inclusion(r1, r2), ZZ, 1)
    assert len(up.source_generators) == 1 and len(up.target_generators) == 1
    assert up.verdicts == ["nonzero"] and abs(up.induced[0][0]) == 1


def test_restriction_kills_filled_cycle():
    # the 4-cycle at scale 1 has a class; at scale 2 it is coned off
    sq = build_cayley_graph(cycle_graph(4), 2)
    r1, r2 = rips_complex(sq, 1, 2), rips_complex(sq, 2, 2)
    assert cohomology(r2, ZZ, [1]).betti[1] == 0
    assert restriction_map(r2, r1, None, ZZ, 1).source_generators == []
    res = restriction_map(r1, r1, None, ZZ, 1)
    assert res.verdicts == ["nonzero"]


def test_probe_on_integers():
    sp = build_cayley_graph(FreeAbelian(1), 8)
    base = [sp.base_point]
    assert uniform_triviality_probe(sp, 0, 1, 1, 1, 1, ZZ, base).vanishes
    survives = uniform_triviality_probe(sp, 1, 1, 1, 1, 3, ZZ, base)
    assert not survives.vanishes and survives.results[0]["generators"] == 1
    with pytest.raises(ValueError):
        uniform_triviality_probe(sp, 1, 2, 1, 1, 3)


def test_probe_vanishes_once_the_box_is_covered():
    sp = build_cayley_graph(FreeAbelian(1), 6)
    probe = uniform_triviality_probe(sp, 1, 1, 1, 1, 6, ZZ, [sp.base_point])
    assert probe.vanishes


def test_stabilisation_tree_top_degree_one():
    spec = {"kind": "cayley", "group": {"type": "free", "rank": 2}, "radius": 4}
    spaces = {T: build_space(spec, T).space for T in (3, 4)}
    rep = coarse_cohomology_report(spaces, [1, 2], [0, 1], 1, ZZ, 2)
    assert rep.signature_verdict == "Stable" and rep.top_degree == 1


def test_stabilisation_lattice_top_degree_two():
    spaces = {T: build_cayley_graph(FreeAbelian(2), T) for T in (5, 6)}
    rep = coarse_cohomology_report(spaces, [2], [0, 1, 2], 2, ZZ, 3)
    assert rep.verdict == "Stable" and rep.top_degree == 2
    for res in rep.table.values():
        assert res.betti == {0: 0, 1: 0, 2: 1}


def test_collar_is_outer_shell():
    sp = build_cayley_graph(FreeAbelian(1), 5)
    cx = rips_complex(sp, 1, 2)
    h = collar_subcomplex(cx, sp, 2)
    assert sorted(sp.labels[v][0] for v in h.members(0)) == [-5, -4, 4, 5]
    assert h.kind == "closed"


@given(st.integers(3, 9), st.sampled_from([ZZ, QQ, GF(2), GF(5)]))
def test_euler_characteristic(k, ring):
    cx = rips_complex(build_cayley_graph(cycle_graph(k), k // 2), 1, 2)
    res = cohomology(cx, ring, [0, 1])
    euler = cx.count(0) - cx.count(1) + cx.count(2)
    assert res.betti[0] - res.betti[1] == euler


def test_cycle6_examples():
    c6 = build_cayley_graph(cycle_graph(6), 3)
    r1, r2, r3 = (rips_complex(c6, R, 3) for R in (1, 2, 3))
    antipodes = full_subcomplex(r1, [0, c6.index(3)])
    assert coboundary(r1, 0, ZZ, antipodes).shape[1] == 4
    # at scale 2 every vertex sees all but its antipode: an octahedron, so H^1 dies
    assert r2.counts()[:3] == [6, 12, 8]
    assert cohomology(r2, ZZ, [0, 1, 2]).betti == {0: 1, 1: 0, 2: 1}
    assert restriction_map(r2, r1, None, ZZ, 1).source_generators == []
    assert restriction_map(r3, r1, None, ZZ, 1).source_generators == []


def test_cone_sampling_radius():
    from coarse_lab.cones import ConeSpec
    from coarse_lab.metric import uniform_space

    assert ConeSpec.with_phi(uniform_space(2), 12, 3, lambda t: t).sampling_radius == 2
    assert ConeSpec.with_phi(uniform_space(2), 12, 1, lambda t: t).to_dict()["sampling_radius"] == 1
