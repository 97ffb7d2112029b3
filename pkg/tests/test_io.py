import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from coarse_lab.combing import geodesic_combing, nonproper_example, product_combing
from coarse_lab.cones import ConeSpec, open_cone
from coarse_lab.groups import FreeAbelian, FreeGroup, cycle_graph
from coarse_lab.io import combing_from_dict, combing_to_dict, dumps, space_from_dict, space_to_dict
from coarse_lab.metric import build_cayley_graph, interval_space, product_space, uniform_space

from conftest import graph_space, random_connected_graph


def round_trip(space):
    data = json.loads(dumps(space_to_dict(space)))
    back = space_from_dict(data)
    assert back.labels == space.labels and back.base_point == space.base_point
    assert back.scale == space.scale and back.truncation_radius == space.truncation_radius
    assert np.array_equal(back.dense_matrix(), space.dense_matrix())
    assert dumps(space_to_dict(back)) == dumps(space_to_dict(space))
    return back


@pytest.mark.parametrize("space", [
    uniform_space(4, 3),
    interval_space(6),
    build_cayley_graph(FreeAbelian(2), 3),
    build_cayley_graph(FreeGroup(2), 2),
    build_cayley_graph(cycle_graph(7), 3),
    product_space(interval_space(3), build_cayley_graph(cycle_graph(4), 2)),
    open_cone(ConeSpec.with_phi(uniform_space(3), 6, 1, lambda t: t))[0],
], ids=["uniform", "interval", "z2", "f2", "c7", "product", "cone"])
def test_space_round_trip(space):
    back = round_trip(space)
    assert (back.group is None) == (space.group is None)


@given(st.integers(0, 10_000), st.integers(1, 20))
def test_random_graph_round_trip(seed, n):
    round_trip(graph_space(random_connected_graph(np.random.default_rng(seed), n, n // 2)))


@pytest.mark.parametrize("comb", [
    geodesic_combing(build_cayley_graph(FreeAbelian(2), 3)),
    nonproper_example(20),
    product_combing(geodesic_combing(interval_space(3)), geodesic_combing(interval_space(2))),
], ids=["geodesic", "nonproper", "product"])
def test_combing_round_trip(comb):
    space = round_trip(comb.space)
    back = combing_from_dict(json.loads(dumps(combing_to_dict(comb, "space.json"))), space)
    assert np.array_equal(back.table, comb.table) and np.array_equal(back.settle, comb.settle)
    assert back.stage_length == comb.stage_length


def test_combing_rejects_mismatch():
    comb = geodesic_combing(interval_space(4))
    data = combing_to_dict(comb, "space.json")
    data["settle"][1] += 1
    with pytest.raises(ValueError):
        combing_from_dict(data, comb.space)


def test_dumps_is_stable():
    assert dumps({"b": 1, "a": [np.int64(2), (3,)]}) == '{\n "a": [\n  2,\n  [\n   3\n  ]\n ],\n "b": 1\n}\n'
