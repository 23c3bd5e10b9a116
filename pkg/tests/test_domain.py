import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import small_product, toy_instance
from freshroute.domain import (
    AdaptiveParams,
    MomentInfo,
    Network,
    Route,
    Scenario,
    UncertaintyBounds,
    check_instance,
    dumps_instance,
    instance_from_dict,
    instance_to_dict,
    loads_instance,
    load_instance,
    mtz_violations,
    route_total_time,
    route_violations,
    save_instance,
    validate_instance,
)
from freshroute.errors import DomainError
from freshroute.scenarios import degenerate_uncertainty, experiment_instance


def test_two_node_tour_time():
    net = Network([[0, 1], [1, 0]], [0, 0])
    assert route_total_time(Route.from_order([0, 1, 0], net.arc_cost()), net) == 2.0


def test_warehouse_delay_is_charged():
    net = Network(np.ones((3, 3)) - np.eye(3), [0.5, 0.5, 0.5])
    # three arcs of 1 h plus the delay at each departing node
    assert route_total_time(Route.from_order([0, 1, 2, 0], net.arc_cost()), net) == 4.5


def test_ten_stop_tour_matches_independent_sum(seeded_instance):
    net = seeded_instance.network
    order = [0, 3, 1, 4, 5, 9, 2, 6, 8, 7, 10, 0]
    route = Route.from_order(order, net.arc_cost())
    expected = sum(float(net.travel_time[i][j]) + float(net.delay[i]) for i, j in zip(order, order[1:]))
    assert route_total_time(route, net) == pytest.approx(expected, rel=1e-12)


def test_route_size_mismatch():
    net = Network(np.zeros((3, 3)), np.zeros(3))
    with pytest.raises(DomainError):
        route_total_time(Route.from_order([0, 1, 0], np.zeros((3, 3))), net)


def test_route_structure_checks():
    good = Route.from_order([0, 2, 1, 0], np.ones((3, 3)))
    assert route_violations(good, 3) == []
    assert route_violations(Route.from_order([1, 2, 0], np.ones((3, 3))), 3)
    assert route_violations(Route.from_order([0, 1, 1, 0], np.ones((3, 3))), 3)


@settings(max_examples=50, deadline=None)
@given(st.permutations(list(range(1, 7))))
def test_every_tour_satisfies_mtz(perm):
    route = Route.from_order([0, *perm, 0], np.ones((7, 7)))
    assert mtz_violations(route, 7) == []
    assert sorted(route.sequencing.values()) == list(range(1, 7))


def test_valid_instance_has_empty_report():
    inst = toy_instance(np.ones((3, 3)) - np.eye(3))
    assert validate_instance(inst) == []
    assert check_instance(inst) is inst


def test_window_violation_is_reported():
    bad = small_product()
    from dataclasses import replace

    bad = replace(bad, required_shelf_life=bad.initial_shelf_life)
    report = validate_instance(toy_instance(np.ones((3, 3)) - np.eye(3), products=[bad]))
    assert any("L_k - R_k > 0" in v.message for v in report)
    with pytest.raises(DomainError):
        check_instance(toy_instance(np.ones((3, 3)) - np.eye(3), products=[bad]))


def test_bounds_above_nominal_name_the_arc():
    t = np.ones((3, 3)) - np.eye(3)
    tmin = t.copy()
    tmin[1, 2] = 5.0
    bounds = UncertaintyBounds(tmin, t + 1, np.zeros(3), np.zeros(3))
    report = validate_instance(toy_instance(t, bounds=bounds))
    assert [v.path for v in report] == ["bounds.travel_time_min[1][2]"]


def test_probabilities_must_sum_to_one():
    t = np.ones((3, 3)) - np.eye(3)
    s = [Scenario(i, 0.4, np.zeros(3), np.zeros((3, 1))) for i in range(2)]
    assert any(v.path == "scenarios" for v in validate_instance(toy_instance(t, scenarios=s)))


def test_big_m_must_dominate_band():
    t = np.ones((3, 3)) - np.eye(3)
    report = validate_instance(toy_instance(t, adaptive_params=AdaptiveParams(big_m=5.0)))
    assert any(v.path == "adaptive_params.big_m" for v in report)


def test_structural_violations():
    t = np.ones((3, 3))
    report = validate_instance(toy_instance(t, delay=[0, -1, 0]))
    paths = {v.path for v in report}
    assert "network.travel_time[1][1]" in paths
    assert "network.delay[1]" in paths


def test_arrays_are_read_only():
    net = Network(np.zeros((2, 2)), np.zeros(2))
    with pytest.raises(ValueError):
        net.travel_time[0, 1] = 3.0


def test_json_round_trip_is_byte_identical(tmp_path):
    inst = experiment_instance(seed=3)
    text = dumps_instance(inst)
    again = dumps_instance(loads_instance(text))
    assert text == again
    path = tmp_path / "inst.json"
    save_instance(inst, path)
    assert dumps_instance(load_instance(path)) == text


def test_json_round_trip_minimal_and_degenerate():
    inst = toy_instance(np.ones((3, 3)) - np.eye(3))
    assert dumps_instance(loads_instance(dumps_instance(inst))) == dumps_instance(inst)
    deg = degenerate_uncertainty(inst)
    assert dumps_instance(loads_instance(dumps_instance(deg))) == dumps_instance(deg)


def test_json_keeps_empty_product_axis():
    t = np.ones((2, 2)) - np.eye(2)
    inst = toy_instance(t, scenarios=[Scenario.nominal(2, 1)])
    d = instance_to_dict(inst)
    d["products"] = []
    d["scenarios"][0]["ambient_shift"] = []
    back = instance_from_dict(json.loads(json.dumps(d)))
    assert back.scenarios[0].ambient_shift.shape == (2, 0)


def test_json_rejects_unknown_schema():
    d = instance_to_dict(toy_instance(np.ones((2, 2)) - np.eye(2)))
    d["schema_version"] = 99
    with pytest.raises(DomainError):
        instance_from_dict(d)


def test_moment_nominal_block():
    net = Network(np.ones((2, 2)) - np.eye(2), [0.1, 0.2])
    m = MomentInfo.nominal(net)
    assert m.risk_aversion == 0.0 and not m.travel_variance.any()
