import csv
import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from freshroute.analysis import (
    ScenarioOutcome,
    comparison_csv,
    compare_models,
    dominates,
    fmt,
    paired_trend_holds,
    pareto_csv,
    pareto_frontier,
    run_scenario_comparison,
    shelf_life_comparison,
    shelf_life_pair,
    sweep_beta,
    sweep_csv,
    sweep_tau,
)
from freshroute.domain import Scenario
from freshroute.errors import DomainError
from freshroute.models import ModelKind
from freshroute.scenarios import (
    ScenarioGenConfig,
    default_catalog,
    degenerate_uncertainty,
    generate_scenarios,
    experiment_instance,
)
from freshroute.solver import SolveStatus

APPLE = default_catalog()[0]


def outcome(i, trip, dev):
    return ScenarioOutcome(i, float(trip), float(dev), 0.0, ())


def pairwise_front(outcomes):
    """O(n^2) domination oracle; duplicates keep the earliest index."""
    keep = []
    for i, a in enumerate(outcomes):
        if any(dominates(b, a) for b in outcomes):
            continue
        if any((b.trip_hours, b.freshness_deviation) == (a.trip_hours, a.freshness_deviation)
               for b in outcomes[:i]):
            continue
        keep.append(a)
    return sorted(keep, key=lambda o: o.trip_hours)


# ------------------------------------------------------------------ pareto


def test_single_outcome():
    o = outcome(0, 1, 1)
    assert pareto_frontier([o]) == [o]


def test_hand_example():
    pts = [outcome(0, 10, 5), outcome(1, 11, 4), outcome(2, 12, 6)]
    assert [o.scenario_id for o in pareto_frontier(pts)] == [0, 1]


def test_empty_is_rejected():
    with pytest.raises(DomainError):
        pareto_frontier([])


def test_fifty_random_outcomes():
    rng = np.random.default_rng(0)
    pts = [outcome(i, *rng.uniform(0, 10, 2)) for i in range(50)]
    assert pareto_frontier(pts) == pairwise_front(pts)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 8), st.integers(0, 8)), min_size=1, max_size=40))
def test_frontier_matches_oracle_with_ties(points):
    pts = [outcome(i, t, d) for i, (t, d) in enumerate(points)]
    front = pareto_frontier(pts)
    assert front == pairwise_front(pts)
    devs = [o.freshness_deviation for o in front]
    assert all(b < a for a, b in zip(devs, devs[1:]))
    trips = [o.trip_hours for o in front]
    assert all(b > a for a, b in zip(trips, trips[1:]))


# -------------------------------------------------------------- comparison


def test_degenerate_comparison_collapses():
    inst = degenerate_uncertainty(experiment_instance(seed=1))
    rows = compare_models(inst)
    static = [r.total_hours for r in rows[:4]]
    assert max(static) - min(static) <= 1e-6
    assert rows[4].model is ModelKind.ADAPTIVE
    assert rows[4].total_hours >= rows[0].total_hours - 1e-9


def test_seeded_ordering_and_csv():
    inst = experiment_instance(seed=4)
    rows = compare_models(inst)
    det, rob, sto, dro = (r.total_hours for r in rows[:4])
    assert det <= rob
    text = comparison_csv(rows)
    parsed = list(csv.DictReader(io.StringIO(text)))
    assert [r["model"] for r in parsed] == ["deterministic", "robust", "stochastic", "dro", "adaptive"]
    assert parsed[0]["total_hours"] == f"{det:.6g}"


def test_missing_blocks_reported_in_rows():
    inst = experiment_instance(seed=4)
    from dataclasses import replace

    rows = compare_models(replace(inst, bounds=None, moments=None))
    by = {r.model: r for r in rows}
    assert by[ModelKind.ROBUST].status is SolveStatus.INFEASIBLE and by[ModelKind.ROBUST].error
    assert by[ModelKind.DRO].error
    assert by[ModelKind.DETERMINISTIC].status is SolveStatus.OPTIMAL


def test_zero_ambient_means_no_reduction_figure():
    inst = experiment_instance(seed=2)
    quiet = generate_scenarios(ScenarioGenConfig(ambient_std=0.0, scenario_count=5), inst)
    comp = run_scenario_comparison(inst, quiet)
    assert comp.mean_deterministic_deviation == 0.0 and comp.mean_adaptive_deviation == 0.0
    assert comp.deviation_reduction_pct is None


def test_comparison_summary_is_sane():
    inst = experiment_instance(seed=2)
    comp = run_scenario_comparison(inst, inst.scenarios)
    s = comp.summary()
    assert s["scenarios"] == 50
    assert 0 < s["deviation_reduction_pct"] < 100
    assert s["share_adaptive_slower"] >= 0.95


# -------------------------------------------------------------- shelf life


def test_injected_transit_temperatures():
    pair = shelf_life_pair(APPLE, 6.23, 8.68)
    assert pair.adaptive[1] == pytest.approx(27.54, abs=0.01)
    assert pair.deterministic[1] == pytest.approx(23.25, abs=0.01)
    # 1.1845 is 27.54 / 23.25, a ratio of truncated day values; the closed form is 2 ** 0.245
    assert pair.ratio == pytest.approx(1.1845, abs=1e-3)
    assert pair.ratio == pytest.approx(2 ** 0.245, rel=1e-12)
    assert pair.ratio > 1.18


def test_both_at_ideal():
    pair = shelf_life_pair(APPLE, 5.0, 5.0)
    assert pair.adaptive[1] == pair.deterministic[1] == 30.0


def test_shelf_life_comparison_on_instance():
    inst = experiment_instance(seed=2, synthetic=None)
    from dataclasses import replace

    inst = replace(inst, products=default_catalog())
    res = shelf_life_comparison(inst, inst.scenarios[0], APPLE)
    assert res.adaptive[1] > 0 and res.deterministic[1] > 0
    with pytest.raises(DomainError):
        shelf_life_comparison(inst, inst.scenarios[0], APPLE.__class__(99, "x", 0, 0, 1, 2, 1))


# ------------------------------------------------------------------ sweeps


@pytest.fixture(scope="module")
def sweep_instance():
    return experiment_instance(seed=0)


def test_beta_sweep_shape_and_trend(sweep_instance):
    res = sweep_beta(sweep_instance, [0.0, 0.2, 0.4], 60, seed=3)
    assert res.deviations.shape == (3, 60)
    assert res.mean_deviation[0] > res.mean_deviation[2]
    assert res.mean_final_shelf_life[0] < res.mean_final_shelf_life[2]


def test_full_correction_without_disturbance(sweep_instance):
    from dataclasses import replace

    from freshroute.models import solve_adaptive

    inst = replace(sweep_instance, adaptive_params=replace(sweep_instance.adaptive_params, correction_factor=1.0))
    scen = Scenario.nominal(inst.node_count, inst.product_count)
    assert solve_adaptive(inst, scen).trace.total_deviation == 0.0


def test_tau_sweep_zero_std(sweep_instance):
    res = sweep_tau(sweep_instance, [0.0, 1.0, 2.0], 30, seed=1)
    assert res.mean_deviation[0] == 0.0
    assert res.mean_final_shelf_life[0] == 30.0
    assert res.mean_deviation[2] > res.mean_deviation[1]
    assert res.mean_final_shelf_life[2] < res.mean_final_shelf_life[1]


def test_sweep_grid_validation(sweep_instance):
    with pytest.raises(DomainError):
        sweep_beta(sweep_instance, [0.2, 0.1], 5, seed=0)
    with pytest.raises(DomainError):
        sweep_beta(sweep_instance, [0.5, 1.5], 5, seed=0)
    with pytest.raises(DomainError):
        sweep_tau(sweep_instance, [-1.0, 1.0], 5, seed=0)


def test_sweep_csv_rows(sweep_instance):
    res = sweep_beta(sweep_instance, [0.0, 0.5], 4, seed=0)
    lines = sweep_csv(res).splitlines()
    assert lines[0] == "parameter,value,mean_deviation,mean_final_shelf_life_days,replications"
    assert len(lines) == 3


def test_paired_trend():
    rng = np.random.default_rng(0)
    base = rng.normal(10, 1, 200)
    falling = np.array([base, base - 0.5, base - 1.0])
    assert all(paired_trend_holds(falling, "decreasing"))
    assert not all(paired_trend_holds(falling, "increasing"))
    flat = np.array([base, base])
    assert paired_trend_holds(flat, "increasing") == [True]
    with pytest.raises(ValueError):
        paired_trend_holds(flat, "sideways")


# ---------------------------------------------------------------- formatting


def test_fmt():
    assert fmt(1 / 3) == "0.333333"
    assert fmt(123456789.0) == "1.23457e+08"
    assert fmt(math.nan) == "nan" and fmt(-math.inf) == "-inf"
    assert fmt(None) == "" and fmt(3) == "3" and fmt(np.float64(2.5)) == "2.5"


def test_pareto_csv():
    text = pareto_csv([outcome(4, 1.0, 2.0)])
    assert text == "rank,scenario_id,trip_hours,freshness_deviation\n0,4,1,2\n"
