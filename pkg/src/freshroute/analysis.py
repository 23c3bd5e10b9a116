"""Experiment analytics: Pareto frontier, model comparison, shelf life, sweeps."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np
from scipy import stats

from freshroute.domain import Instance, ProductSpec, Scenario
from freshroute.errors import DomainError
from freshroute.kinetics import Q10Params, ShelfLifeRef, q10_shelf_life
from freshroute.models import (
    STATIC_MODELS,
    ModelKind,
    ModelResult,
    evaluate_route_under_scenario,
    solve,
    solve_adaptive,
    solve_deterministic,
)
from freshroute.scenarios import HOURS_PER_DAY, ScenarioGenConfig, generate_scenarios
from freshroute.solver import SolveStatus


@dataclass(frozen=True)
class ScenarioOutcome:
    scenario_id: int
    trip_hours: float
    freshness_deviation: float
    slack_total: float
    per_product_mean_temp: tuple[float, ...]


# ------------------------------------------------------------------- pareto


def dominates(a: ScenarioOutcome, b: ScenarioOutcome) -> bool:
    """``a`` is no worse on both objectives and strictly better on one."""
    return (
        a.trip_hours <= b.trip_hours
        and a.freshness_deviation <= b.freshness_deviation
        and (a.trip_hours < b.trip_hours or a.freshness_deviation < b.freshness_deviation)
    )


def pareto_frontier(outcomes: Sequence[ScenarioOutcome]) -> list[ScenarioOutcome]:
    """Non-dominated outcomes (both objectives minimized), sorted by trip time.

    Deviation strictly decreases along the result. Exact duplicates keep only
    the earliest outcome in input order.
    """
    if not outcomes:
        raise DomainError("need at least one outcome")
    ranked = sorted(range(len(outcomes)), key=lambda i: (outcomes[i].trip_hours, outcomes[i].freshness_deviation, i))
    front, best = [], math.inf
    for i in ranked:
        if outcomes[i].freshness_deviation < best:
            front.append(outcomes[i])
            best = outcomes[i].freshness_deviation
    return front


# --------------------------------------------------------- model comparison


@dataclass(frozen=True)
class ComparisonRow:
    model: ModelKind
    status: SolveStatus
    total_hours: float
    objective: float
    nominal_hours: float
    min_constraint_slack: float
    route: tuple[int, ...] | None
    error: str = ""


def _row(kind: ModelKind, result: ModelResult) -> ComparisonRow:
    slack = min((c.slack for c in result.diagnostics), default=math.nan)
    return ComparisonRow(
        kind,
        result.status,
        result.planned_hours,
        result.objective,
        result.total_travel_hours,
        slack,
        result.route.order if result.route is not None else None,
    )


def compare_models(instance: Instance, scenarios: Sequence[Scenario] | None = None,
                   evaluation_scenario: int = 0) -> list[ComparisonRow]:
    """Run all five models on one instance.

    Static rows report hours under each model's planning parameters (nominal,
    worst case, scenario expectation, mean plus risk-weighted variance). The
    adaptive row reports realized hours on ``scenarios[evaluation_scenario]``.
    When ``scenarios`` is omitted the instance's own scenario set is used.
    Missing data or infeasibility shows up in the row instead of raising.
    """
    if scenarios is None:
        scenarios = instance.scenarios or ()
    if instance.scenarios is None and scenarios:
        instance = replace(instance, scenarios=tuple(scenarios))
    rows = []
    for kind in STATIC_MODELS:
        try:
            rows.append(_row(kind, solve(kind, instance)))
        except DomainError as exc:
            rows.append(ComparisonRow(kind, SolveStatus.INFEASIBLE, math.nan, math.nan, math.nan, math.nan, None, str(exc)))
    if scenarios:
        rows.append(_row(ModelKind.ADAPTIVE, solve_adaptive(instance, scenarios[evaluation_scenario])))
    else:
        rows.append(ComparisonRow(ModelKind.ADAPTIVE, SolveStatus.INFEASIBLE, math.nan, math.nan, math.nan,
                                  math.nan, None, "no evaluation scenario"))
    return rows


# ------------------------------------------------- deterministic vs adaptive


@dataclass(frozen=True)
class ScenarioComparison:
    deterministic: tuple[ScenarioOutcome, ...]
    adaptive: tuple[ScenarioOutcome, ...]

    @property
    def mean_deterministic_deviation(self) -> float:
        return float(np.mean([o.freshness_deviation for o in self.deterministic]))

    @property
    def mean_adaptive_deviation(self) -> float:
        return float(np.mean([o.freshness_deviation for o in self.adaptive]))

    @property
    def deviation_reduction_pct(self) -> float | None:
        """None when the deterministic route shows no deviation at all."""
        det = self.mean_deterministic_deviation
        if det == 0:
            return None
        return 100.0 * (1.0 - self.mean_adaptive_deviation / det)

    @property
    def mean_travel_increase(self) -> float:
        return float(np.mean([a.trip_hours - d.trip_hours for a, d in zip(self.adaptive, self.deterministic)]))

    @property
    def share_adaptive_slower(self) -> float:
        """Fraction of scenarios where adaptive travel hours >= deterministic."""
        flags = [a.trip_hours >= d.trip_hours - 1e-12 for a, d in zip(self.adaptive, self.deterministic)]
        return float(np.mean(flags))

    def summary(self) -> dict[str, float | None]:
        return {
            "scenarios": len(self.adaptive),
            "mean_deterministic_deviation": self.mean_deterministic_deviation,
            "mean_adaptive_deviation": self.mean_adaptive_deviation,
            "deviation_reduction_pct": self.deviation_reduction_pct,
            "mean_travel_increase_hours": self.mean_travel_increase,
            "share_adaptive_slower": self.share_adaptive_slower,
        }


def adaptive_outcome(result: ModelResult, scenario_id: int) -> ScenarioOutcome:
    trace = result.trace
    return ScenarioOutcome(
        scenario_id,
        trace.total_travel_hours,
        trace.total_deviation,
        trace.total_slack,
        tuple(float(v) for v in trace.mean_temperatures()),
    )


def run_scenario_comparison(instance: Instance, scenarios: Sequence[Scenario]) -> ScenarioComparison:
    """Replay the deterministic optimum without correction and re-solve adaptively, per scenario."""
    if not scenarios:
        raise DomainError("need at least one scenario")
    det = solve_deterministic(instance)
    if not det.feasible:
        raise DomainError("deterministic model is infeasible on this instance")
    det_out, ada_out = [], []
    for s in sorted(scenarios, key=lambda s: s.id):
        ev = evaluate_route_under_scenario(det.route, instance, s, correct=False)
        det_out.append(ScenarioOutcome(s.id, ev.travel_hours, ev.total_deviation, ev.total_slack, ev.mean_temperatures))
        ada_out.append(adaptive_outcome(solve_adaptive(instance, s), s.id))
    return ScenarioComparison(tuple(det_out), tuple(ada_out))


def adaptive_outcomes(instance: Instance, scenarios: Sequence[Scenario]) -> list[ScenarioOutcome]:
    return [adaptive_outcome(solve_adaptive(instance, s), s.id) for s in sorted(scenarios, key=lambda s: s.id)]


# --------------------------------------------------------------- shelf life


@dataclass(frozen=True)
class ShelfLifeComparison:
    adaptive: tuple[float, float]  # (mean temperature C, shelf life days)
    deterministic: tuple[float, float]

    @property
    def ratio(self) -> float:
        return self.adaptive[1] / self.deterministic[1]


def product_reference(product: ProductSpec) -> ShelfLifeRef:
    """Nominal shelf life (days) at the product's ideal temperature."""
    return ShelfLifeRef.from_celsius(product.initial_shelf_life / HOURS_PER_DAY, product.ideal_temperature)


def shelf_life_pair(product: ProductSpec, adaptive_mean: float, deterministic_mean: float) -> ShelfLifeComparison:
    ref = product_reference(product)
    return ShelfLifeComparison(
        (adaptive_mean, q10_shelf_life(ref, product.q10, adaptive_mean)),
        (deterministic_mean, q10_shelf_life(ref, product.q10, deterministic_mean)),
    )


def shelf_life_comparison(instance: Instance, scenario: Scenario, product: ProductSpec) -> ShelfLifeComparison:
    """Mean transit temperature of each route, then Q10 shelf life at that mean."""
    k = next((i for i, p in enumerate(instance.products) if p.id == product.id), None)
    if k is None:
        raise DomainError(f"product {product.name!r} is not part of the instance")
    det = solve_deterministic(instance)
    det_mean = evaluate_route_under_scenario(det.route, instance, scenario, correct=False).mean_temperatures[k]
    ada_mean = float(solve_adaptive(instance, scenario).trace.mean_temperatures()[k])
    return shelf_life_pair(product, ada_mean, float(det_mean))


# ------------------------------------------------------------------- sweeps

SWEEP_REFERENCE = ShelfLifeRef.from_celsius(30.0, 5.0)


@dataclass(frozen=True)
class SweepResult:
    parameter_name: str
    grid: tuple[float, ...]
    mean_deviation: tuple[float, ...]
    mean_final_shelf_life: tuple[float, ...]
    replication_count: int
    deviations: np.ndarray  # (grid, replication)
    shelf_lives: np.ndarray  # (grid, replication)


def final_shelf_life(result: ModelResult, reference: ShelfLifeRef = SWEEP_REFERENCE,
                     q10: Q10Params = Q10Params(2.0)) -> float:
    """Shelf life in days after the trip, averaged over products.

    Each product is charged an effective storage temperature of the reference
    temperature plus its mean absolute deviation over the stops, so warm and
    cold excursions both shorten life.
    """
    dev = result.trace.deviation_matrix()
    if dev.size == 0:
        return reference.reference_life
    excess = dev.mean(axis=0)
    return float(np.mean([q10_shelf_life(reference, q10, reference.reference_celsius + e) for e in excess]))


def _check_grid(grid: Sequence[float]) -> tuple[float, ...]:
    grid = tuple(float(g) for g in grid)
    if not grid:
        raise DomainError("empty sweep grid")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise DomainError("sweep grid must be strictly increasing")
    return grid


def _run_sweep(name, grid, instances_and_scenarios, replications, reference, q10) -> SweepResult:
    dev = np.zeros((len(grid), replications))
    life = np.zeros((len(grid), replications))
    for g, (inst, scenarios) in enumerate(instances_and_scenarios):
        for r, s in enumerate(scenarios):
            res = solve_adaptive(inst, s)
            dev[g, r] = res.trace.total_deviation
            life[g, r] = final_shelf_life(res, reference, q10)
    return SweepResult(
        name,
        grid,
        tuple(float(v) for v in dev.mean(axis=1)),
        tuple(float(v) for v in life.mean(axis=1)),
        replications,
        dev,
        life,
    )


def sweep_beta(instance: Instance, grid: Sequence[float], replications: int, seed: int,
               ambient_std: float = 1.0, reference: ShelfLifeRef = SWEEP_REFERENCE,
               q10: Q10Params = Q10Params(2.0)) -> SweepResult:
    """Adaptive deviation and final shelf life across correction strengths.

    Every grid point replays the same ``replications`` scenarios (common
    random numbers).
    """
    grid = _check_grid(grid)
    if any(not 0 <= b <= 1 for b in grid):
        raise DomainError("beta grid values must lie in [0, 1]")
    config = ScenarioGenConfig(ambient_std=ambient_std, scenario_count=replications, seed=seed)
    scenarios = generate_scenarios(config, instance)
    runs = [
        (replace(instance, adaptive_params=replace(instance.adaptive_params, correction_factor=b)), scenarios)
        for b in grid
    ]
    return _run_sweep("beta", grid, runs, replications, reference, q10)


def sweep_tau(instance: Instance, grid: Sequence[float], replications: int, seed: int,
              beta: float = 0.5, reference: ShelfLifeRef = SWEEP_REFERENCE,
              q10: Q10Params = Q10Params(2.0)) -> SweepResult:
    """Adaptive deviation and final shelf life across ambient-shift severities, beta fixed."""
    grid = _check_grid(grid)
    if any(g < 0 for g in grid):
        raise DomainError("ambient std grid values must be non-negative")
    inst = replace(instance, adaptive_params=replace(instance.adaptive_params, correction_factor=beta))
    runs = [
        (inst, generate_scenarios(ScenarioGenConfig(ambient_std=g, scenario_count=replications, seed=seed), inst))
        for g in grid
    ]
    return _run_sweep("tau", grid, runs, replications, reference, q10)


def paired_trend_holds(samples: np.ndarray, direction: str, confidence: float = 0.99) -> list[bool]:
    """One-sided paired t-tests between consecutive grid points.

    For ``direction="decreasing"`` step ``g`` fails only if the mean paired
    increase from point ``g`` to ``g + 1`` is significant at ``confidence``;
    ``"increasing"`` mirrors that. Returns one flag per step.
    """
    if direction not in ("decreasing", "increasing"):
        raise ValueError("direction must be 'decreasing' or 'increasing'")
    sign = 1.0 if direction == "decreasing" else -1.0
    out = []
    for a, b in zip(samples[:-1], samples[1:]):
        diff = sign * (b - a)
        n = diff.size
        sd = diff.std(ddof=1) if n > 1 else 0.0
        if sd == 0:
            out.append(bool(diff.mean() <= 0))
            continue
        t = diff.mean() / (sd / math.sqrt(n))
        out.append(bool(t <= stats.t.ppf(confidence, n - 1)))
    return out


# ------------------------------------------------------------------- tables


def fmt(value) -> str:
    """Six significant digits for floats; everything else via str."""
    if isinstance(value, (float, np.floating)):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return f"{value:.6g}"
    if value is None:
        return ""
    return str(value)


def render_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def _route_text(order) -> str:
    return "" if order is None else "-".join(str(v) for v in order)


def comparison_csv(rows: Sequence[ComparisonRow]) -> str:
    header = ["model", "status", "total_hours", "objective", "nominal_hours", "min_constraint_slack", "route", "error"]
    return render_csv(header, (
        [r.model.value, r.status.value, r.total_hours, r.objective, r.nominal_hours,
         r.min_constraint_slack, _route_text(r.route), r.error]
        for r in rows
    ))


def outcomes_csv(outcomes: Sequence[ScenarioOutcome], model: str | None = None) -> str:
    k = len(outcomes[0].per_product_mean_temp) if outcomes else 0
    header = (["model"] if model else []) + ["scenario_id", "trip_hours", "freshness_deviation", "slack_total"]
    header += [f"mean_temp_{i}" for i in range(k)]
    prefix = [model] if model else []
    return render_csv(header, (
        prefix + [o.scenario_id, o.trip_hours, o.freshness_deviation, o.slack_total, *o.per_product_mean_temp]
        for o in outcomes
    ))


def scenario_comparison_csv(comp: ScenarioComparison) -> str:
    header = ["scenario_id", "deterministic_hours", "adaptive_hours", "deterministic_deviation",
              "adaptive_deviation", "adaptive_slack"]
    return render_csv(header, (
        [d.scenario_id, d.trip_hours, a.trip_hours, d.freshness_deviation, a.freshness_deviation, a.slack_total]
        for d, a in zip(comp.deterministic, comp.adaptive)
    ))


def pareto_csv(front: Sequence[ScenarioOutcome]) -> str:
    return render_csv(["rank", "scenario_id", "trip_hours", "freshness_deviation"], (
        [i, o.scenario_id, o.trip_hours, o.freshness_deviation] for i, o in enumerate(front)
    ))


def sweep_csv(result: SweepResult) -> str:
    return render_csv(["parameter", "value", "mean_deviation", "mean_final_shelf_life_days", "replications"], (
        [result.parameter_name, g, d, s, result.replication_count]
        for g, d, s in zip(result.grid, result.mean_deviation, result.mean_final_shelf_life)
    ))
