"""The five routing formulations.

The four static models compile an :class:`Instance` into a
:class:`RouteAdditiveProblem` and solve it exactly. They differ only in which
parameters feed the objective and the per-product shelf-window constraint:

=============  =========================  ==========================================
model          objective arc cost         shelf constraint arc weight
=============  =========================  ==========================================
deterministic  t_ij + d_i                 t_ij + d_i
robust         T^max_ij + d^max_i         T^max_ij + d^max_i
stochastic     t_ij + d_i                 sum_s p_s (t^s_ij + d^s_i)
dro            t_ij + d_i                 (mu_T + mu_d) + z (var_T + var_d)
=============  =========================  ==========================================

The adaptive model is a rolling-horizon loop: from the current node it picks
the next stop minimizing leg time plus weighted temperature deviation and
slack, then propagates product temperatures with the correction rule
``t_j = t_i + tau_j + beta (theta - t_i)`` clamped to the product band.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from freshroute.domain import Instance, Route, Scenario
from freshroute.errors import DomainError
from freshroute.kinetics import TemperatureProfile, time_weighted_mean
from freshroute.solver import (
    FEAS_TOL,
    RouteAdditiveProblem,
    SideConstraint,
    SolveStatus,
    solve_exact,
)


class ModelKind(str, enum.Enum):
    DETERMINISTIC = "deterministic"
    ROBUST = "robust"
    STOCHASTIC = "stochastic"
    DRO = "dro"
    ADAPTIVE = "adaptive"


STATIC_MODELS = (ModelKind.DETERMINISTIC, ModelKind.ROBUST, ModelKind.STOCHASTIC, ModelKind.DRO)


@dataclass(frozen=True)
class ConstraintReport:
    name: str
    lhs: float
    bound: float

    @property
    def slack(self) -> float:
        return self.bound - self.lhs

    @property
    def satisfied(self) -> bool:
        return self.lhs <= self.bound + FEAS_TOL


@dataclass(frozen=True)
class Hop:
    from_node: int
    to_node: int
    temperatures: tuple[float, ...]
    deviations: tuple[float, ...]
    slacks: tuple[float, ...]
    travel_hours: float
    hop_cost: float

    @property
    def is_return(self) -> bool:
        return self.to_node == 0


@dataclass(frozen=True)
class AdaptiveTrace:
    hops: tuple[Hop, ...]
    ideal_temperatures: tuple[float, ...]
    total_cost: float = field(init=False)
    total_travel_hours: float = field(init=False)
    total_deviation: float = field(init=False)
    total_slack: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "hops", tuple(self.hops))
        cost = travel = dev = slack = 0.0
        for h in self.hops:
            cost += h.hop_cost
            travel += h.travel_hours
            dev += sum(h.deviations)
            slack += sum(h.slacks)
        object.__setattr__(self, "total_cost", cost)
        object.__setattr__(self, "total_travel_hours", travel)
        object.__setattr__(self, "total_deviation", dev)
        object.__setattr__(self, "total_slack", slack)

    @property
    def order(self) -> tuple[int, ...]:
        if not self.hops:
            return (0,)
        return (self.hops[0].from_node,) + tuple(h.to_node for h in self.hops)

    @property
    def stop_hops(self) -> tuple[Hop, ...]:
        return tuple(h for h in self.hops if not h.is_return)

    def arrival_times(self) -> list[float]:
        """Arrival time at each stop, warehouse departure at 0."""
        times, clock = [0.0], 0.0
        for h in self.stop_hops:
            clock += h.travel_hours
            times.append(clock)
        return times

    def temperature_matrix(self) -> np.ndarray:
        """Rows: warehouse then each stop in visit order; columns: products."""
        rows = [self.ideal_temperatures] + [h.temperatures for h in self.stop_hops]
        return np.array(rows, dtype=float)

    def deviation_matrix(self) -> np.ndarray:
        return np.array([h.deviations for h in self.stop_hops], dtype=float).reshape(
            -1, len(self.ideal_temperatures)
        )

    def mean_temperatures(self) -> np.ndarray:
        return _time_weighted_means(self.arrival_times(), self.temperature_matrix())

    def profile(self, product: int) -> TemperatureProfile:
        return TemperatureProfile(tuple(self.arrival_times()), tuple(self.temperature_matrix()[:, product]))


@dataclass(frozen=True)
class ModelResult:
    """Outcome of one formulation.

    ``objective`` is the solver objective; ``planned_hours`` is the tour time
    under the parameters the model plans with (nominal, worst case, scenario
    expectation, or mean plus risk-weighted variance); ``total_travel_hours``
    is the tour time under nominal parameters for static models and under the
    realized scenario for the adaptive model.
    """

    kind: ModelKind
    status: SolveStatus
    route: Route | None
    objective: float
    total_travel_hours: float
    planned_hours: float
    trace: AdaptiveTrace | None = None
    diagnostics: tuple[ConstraintReport, ...] = ()
    nodes_explored: int = 0

    @property
    def feasible(self) -> bool:
        return self.status is SolveStatus.OPTIMAL


def _time_weighted_means(times, temps: np.ndarray) -> np.ndarray:
    if temps.shape[0] == 1 or times[-1] - times[0] <= 0:
        return temps.mean(axis=0)
    return np.array(
        [time_weighted_mean(TemperatureProfile(tuple(times), tuple(temps[:, k]))) for k in range(temps.shape[1])]
    )


def _require_products(instance: Instance) -> None:
    if not instance.products:
        raise DomainError("instance has no products")


def _route_sum(matrix: np.ndarray, route: Route) -> float:
    total = 0.0
    for i, j in route.arcs:
        total += matrix[i, j]
    return float(total)


def deterministic_problem(instance: Instance) -> RouteAdditiveProblem:
    _require_products(instance)
    cost = instance.network.arc_cost()
    return RouteAdditiveProblem(
        cost, tuple(SideConstraint(cost, p.shelf_window, f"shelf[{p.name}]") for p in instance.products)
    )


def robust_problem(instance: Instance) -> RouteAdditiveProblem:
    _require_products(instance)
    b = instance.bounds
    if b is None:
        raise DomainError("robust model needs uncertainty bounds")
    cost = b.travel_time_max + b.delay_max[:, None]
    return RouteAdditiveProblem(
        cost, tuple(SideConstraint(cost, p.shelf_window, f"shelf[{p.name}]") for p in instance.products)
    )


def expected_weights(instance: Instance) -> np.ndarray:
    """Matrix of sum_s p_s (t^s_ij + d^s_i)."""
    scenarios = instance.scenarios
    if not scenarios:
        raise DomainError("stochastic model needs scenarios")
    total = math.fsum(s.probability for s in scenarios)
    if abs(total - 1.0) > 1e-9:
        raise DomainError(f"scenario probabilities sum to {total!r}, expected 1")
    net = instance.network
    travel = sum(s.probability * s.realized_travel(net) for s in scenarios)
    delay = sum(s.probability * s.realized_delay(net) for s in scenarios)
    return travel + delay[:, None]


def stochastic_problem(instance: Instance) -> RouteAdditiveProblem:
    _require_products(instance)
    weight = expected_weights(instance)
    return RouteAdditiveProblem(
        instance.network.arc_cost(),
        tuple(SideConstraint(weight, p.shelf_window, f"expected_shelf[{p.name}]") for p in instance.products),
    )


def dro_weights(instance: Instance) -> np.ndarray:
    """Matrix of (mu_d + mu_T) + z (var_d + var_T); x^2 = x for binary arcs."""
    m = instance.moments
    if m is None:
        raise DomainError("DRO model needs moment information")
    mean = m.delay_mean[:, None] + m.travel_mean
    var = m.delay_variance[:, None] + m.travel_variance
    return mean + m.risk_aversion * var


def dro_problem(instance: Instance) -> RouteAdditiveProblem:
    _require_products(instance)
    weight = dro_weights(instance)
    # demand defaults to 1 so the bound reduces to L_k - R_k
    return RouteAdditiveProblem(
        instance.network.arc_cost(),
        tuple(
            SideConstraint(weight, p.demand * p.initial_shelf_life - p.required_shelf_life, f"dro_shelf[{p.name}]")
            for p in instance.products
        ),
    )


def _solve_static(kind: ModelKind, instance: Instance, problem: RouteAdditiveProblem, planned: np.ndarray) -> ModelResult:
    res = solve_exact(problem)
    if not res.is_optimal:
        return ModelResult(kind, res.status, None, math.inf, math.inf, math.inf, nodes_explored=res.nodes_explored)
    route = res.route
    reports = tuple(
        ConstraintReport(s.name, _route_sum(s.weight, route), s.bound) for s in problem.side_constraints
    )
    return ModelResult(
        kind,
        res.status,
        route,
        res.objective,
        _route_sum(instance.network.arc_cost(), route),
        _route_sum(planned, route),
        None,
        reports,
        res.nodes_explored,
    )


def solve_deterministic(instance: Instance) -> ModelResult:
    problem = deterministic_problem(instance)
    return _solve_static(ModelKind.DETERMINISTIC, instance, problem, problem.arc_cost)


def solve_robust(instance: Instance) -> ModelResult:
    problem = robust_problem(instance)
    return _solve_static(ModelKind.ROBUST, instance, problem, problem.arc_cost)


def solve_stochastic(instance: Instance) -> ModelResult:
    problem = stochastic_problem(instance)
    return _solve_static(ModelKind.STOCHASTIC, instance, problem, expected_weights(instance))


def solve_dro(instance: Instance) -> ModelResult:
    problem = dro_problem(instance)
    return _solve_static(ModelKind.DRO, instance, problem, dro_weights(instance))


# ------------------------------------------------------------------ adaptive


def _product_arrays(instance: Instance):
    theta = np.array([p.ideal_temperature for p in instance.products], dtype=float)
    lo = np.array([p.min_temperature for p in instance.products], dtype=float)
    hi = np.array([p.max_temperature for p in instance.products], dtype=float)
    return theta, lo, hi


def _check_scenario(instance: Instance, scenario: Scenario) -> None:
    n, K = instance.node_count, instance.product_count
    if scenario.delays.shape != (n,) or scenario.ambient_shift.shape != (n, K):
        raise DomainError(
            f"scenario shapes {scenario.delays.shape}/{scenario.ambient_shift.shape} "
            f"do not match {n} nodes and {K} products"
        )
    if scenario.travel_shift is not None and scenario.travel_shift.shape != (n, n):
        raise DomainError("scenario travel_shift shape mismatch")


def propagate_temperature(current: np.ndarray, shift: np.ndarray, theta: np.ndarray,
                          lo: np.ndarray, hi: np.ndarray, beta: float):
    """One hop of the correction rule; returns (stored temperature, deviation, slack)."""
    raw = current + shift + beta * (theta - current)
    stored = np.clip(raw, lo, hi)
    slack = np.abs(raw - stored)
    return stored, np.abs(stored - theta), slack


def solve_adaptive(instance: Instance, scenario: Scenario) -> ModelResult:
    """Rolling-horizon greedy routing with temperature feedback.

    Candidates are scanned in ascending node order and only a strictly better
    score replaces the incumbent, so ties go to the lowest node index.
    """
    _check_scenario(instance, scenario)
    params = instance.adaptive_params
    beta, lam_dev, lam_slack = params.correction_factor, params.deviation_penalty, params.slack_penalty
    net = instance.network
    n = net.node_count
    travel = scenario.realized_travel(net)
    delay = scenario.realized_delay(net)
    theta, lo, hi = _product_arrays(instance)
    tau = scenario.ambient_shift

    temps = theta.copy()
    current = 0
    remaining = list(range(1, n))
    hops: list[Hop] = []
    while remaining:
        best = None
        for j in remaining:
            stored, dev, slack = propagate_temperature(temps, tau[j], theta, lo, hi, beta)
            leg = travel[current, j] + delay[current]
            score = leg + lam_dev * dev.sum() + lam_slack * slack.sum()
            if best is None or score < best[0]:
                best = (score, j, leg, stored, dev, slack)
        score, j, leg, stored, dev, slack = best
        hops.append(Hop(current, j, tuple(stored), tuple(dev), tuple(slack), float(leg), float(score)))
        temps = stored
        remaining.remove(j)
        current = j
    if current != 0:
        leg = float(travel[current, 0] + delay[current])
        zeros = (0.0,) * len(theta)
        hops.append(Hop(current, 0, tuple(temps), zeros, zeros, leg, leg))

    trace = AdaptiveTrace(tuple(hops), tuple(theta))
    realized = travel + delay[:, None]
    route = Route.from_order(trace.order, realized)
    return ModelResult(
        ModelKind.ADAPTIVE,
        SolveStatus.OPTIMAL,
        route,
        trace.total_cost,
        trace.total_travel_hours,
        trace.total_travel_hours,
        trace,
    )


def adaptive_constraint_violations(result: ModelResult, instance: Instance, scenario: Scenario,
                                   tol: float = 1e-9) -> list[str]:
    """Check the temperature MILP constraints over every arc into a customer.

    Arcs not on the route are relaxed by big-M; arcs into the warehouse are
    skipped because the warehouse temperature is fixed at the ideal.
    """
    trace = result.trace
    params = instance.adaptive_params
    beta, M = params.correction_factor, params.big_m
    theta, lo, hi = _product_arrays(instance)
    tau = scenario.ambient_shift
    temp = {0: theta}
    slack = {0: np.zeros_like(theta)}
    dev = {0: np.zeros_like(theta)}
    for h in trace.stop_hops:
        temp[h.to_node] = np.array(h.temperatures)
        slack[h.to_node] = np.array(h.slacks)
        dev[h.to_node] = np.array(h.deviations)
    arcs = set(result.route.arcs)
    out = []
    for j in temp:
        if np.any(temp[j] < lo - tol) or np.any(temp[j] > hi + tol):
            out.append(f"node {j}: temperature outside band")
        if np.any(np.abs(dev[j] - np.abs(temp[j] - theta)) > tol):
            out.append(f"node {j}: deviation is not |t - theta|")
        if j == 0:
            continue
        for i in temp:
            if i == j:
                continue
            relax = M * (1 - ((i, j) in arcs))
            pred = temp[i] + tau[j] + beta * (theta - temp[i])
            if np.any(temp[j] < pred - relax - slack[j] - tol):
                out.append(f"arc ({i},{j}): lower temperature link violated")
            if np.any(temp[j] > pred + relax + slack[j] + tol):
                out.append(f"arc ({i},{j}): upper temperature link violated")
    return out


# ------------------------------------------------------- fixed-route replay


@dataclass(frozen=True)
class RouteEvaluation:
    travel_hours: float
    total_deviation: float
    mean_temperatures: tuple[float, ...]
    total_slack: float
    arrival_times: tuple[float, ...]
    temperatures: np.ndarray  # warehouse row then one row per stop

    def __iter__(self):
        # unpacks as (travel_hours, total_deviation, mean_temperatures)
        return iter((self.travel_hours, self.total_deviation, self.mean_temperatures))


def evaluate_route_under_scenario(route: Route, instance: Instance, scenario: Scenario,
                                  correct: bool = False) -> RouteEvaluation:
    """Replay a fixed route through a scenario.

    With ``correct`` off temperatures drift freely (``t_j = t_i + tau_j``);
    with it on the adaptive correction rule is applied, without clamping.
    ``total_slack`` reports how far the replayed temperatures leave each band.
    """
    _check_scenario(instance, scenario)
    net = instance.network
    n = net.node_count
    if len(route.order) != n + 1 or any(not 0 <= v < n for v in route.order):
        raise DomainError("route does not match the network size")
    beta = instance.adaptive_params.correction_factor if correct else 0.0
    travel = scenario.realized_travel(net)
    delay = scenario.realized_delay(net)
    theta, lo, hi = _product_arrays(instance)
    temps = theta.copy()
    rows = [theta.copy()]
    times = [0.0]
    clock = hours = deviation = slack = 0.0
    for i, j in route.arcs:
        leg = travel[i, j] + delay[i]
        hours += leg
        if j == 0:
            continue
        clock += leg
        temps = temps + scenario.ambient_shift[j] + beta * (theta - temps)
        deviation += float(np.abs(temps - theta).sum())
        slack += float((np.maximum(lo - temps, 0) + np.maximum(temps - hi, 0)).sum())
        rows.append(temps.copy())
        times.append(clock)
    matrix = np.array(rows)
    means = _time_weighted_means(times, matrix)
    return RouteEvaluation(float(hours), deviation, tuple(float(v) for v in means), slack, tuple(times), matrix)


def solve(kind: ModelKind | str, instance: Instance, scenario: Scenario | None = None) -> ModelResult:
    kind = ModelKind(kind)
    if kind is ModelKind.ADAPTIVE:
        if scenario is None:
            if not instance.scenarios:
                raise DomainError("adaptive model needs a scenario")
            scenario = instance.scenarios[0]
        return solve_adaptive(instance, scenario)
    return {
        ModelKind.DETERMINISTIC: solve_deterministic,
        ModelKind.ROBUST: solve_robust,
        ModelKind.STOCHASTIC: solve_stochastic,
        ModelKind.DRO: solve_dro,
    }[kind](instance)

