"""Shared data model: products, network, uncertainty blocks, scenarios, routes.

All containers are frozen. Matrices are float64 numpy arrays marked read-only
so an instance can be handed to concurrent evaluators without copying.

Construction does not validate invariants beyond shape coercion; use
:func:`validate_instance` to get a full violation report.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from freshroute.errors import DomainError
from freshroute.kinetics import Q10Params

SCHEMA_VERSION = 1
PROBABILITY_TOL = 1e-9


def _frozen_array(values, ndim: int, name: str) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != ndim:
        raise DomainError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


def _optional_array(values, ndim: int, name: str):
    return None if values is None else _frozen_array(values, ndim, name)


@dataclass(frozen=True)
class ProductSpec:
    id: int
    name: str
    ideal_temperature: float  # C
    min_temperature: float
    max_temperature: float
    initial_shelf_life: float  # hours
    required_shelf_life: float  # hours
    demand: float = 1.0
    q10: Q10Params = field(default_factory=lambda: Q10Params(2.0))

    @property
    def shelf_window(self) -> float:
        """Transit time budget L_k - R_k in hours."""
        return self.initial_shelf_life - self.required_shelf_life

    @property
    def band(self) -> float:
        return self.max_temperature - self.min_temperature


@dataclass(frozen=True)
class Network:
    """Warehouse is node 0. ``delay[i]`` is charged on every arc leaving ``i``."""

    travel_time: np.ndarray
    delay: np.ndarray
    distance: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "travel_time", _frozen_array(self.travel_time, 2, "travel_time"))
        object.__setattr__(self, "delay", _frozen_array(self.delay, 1, "delay"))
        object.__setattr__(self, "distance", _optional_array(self.distance, 2, "distance"))

    @property
    def node_count(self) -> int:
        return self.travel_time.shape[0]

    def arc_cost(self) -> np.ndarray:
        """Matrix of t_ij + delta_i."""
        return self.travel_time + self.delay[:, None]


@dataclass(frozen=True)
class UncertaintyBounds:
    travel_time_min: np.ndarray
    travel_time_max: np.ndarray
    delay_min: np.ndarray
    delay_max: np.ndarray

    def __post_init__(self):
        for name in ("travel_time_min", "travel_time_max"):
            object.__setattr__(self, name, _frozen_array(getattr(self, name), 2, name))
        for name in ("delay_min", "delay_max"):
            object.__setattr__(self, name, _frozen_array(getattr(self, name), 1, name))

    @classmethod
    def degenerate(cls, network: Network) -> "UncertaintyBounds":
        """Box collapsed onto the nominal values."""
        t, d = network.travel_time, network.delay
        return cls(t, t, d, d)


@dataclass(frozen=True)
class MomentInfo:
    travel_mean: np.ndarray
    travel_variance: np.ndarray
    delay_mean: np.ndarray
    delay_variance: np.ndarray
    risk_aversion: float = 1.0

    def __post_init__(self):
        for name in ("travel_mean", "travel_variance"):
            object.__setattr__(self, name, _frozen_array(getattr(self, name), 2, name))
        for name in ("delay_mean", "delay_variance"):
            object.__setattr__(self, name, _frozen_array(getattr(self, name), 1, name))

    @classmethod
    def nominal(cls, network: Network, risk_aversion: float = 0.0) -> "MomentInfo":
        n = network.node_count
        return cls(network.travel_time, np.zeros((n, n)), network.delay, np.zeros(n), risk_aversion)


@dataclass(frozen=True)
class AdaptiveParams:
    correction_factor: float = 0.5  # beta
    deviation_penalty: float = 1.0  # lambda_1
    slack_penalty: float = 10.0  # lambda_2
    big_m: float = 100.0  # C


@dataclass(frozen=True)
class Scenario:
    """One realization of disturbances, expressed as shifts on the nominal network.

    ``delays[i]`` is extra delay at node ``i`` on top of the nominal delay,
    ``travel_shift`` (optional) is added to nominal travel times, and
    ``ambient_shift[j, k]`` is the ambient temperature shift experienced by
    product ``k`` on the arc into node ``j``.
    """

    id: int
    probability: float
    delays: np.ndarray
    ambient_shift: np.ndarray
    travel_shift: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "delays", _frozen_array(self.delays, 1, "delays"))
        object.__setattr__(self, "ambient_shift", _frozen_array(self.ambient_shift, 2, "ambient_shift"))
        object.__setattr__(self, "travel_shift", _optional_array(self.travel_shift, 2, "travel_shift"))

    @classmethod
    def nominal(cls, node_count: int, product_count: int, id: int = 0, probability: float = 1.0) -> "Scenario":
        return cls(id, probability, np.zeros(node_count), np.zeros((node_count, product_count)))

    def realized_travel(self, network: Network) -> np.ndarray:
        if self.travel_shift is None:
            return network.travel_time
        return network.travel_time + self.travel_shift

    def realized_delay(self, network: Network) -> np.ndarray:
        return network.delay + self.delays


@dataclass(frozen=True)
class Instance:
    network: Network
    products: tuple[ProductSpec, ...]
    bounds: UncertaintyBounds | None = None
    moments: MomentInfo | None = None
    scenarios: tuple[Scenario, ...] | None = None
    adaptive_params: AdaptiveParams = field(default_factory=AdaptiveParams)

    def __post_init__(self):
        object.__setattr__(self, "products", tuple(self.products))
        if self.scenarios is not None:
            object.__setattr__(self, "scenarios", tuple(self.scenarios))

    @property
    def node_count(self) -> int:
        return self.network.node_count

    @property
    def product_count(self) -> int:
        return len(self.products)

    def with_(self, **changes) -> "Instance":
        return replace(self, **changes)


@dataclass(frozen=True)
class Route:
    """Closed tour ``0 -> ... -> 0`` with the cost charged on each leg."""

    order: tuple[int, ...]
    leg_costs: tuple[float, ...]
    total_time: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "order", tuple(int(v) for v in self.order))
        object.__setattr__(self, "leg_costs", tuple(float(c) for c in self.leg_costs))
        if len(self.leg_costs) != max(len(self.order) - 1, 0):
            raise DomainError("need exactly one leg cost per arc")
        total = 0.0
        for c in self.leg_costs:
            total += c
        object.__setattr__(self, "total_time", total)

    @classmethod
    def from_order(cls, order: Sequence[int], arc_cost: np.ndarray) -> "Route":
        order = tuple(int(v) for v in order)
        return cls(order, tuple(float(arc_cost[i, j]) for i, j in zip(order, order[1:])))

    @property
    def arcs(self) -> list[tuple[int, int]]:
        return list(zip(self.order, self.order[1:]))

    @property
    def stops(self) -> tuple[int, ...]:
        return self.order[1:-1]

    @property
    def sequencing(self) -> dict[int, int]:
        """MTZ visit index u_i (1..n-1) of every customer node."""
        return {node: pos for pos, node in enumerate(self.order[1:-1], start=1)}


@dataclass(frozen=True)
class Violation:
    path: str
    message: str

    def __str__(self) -> str:
        return f"{self.path}: {self.message}"


def route_violations(route: Route, node_count: int) -> list[Violation]:
    """Structural checks: depot start/end, degree constraints, no self loop, one cycle."""
    out = []
    order = route.order
    if len(order) < 2 or order[0] != 0 or order[-1] != 0:
        out.append(Violation("route.order", "tour must start and end at warehouse 0"))
        return out
    if len(order) != node_count + 1:
        out.append(Violation("route.order", f"tour has {len(order) - 1} arcs, expected {node_count}"))
    inner = order[1:-1]
    if any(not 0 < v < node_count for v in inner):
        out.append(Violation("route.order", "tour contains an unknown node or revisits the warehouse"))
    if sorted(inner) != list(range(1, node_count)):
        out.append(Violation("route.order", "every customer must be visited exactly once"))
    for i, j in route.arcs:
        if i == j:
            out.append(Violation(f"route.arc[{i},{j}]", "self loop"))
    return out


def mtz_violations(route: Route, node_count: int) -> list[Violation]:
    """Check u_i - u_j + n x_ij <= n - 1 for all customer pairs, n = customer count."""
    u = route.sequencing
    n = node_count - 1
    arcs = set(route.arcs)
    out = []
    for i in range(1, node_count):
        for j in range(1, node_count):
            if i == j or i not in u or j not in u:
                continue
            lhs = u[i] - u[j] + n * ((i, j) in arcs)
            if lhs > n - 1:
                out.append(Violation(f"mtz[{i},{j}]", f"{lhs} > {n - 1}"))
    return out


def route_total_time(route: Route, network: Network) -> float:
    """Sum of t_ij + delta_i over traversed arcs, warehouse delay included."""
    n = network.node_count
    if any(not 0 <= v < n for v in route.order):
        raise DomainError(f"route references nodes outside a {n}-node network")
    if len(route.order) != n + 1:
        raise DomainError(f"route has {len(route.order) - 1} arcs, network needs {n}")
    total = 0.0
    for i, j in route.arcs:
        total += network.travel_time[i, j] + network.delay[i]
    return float(total)


# ---------------------------------------------------------------- validation


def _check_matrix(arr, n, path, out, nonneg=True):
    if arr.shape != (n, n):
        out.append(Violation(path, f"shape {arr.shape}, expected {(n, n)}"))
        return False
    if not np.all(np.isfinite(arr)):
        out.append(Violation(path, "non-finite entries"))
    if nonneg:
        for i, j in zip(*np.nonzero(arr < 0)):
            out.append(Violation(f"{path}[{i}][{j}]", "negative value"))
    return True


def _check_vector(arr, n, path, out, nonneg=True):
    if arr.shape != (n,):
        out.append(Violation(path, f"shape {arr.shape}, expected {(n,)}"))
        return False
    if nonneg:
        for i in np.nonzero(arr < 0)[0]:
            out.append(Violation(f"{path}[{i}]", "negative value"))
    return True


def _check_order(lo, mid, hi, path_lo, path_hi, out):
    for idx in zip(*np.nonzero(lo > mid)):
        where = "".join(f"[{i}]" for i in idx)
        out.append(Violation(f"{path_lo}{where}", "minimum exceeds nominal value"))
    for idx in zip(*np.nonzero(hi < mid)):
        where = "".join(f"[{i}]" for i in idx)
        out.append(Violation(f"{path_hi}{where}", "maximum below nominal value"))


def validate_instance(instance: Instance) -> list[Violation]:
    """Return every invariant violation; an empty list means the instance is well formed."""
    out: list[Violation] = []
    net = instance.network
    n = net.node_count
    if n < 2:
        out.append(Violation("network", "need the warehouse and at least one stop"))
    if _check_matrix(net.travel_time, n, "network.travel_time", out):
        for i in range(n):
            if net.travel_time[i, i] != 0:
                out.append(Violation(f"network.travel_time[{i}][{i}]", "diagonal must be zero"))
    _check_vector(net.delay, n, "network.delay", out)
    if net.distance is not None:
        _check_matrix(net.distance, n, "network.distance", out)

    if not instance.products:
        out.append(Violation("products", "no products"))
    for k, p in enumerate(instance.products):
        path = f"products[{k}]"
        if not p.min_temperature <= p.ideal_temperature <= p.max_temperature:
            out.append(Violation(path, "need min_temperature <= ideal_temperature <= max_temperature"))
        if p.required_shelf_life < 0:
            out.append(Violation(f"{path}.required_shelf_life", "must be non-negative"))
        if not p.initial_shelf_life - p.required_shelf_life > 0:
            out.append(Violation(path, "shelf window L_k - R_k > 0 violated (required >= initial shelf life)"))
        if p.demand < 0:
            out.append(Violation(f"{path}.demand", "must be non-negative"))

    b = instance.bounds
    if b is not None:
        ok = _check_matrix(b.travel_time_min, n, "bounds.travel_time_min", out)
        ok &= _check_matrix(b.travel_time_max, n, "bounds.travel_time_max", out)
        ok &= _check_vector(b.delay_min, n, "bounds.delay_min", out)
        ok &= _check_vector(b.delay_max, n, "bounds.delay_max", out)
        if ok:
            _check_order(b.travel_time_min, net.travel_time, b.travel_time_max,
                         "bounds.travel_time_min", "bounds.travel_time_max", out)
            _check_order(b.delay_min, net.delay, b.delay_max, "bounds.delay_min", "bounds.delay_max", out)

    m = instance.moments
    if m is not None:
        _check_matrix(m.travel_mean, n, "moments.travel_mean", out)
        _check_matrix(m.travel_variance, n, "moments.travel_variance", out)
        _check_vector(m.delay_mean, n, "moments.delay_mean", out)
        _check_vector(m.delay_variance, n, "moments.delay_variance", out)
        if m.risk_aversion < 0:
            out.append(Violation("moments.risk_aversion", "must be non-negative"))

    max_tau = 0.0
    if instance.scenarios is not None:
        K = instance.product_count
        if not instance.scenarios:
            out.append(Violation("scenarios", "empty scenario list"))
        total = 0.0
        for s_idx, s in enumerate(instance.scenarios):
            path = f"scenarios[{s_idx}]"
            total += s.probability
            if not 0 <= s.probability <= 1:
                out.append(Violation(f"{path}.probability", "must lie in [0, 1]"))
            _check_vector(s.delays, n, f"{path}.delays", out)
            if s.ambient_shift.shape != (n, K):
                out.append(Violation(f"{path}.ambient_shift", f"shape {s.ambient_shift.shape}, expected {(n, K)}"))
            elif s.ambient_shift.size:
                max_tau = max(max_tau, float(np.max(np.abs(s.ambient_shift))))
            if s.travel_shift is not None:
                if _check_matrix(s.travel_shift, n, f"{path}.travel_shift", out, nonneg=False):
                    for i, j in zip(*np.nonzero(s.realized_travel(net) < 0)):
                        out.append(Violation(f"{path}.travel_shift[{i}][{j}]", "realized travel time negative"))
        if instance.scenarios and abs(total - 1.0) > PROBABILITY_TOL:
            out.append(Violation("scenarios", f"probabilities sum to {total!r}, expected 1"))

    a = instance.adaptive_params
    if not 0 <= a.correction_factor <= 1:
        out.append(Violation("adaptive_params.correction_factor", "beta must lie in [0, 1]"))
    if a.deviation_penalty < 0:
        out.append(Violation("adaptive_params.deviation_penalty", "must be non-negative"))
    if a.slack_penalty < 0:
        out.append(Violation("adaptive_params.slack_penalty", "must be non-negative"))
    widest = max((p.band for p in instance.products), default=0.0)
    if not a.big_m > widest + max_tau:
        out.append(Violation("adaptive_params.big_m",
                             f"big-M {a.big_m} must exceed widest band plus largest |tau| ({widest + max_tau})"))
    return out


def check_instance(instance: Instance) -> Instance:
    """Raise :class:`DomainError` listing every violation, else return the instance."""
    report = validate_instance(instance)
    if report:
        raise DomainError("invalid instance:\n" + "\n".join(f"  {v}" for v in report))
    return instance


# ------------------------------------------------------------- serialization


def _mat(arr):
    return None if arr is None else arr.tolist()


def product_to_dict(p: ProductSpec) -> dict[str, Any]:
    return {
        "id": p.id,
        "name": p.name,
        "ideal_temperature": p.ideal_temperature,
        "min_temperature": p.min_temperature,
        "max_temperature": p.max_temperature,
        "initial_shelf_life": p.initial_shelf_life,
        "required_shelf_life": p.required_shelf_life,
        "demand": p.demand,
        "q10": p.q10.q10,
    }


def product_from_dict(d: dict[str, Any]) -> ProductSpec:
    return ProductSpec(
        id=int(d["id"]),
        name=str(d["name"]),
        ideal_temperature=float(d["ideal_temperature"]),
        min_temperature=float(d["min_temperature"]),
        max_temperature=float(d["max_temperature"]),
        initial_shelf_life=float(d["initial_shelf_life"]),
        required_shelf_life=float(d["required_shelf_life"]),
        demand=float(d.get("demand", 1.0)),
        q10=Q10Params(float(d.get("q10", 2.0))),
    )


def scenario_to_dict(s: Scenario) -> dict[str, Any]:
    out = {
        "id": s.id,
        "probability": s.probability,
        "delays": s.delays.tolist(),
        "ambient_shift": s.ambient_shift.tolist(),
    }
    if s.travel_shift is not None:
        out["travel_shift"] = s.travel_shift.tolist()
    return out


def scenario_from_dict(d: dict[str, Any], product_count: int | None = None) -> Scenario:
    ambient = np.asarray(d["ambient_shift"], dtype=float)
    if ambient.ndim != 2:
        # JSON loses the column count of an empty matrix
        ambient = ambient.reshape(len(d["delays"]), product_count or 0)
    return Scenario(
        id=int(d["id"]),
        probability=float(d["probability"]),
        delays=d["delays"],
        ambient_shift=ambient,
        travel_shift=d.get("travel_shift"),
    )


def instance_to_dict(instance: Instance) -> dict[str, Any]:
    net = instance.network
    out: dict[str, Any] = {
        "schema_version": SCHEMA_VERSION,
        "network": {
            "node_count": net.node_count,
            "travel_time": net.travel_time.tolist(),
            "delay": net.delay.tolist(),
            "distance": _mat(net.distance),
        },
        "products": [product_to_dict(p) for p in instance.products],
        "adaptive_params": {
            "correction_factor": instance.adaptive_params.correction_factor,
            "deviation_penalty": instance.adaptive_params.deviation_penalty,
            "slack_penalty": instance.adaptive_params.slack_penalty,
            "big_m": instance.adaptive_params.big_m,
        },
        "bounds": None,
        "moments": None,
        "scenarios": None,
    }
    if instance.bounds is not None:
        b = instance.bounds
        out["bounds"] = {
            "travel_time_min": b.travel_time_min.tolist(),
            "travel_time_max": b.travel_time_max.tolist(),
            "delay_min": b.delay_min.tolist(),
            "delay_max": b.delay_max.tolist(),
        }
    if instance.moments is not None:
        m = instance.moments
        out["moments"] = {
            "travel_mean": m.travel_mean.tolist(),
            "travel_variance": m.travel_variance.tolist(),
            "delay_mean": m.delay_mean.tolist(),
            "delay_variance": m.delay_variance.tolist(),
            "risk_aversion": m.risk_aversion,
        }
    if instance.scenarios is not None:
        out["scenarios"] = [scenario_to_dict(s) for s in instance.scenarios]
    return out


def instance_from_dict(d: dict[str, Any]) -> Instance:
    version = d.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise DomainError(f"unsupported schema_version {version}")
    net_d = d["network"]
    network = Network(net_d["travel_time"], net_d["delay"], net_d.get("distance"))
    if "node_count" in net_d and net_d["node_count"] != network.node_count:
        raise DomainError("network.node_count disagrees with travel_time shape")
    products = tuple(product_from_dict(p) for p in d["products"])
    bounds = moments = scenarios = None
    if d.get("bounds") is not None:
        bounds = UncertaintyBounds(**d["bounds"])
    if d.get("moments") is not None:
        moments = MomentInfo(**d["moments"])
    if d.get("scenarios") is not None:
        scenarios = tuple(scenario_from_dict(s, len(products)) for s in d["scenarios"])
    params = AdaptiveParams(**d.get("adaptive_params", {}))
    return Instance(network, products, bounds, moments, scenarios, params)


def dumps_instance(instance: Instance) -> str:
    return json.dumps(instance_to_dict(instance), indent=2) + "\n"


def loads_instance(text: str) -> Instance:
    return instance_from_dict(json.loads(text))


def save_instance(instance: Instance, path: str | Path) -> None:
    Path(path).write_text(dumps_instance(instance), encoding="utf-8")


def load_instance(path: str | Path) -> Instance:
    return loads_instance(Path(path).read_text(encoding="utf-8"))
