"""Routing perishable goods under travel-time, delay and temperature uncertainty."""

from freshroute.domain import (
    AdaptiveParams,
    Instance,
    MomentInfo,
    Network,
    ProductSpec,
    Route,
    Scenario,
    UncertaintyBounds,
    load_instance,
    save_instance,
)
from freshroute.errors import DomainError
from freshroute.models import ModelKind, ModelResult, solve
from freshroute.scenarios import ScenarioGenConfig, SyntheticConfig, generate_instance, generate_scenarios, experiment_instance
from freshroute.solver import RouteAdditiveProblem, SideConstraint, SolveStatus, brute_force_oracle, solve_exact

__version__ = "0.1.0"

__all__ = [
    "AdaptiveParams",
    "DomainError",
    "Instance",
    "ModelKind",
    "ModelResult",
    "MomentInfo",
    "Network",
    "ProductSpec",
    "Route",
    "RouteAdditiveProblem",
    "Scenario",
    "ScenarioGenConfig",
    "SideConstraint",
    "SolveStatus",
    "SyntheticConfig",
    "UncertaintyBounds",
    "brute_force_oracle",
    "generate_instance",
    "generate_scenarios",
    "load_instance",
    "experiment_instance",
    "save_instance",
    "solve",
    "solve_exact",
]
