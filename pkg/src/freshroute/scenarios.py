"""Seeded generation of disturbance scenarios and synthetic delivery networks.

Randomness comes from numpy's PCG64 seeded through ``SeedSequence`` with a
spawn key naming what is drawn, so every quantity has its own substream:

* scenario draws: key ``(0, scenario_id, stop)``; the stream yields the delay
  occurrence uniform, the delay magnitude normal, then one ambient normal per
  product in catalog order. Appending products appends draws.
* instance geometry: key ``(1, stop)`` yields radius, angle, nominal delay.
* shelf-life perturbation: key ``(2, product)``.

Changing ``ambient_std`` only rescales the same standard-normal draws, which
is what the sensitivity sweeps rely on for common random numbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from freshroute.domain import (
    Instance,
    MomentInfo,
    Network,
    ProductSpec,
    Scenario,
    UncertaintyBounds,
)
from freshroute.errors import DomainError
from freshroute.kinetics import Q10Params

HOURS_PER_DAY = 24.0


def substream(seed: int, *key: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=key)))


@dataclass(frozen=True)
class ScenarioGenConfig:
    delay_probability: float = 0.2
    delay_mean: float = 0.5  # hours
    delay_std: float = 0.2  # hours
    ambient_std: float = 1.0  # C
    scenario_count: int = 50
    seed: int = 0

    def __post_init__(self):
        if not 0 <= self.delay_probability <= 1:
            raise DomainError("delay_probability must lie in [0, 1]")
        if self.delay_std < 0 or self.ambient_std < 0:
            raise DomainError("standard deviations must be non-negative")
        if self.scenario_count < 1:
            raise DomainError("scenario_count must be at least 1")


def uniform_probabilities(count: int) -> list[float]:
    """``count`` equal weights whose exact sum is 1 (last weight absorbs rounding)."""
    probs = [1.0 / count] * count
    probs[-1] = 1.0 - math.fsum(probs[:-1])
    return probs


def generate_scenarios(config: ScenarioGenConfig, instance: Instance) -> list[Scenario]:
    """Independent delay and ambient-shift scenarios for every stop of ``instance``.

    At each stop a delay happens with probability ``delay_probability``; its
    size is ``max(0, N(delay_mean, delay_std^2))``. Each product sees an
    ambient shift ``N(0, ambient_std^2)`` on the arc into the stop. The
    warehouse row is always zero.
    """
    n, K = instance.node_count, instance.product_count
    probs = uniform_probabilities(config.scenario_count)
    out = []
    for sid in range(config.scenario_count):
        delays = np.zeros(n)
        ambient = np.zeros((n, K))
        for stop in range(1, n):
            rng = substream(config.seed, 0, sid, stop)
            occurs = rng.random() < config.delay_probability
            size = max(0.0, rng.normal(config.delay_mean, config.delay_std))
            delays[stop] = size if occurs else 0.0
            ambient[stop] = rng.normal(0.0, config.ambient_std, size=K)
        out.append(Scenario(sid, probs[sid], delays, ambient))
    return out


def truncated_delay_mean(mean: float, std: float) -> float:
    """E[max(0, X)] for X ~ N(mean, std^2), closed form."""
    if std == 0:
        return max(mean, 0.0)
    from scipy.stats import norm

    a = mean / std
    return mean * norm.cdf(a) + std * norm.pdf(a)


# --------------------------------------------------------- synthetic network


def default_catalog() -> tuple[ProductSpec, ...]:
    """Apples, bananas, tomatoes and strawberries; shelf lives in hours.

    Apple follows the 30 day / 5 C / Q10 = 2 reference point with a 2-8 C
    band. The other three entries are repository defaults chosen to be
    physically plausible; they are not measured values.
    """
    d = HOURS_PER_DAY
    return (
        ProductSpec(0, "apple", 5.0, 2.0, 8.0, 30 * d, 7 * d, 1.0, Q10Params(2.0)),
        ProductSpec(1, "banana", 13.0, 10.0, 16.0, 14 * d, 3 * d, 1.0, Q10Params(2.0)),
        ProductSpec(2, "tomato", 12.0, 9.0, 15.0, 14 * d, 4 * d, 1.0, Q10Params(2.2)),
        ProductSpec(3, "strawberry", 2.0, 0.0, 5.0, 7 * d, 2 * d, 1.0, Q10Params(3.0)),
    )


@dataclass(frozen=True)
class SyntheticConfig:
    stop_count: int = 10
    distance_min: float = 15.0  # km
    distance_max: float = 60.0  # km
    vehicle_speed: float = 40.0  # km/h
    delay_min: float = 0.0  # hours
    delay_max: float = 0.2  # hours
    shelf_perturbation: float = 0.1  # alpha
    product_catalog: tuple[ProductSpec, ...] = field(default_factory=default_catalog)
    seed: int = 0

    def __post_init__(self):
        if self.stop_count < 1:
            raise DomainError("stop_count must be at least 1")
        if not 0 < self.distance_min <= self.distance_max:
            raise DomainError("need 0 < distance_min <= distance_max")
        if not self.vehicle_speed > 0:
            raise DomainError("vehicle_speed must be positive")
        if not 0 <= self.delay_min <= self.delay_max:
            raise DomainError("need 0 <= delay_min <= delay_max")
        if not 0 <= self.shelf_perturbation < 1:
            raise DomainError("shelf_perturbation must lie in [0, 1)")
        object.__setattr__(self, "product_catalog", tuple(self.product_catalog))


def generate_instance(config: SyntheticConfig) -> Instance:
    """Random star-shaped network around the warehouse plus perturbed products.

    Stops sit at a uniform radius ``d_0i`` and uniform angle around the
    warehouse; stop-to-stop distances are Euclidean, so the geometry obeys the
    triangle inequality. Travel time is distance over speed.
    """
    n = config.stop_count + 1
    radius = np.zeros(n)
    angle = np.zeros(n)
    delay = np.zeros(n)
    for stop in range(1, n):
        rng = substream(config.seed, 1, stop)
        radius[stop] = rng.uniform(config.distance_min, config.distance_max)
        angle[stop] = rng.uniform(0.0, 2.0 * math.pi)
        delay[stop] = rng.uniform(config.delay_min, config.delay_max)
    xy = np.column_stack([radius * np.cos(angle), radius * np.sin(angle)])
    distance = np.sqrt(((xy[:, None, :] - xy[None, :, :]) ** 2).sum(axis=2))
    # warehouse legs are exactly the drawn radius
    distance[0, :] = radius
    distance[:, 0] = radius
    np.fill_diagonal(distance, 0.0)
    network = Network(distance / config.vehicle_speed, delay, distance)

    products = []
    alpha = config.shelf_perturbation
    for k, template in enumerate(config.product_catalog):
        eps = substream(config.seed, 2, k).uniform(-alpha, alpha)
        products.append(replace(template, initial_shelf_life=template.initial_shelf_life * (1.0 + eps)))
    return Instance(network, tuple(products))


def attach_uncertainty(instance: Instance, scenarios: list[Scenario], risk_aversion: float = 1.0) -> Instance:
    """Derive every uncertainty block of ``instance`` from one scenario batch.

    The scenario list feeds the stochastic model directly; the box is the
    elementwise envelope of nominal and realized values; the moments are the
    probability-weighted mean and variance of the realized values.
    """
    if not scenarios:
        raise DomainError("need at least one scenario")
    net = instance.network
    p = np.array([s.probability for s in scenarios])
    travel = np.stack([s.realized_travel(net) for s in scenarios])
    delay = np.stack([s.realized_delay(net) for s in scenarios])
    bounds = UncertaintyBounds(
        np.minimum(travel.min(axis=0), net.travel_time),
        np.maximum(travel.max(axis=0), net.travel_time),
        np.minimum(delay.min(axis=0), net.delay),
        np.maximum(delay.max(axis=0), net.delay),
    )
    t_mean = np.tensordot(p, travel, axes=1)
    d_mean = p @ delay
    moments = MomentInfo(
        t_mean,
        np.tensordot(p, (travel - t_mean) ** 2, axes=1),
        d_mean,
        p @ (delay - d_mean) ** 2,
        risk_aversion,
    )
    return replace(instance, bounds=bounds, moments=moments, scenarios=tuple(scenarios))


def degenerate_uncertainty(instance: Instance) -> Instance:
    """Collapse every uncertainty block onto the nominal values."""
    nominal = Scenario.nominal(instance.node_count, instance.product_count)
    return replace(
        instance,
        bounds=UncertaintyBounds.degenerate(instance.network),
        moments=MomentInfo.nominal(instance.network, 0.0),
        scenarios=(nominal,),
    )


def experiment_instance(seed: int, scenario_count: int = 50, risk_aversion: float = 1.0,
                   synthetic: SyntheticConfig | None = None,
                   scenario_config: ScenarioGenConfig | None = None) -> Instance:
    """Ten stops, four products, fifty scenarios: the experimental setup end to end."""
    synthetic = replace(synthetic or SyntheticConfig(), seed=seed)
    scenario_config = replace(scenario_config or ScenarioGenConfig(), seed=seed, scenario_count=scenario_count)
    base = generate_instance(synthetic)
    return attach_uncertainty(base, generate_scenarios(scenario_config, base), risk_aversion)
