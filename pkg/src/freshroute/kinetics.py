"""Shelf-life kinetics: Arrhenius and Q10 temperature laws.

Arrhenius functions take absolute temperatures (Kelvin). Q10 functions take
degrees Celsius, since the Q10 law only uses temperature differences.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from freshroute.errors import DomainError

GAS_CONSTANT = 8.314  # J/(mol K)
KELVIN_OFFSET = 273.15

Q10_TYPICAL_RANGE = (1.5, 3.0)


def celsius_to_kelvin(temperature_c: float) -> float:
    return temperature_c + KELVIN_OFFSET


def kelvin_to_celsius(temperature_k: float) -> float:
    return temperature_k - KELVIN_OFFSET


@dataclass(frozen=True)
class ArrheniusParams:
    preexponential_factor: float  # 1/hour
    activation_energy: float  # J/mol
    gas_constant: float = GAS_CONSTANT

    def __post_init__(self):
        if not self.preexponential_factor > 0:
            raise DomainError("preexponential_factor must be positive")
        if not self.activation_energy > 0:
            raise DomainError("activation_energy must be positive")
        if self.gas_constant != GAS_CONSTANT:
            raise DomainError(f"gas_constant is fixed at {GAS_CONSTANT}")


@dataclass(frozen=True)
class Q10Params:
    q10: float

    def __post_init__(self):
        if not self.q10 > 0:
            raise DomainError("q10 must be positive")
        lo, hi = Q10_TYPICAL_RANGE
        if not lo <= self.q10 <= hi:
            warnings.warn(
                f"Q10={self.q10} is outside the typical range [{lo}, {hi}] for produce",
                stacklevel=3,
            )


@dataclass(frozen=True)
class ShelfLifeRef:
    """Known shelf life ``reference_life`` at ``reference_temperature`` (Kelvin)."""

    reference_life: float
    reference_temperature: float

    def __post_init__(self):
        if not self.reference_life > 0:
            raise DomainError("reference_life must be positive")
        if not self.reference_temperature > 0:
            raise DomainError("reference_temperature must be above absolute zero")

    @classmethod
    def from_celsius(cls, reference_life: float, reference_temperature_c: float) -> "ShelfLifeRef":
        return cls(reference_life, celsius_to_kelvin(reference_temperature_c))

    @property
    def reference_celsius(self) -> float:
        return kelvin_to_celsius(self.reference_temperature)


@dataclass(frozen=True)
class TemperatureProfile:
    """Time-ordered temperature samples; times in hours, temperatures in Celsius."""

    times: tuple[float, ...]
    temperatures: tuple[float, ...]

    def __post_init__(self):
        times = tuple(float(t) for t in self.times)
        temps = tuple(float(t) for t in self.temperatures)
        if len(times) != len(temps):
            raise DomainError("times and temperatures differ in length")
        if not times:
            raise DomainError("temperature profile needs at least one sample")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise DomainError("profile times must be strictly increasing")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "temperatures", temps)

    @classmethod
    def from_samples(cls, samples: Iterable[tuple[float, float]]) -> "TemperatureProfile":
        samples = list(samples)
        return cls(tuple(s[0] for s in samples), tuple(s[1] for s in samples))

    def __len__(self) -> int:
        return len(self.times)

    @property
    def duration(self) -> float:
        return self.times[-1] - self.times[0]


def _check_absolute(temperature: float) -> None:
    if not temperature > 0:
        raise DomainError(f"absolute temperature must be positive, got {temperature}")


def arrhenius_rate(params: ArrheniusParams, temperature: float) -> float:
    """Degradation rate constant k = k0 exp(-Ea / (R T)), T in Kelvin."""
    _check_absolute(temperature)
    return params.preexponential_factor * math.exp(
        -params.activation_energy / (params.gas_constant * temperature)
    )


def arrhenius_shelf_life(ref: ShelfLifeRef, params: ArrheniusParams, temperature: float) -> float:
    """Shelf life at ``temperature`` (Kelvin) scaled from the reference point."""
    _check_absolute(temperature)
    exponent = (params.activation_energy / params.gas_constant) * (
        1.0 / temperature - 1.0 / ref.reference_temperature
    )
    return ref.reference_life * math.exp(exponent)


def q10_shelf_life(ref: ShelfLifeRef, params: Q10Params, temperature: float) -> float:
    """Shelf life at ``temperature`` (Celsius) under the Q10 law.

    Same units as ``ref.reference_life``.
    """
    # both temperatures go through the same Kelvin offset, so T == T0 gives an exact zero exponent
    diff = ref.reference_temperature - celsius_to_kelvin(temperature)
    return ref.reference_life * params.q10 ** (diff / 10.0)


def time_weighted_mean(profile: TemperatureProfile) -> float:
    """Trapezoidal time average of the profile; a single sample returns itself."""
    if len(profile) == 1:
        return profile.temperatures[0]
    t = np.asarray(profile.times)
    y = np.asarray(profile.temperatures)
    area = np.sum(np.diff(t) * (y[:-1] + y[1:]) / 2.0)
    return float(area / (t[-1] - t[0]))


def shelf_life_over_profile(ref: ShelfLifeRef, params: Q10Params, profile: TemperatureProfile) -> float:
    """Q10 shelf life evaluated at the time-weighted mean temperature of ``profile``."""
    if profile is None or len(profile) == 0:
        raise DomainError("empty temperature profile")
    return q10_shelf_life(ref, params, time_weighted_mean(profile))


def shelf_life_by_rate_integration(
    ref: ShelfLifeRef, params: Q10Params, profile: TemperatureProfile
) -> float:
    """Equivalent constant-temperature shelf life from integrating the decay rate.

    The profile is linearly interpolated; the result is the shelf life that would
    consume the same fraction of quality over the profile duration, i.e.
    ``duration / integral(dt / L(T(t)))``. Not used by the experiment pipeline.
    """
    if len(profile) == 1:
        return q10_shelf_life(ref, params, profile.temperatures[0])
    log_q = math.log(params.q10) / 10.0
    t0 = ref.reference_celsius
    consumed = 0.0
    for (ta, ya), (tb, yb) in zip(
        zip(profile.times, profile.temperatures), zip(profile.times[1:], profile.temperatures[1:])
    ):
        # 1/L(T) = Q10^((T - T0)/10) / L0, T linear in time on each segment
        dt = tb - ta
        a, b = log_q * (ya - t0), log_q * (yb - t0)
        if abs(b - a) < 1e-12:
            seg = dt * math.exp(a)
        else:
            seg = dt * (math.exp(b) - math.exp(a)) / (b - a)
        consumed += seg / ref.reference_life
    return profile.duration / consumed

