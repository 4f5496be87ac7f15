"""Closed-form time-average age for blocking servers with Gilbert-Elliot modulation.

Both scenarios share the same ratio form

    delta = (q * E[Q_b] + p * E[Q_g]) / (q * E[Y_b] + p * E[Y_g])

where ``E[Q_x]`` is the expected age area of an update cycle that starts in
state ``x`` and ``E[Y_x]`` its expected length.  Only the per-state terms differ
between modulated service and modulated sampling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

from .chain import TransitionMatrix
from .errors import ValidationError


def _check_rate(name: str, value: float) -> None:
    if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
        raise ValidationError(f"{name} must be a positive finite rate, got {value!r}")


def exp_moments(rate: float) -> tuple[float, float]:
    """Mean and second moment of an exponential variable with the given rate."""
    _check_rate("rate", rate)
    return 1.0 / rate, 2.0 / (rate * rate)


def _sum_second_moment(x: tuple[float, float], z: tuple[float, float]) -> float:
    # E[(X + Z)^2] for independent X, Z
    return x[1] + 2.0 * x[0] * z[0] + z[1]


@dataclass(frozen=True)
class GEServiceScenario:
    """Poisson arrivals at rate ``lam``; service rate ``mu_b`` or ``mu_g`` by state."""

    lam: float
    mu_b: float
    mu_g: float

    def __post_init__(self) -> None:
        _check_rate("lambda", self.lam)
        _check_rate("mu_b", self.mu_b)
        _check_rate("mu_g", self.mu_g)
        if not self.mu_b < self.mu_g:
            raise ValidationError(
                f"service rates must satisfy mu_b < mu_g, got mu_b={self.mu_b}, mu_g={self.mu_g}"
            )

    @classmethod
    def with_tied_rates(cls, lam: float, mu: float) -> "GEServiceScenario":
        """Test-only constructor with ``mu_b == mu_g``; the chain becomes irrelevant."""
        _check_rate("lambda", lam)
        _check_rate("mu", mu)
        obj = object.__new__(cls)
        object.__setattr__(obj, "lam", lam)
        object.__setattr__(obj, "mu_b", mu)
        object.__setattr__(obj, "mu_g", mu)
        return obj

    kind = "ge-service"

    def state_rates(self) -> tuple[float, float, float, float]:
        """(service_b, service_g, arrival_b, arrival_g) rates."""
        return self.mu_b, self.mu_g, self.lam, self.lam

    def good_baseline(self) -> tuple[float, float]:
        return self.lam, self.mu_g

    def bad_baseline(self) -> tuple[float, float]:
        return self.lam, self.mu_b

    def scaled(self, k: float) -> "GEServiceScenario":
        if self.mu_b == self.mu_g:
            return type(self).with_tied_rates(self.lam * k, self.mu_b * k)
        return type(self)(self.lam * k, self.mu_b * k, self.mu_g * k)


@dataclass(frozen=True)
class GEArrivalScenario:
    """Service rate ``mu``; sampling rate ``lam_b`` or ``lam_g`` by state."""

    mu: float
    lam_b: float
    lam_g: float

    def __post_init__(self) -> None:
        _check_rate("mu", self.mu)
        _check_rate("lambda_b", self.lam_b)
        _check_rate("lambda_g", self.lam_g)
        if not self.lam_b < self.lam_g:
            raise ValidationError(
                "arrival rates must satisfy lambda_b < lambda_g, "
                f"got lambda_b={self.lam_b}, lambda_g={self.lam_g}"
            )

    @classmethod
    def with_tied_rates(cls, mu: float, lam: float) -> "GEArrivalScenario":
        """Test-only constructor with ``lam_b == lam_g``."""
        _check_rate("mu", mu)
        _check_rate("lambda", lam)
        obj = object.__new__(cls)
        object.__setattr__(obj, "mu", mu)
        object.__setattr__(obj, "lam_b", lam)
        object.__setattr__(obj, "lam_g", lam)
        return obj

    kind = "ge-arrival"

    def state_rates(self) -> tuple[float, float, float, float]:
        return self.mu, self.mu, self.lam_b, self.lam_g

    def good_baseline(self) -> tuple[float, float]:
        return self.lam_g, self.mu

    def bad_baseline(self) -> tuple[float, float]:
        return self.lam_b, self.mu

    def scaled(self, k: float) -> "GEArrivalScenario":
        if self.lam_b == self.lam_g:
            return type(self).with_tied_rates(self.mu * k, self.lam_b * k)
        return type(self)(self.mu * k, self.lam_b * k, self.lam_g * k)


Scenario = Union[GEServiceScenario, GEArrivalScenario]


@dataclass(frozen=True)
class AgeBreakdown:
    p: float
    q: float
    eq_b: float
    eq_g: float
    ey_b: float
    ey_g: float
    delta: float


def _ratio(p: float, q: float, eq_b: float, eq_g: float, ey_b: float, ey_g: float) -> float:
    num = q * eq_b + p * eq_g
    den = q * ey_b + p * ey_g
    return num / den


def service_terms(s: GEServiceScenario, p: float, q: float) -> tuple[float, float, float, float]:
    """Per-state expectations (E[Q_b], E[Q_g], E[Y_b], E[Y_g]) under modulated service."""
    sb = exp_moments(s.mu_b)
    sg = exp_moments(s.mu_g)
    z = exp_moments(s.lam)
    # expected service time of the next packet, given the current state
    next_after_b = p * sg[0] + (1.0 - p) * sb[0]
    next_after_g = q * sb[0] + (1.0 - q) * sg[0]
    ey_b = sb[0] + z[0]
    ey_g = sg[0] + z[0]
    eq_b = 0.5 * _sum_second_moment(sb, z) + ey_b * next_after_b
    eq_g = 0.5 * _sum_second_moment(sg, z) + ey_g * next_after_g
    return eq_b, eq_g, ey_b, ey_g


def arrival_terms(s: GEArrivalScenario) -> tuple[float, float, float, float]:
    """Per-state expectations under modulated sampling; independent of (p, q)."""
    sv = exp_moments(s.mu)
    zb = exp_moments(s.lam_b)
    zg = exp_moments(s.lam_g)
    eq_b = 0.5 * _sum_second_moment(sv, zb) + sv[0] ** 2 + sv[0] * zb[0]
    eq_g = 0.5 * _sum_second_moment(sv, zg) + sv[0] ** 2 + sv[0] * zg[0]
    return eq_b, eq_g, sv[0] + zb[0], sv[0] + zg[0]


def age_ge_service(s: GEServiceScenario, P: TransitionMatrix) -> AgeBreakdown:
    terms = service_terms(s, P.p, P.q)
    return AgeBreakdown(P.p, P.q, *terms, delta=_ratio(P.p, P.q, *terms))


def age_ge_arrival(s: GEArrivalScenario, P: TransitionMatrix) -> AgeBreakdown:
    terms = arrival_terms(s)
    return AgeBreakdown(P.p, P.q, *terms, delta=_ratio(P.p, P.q, *terms))


def age(s: Scenario, P: TransitionMatrix) -> AgeBreakdown:
    """Dispatch to the formula matching the scenario type."""
    if isinstance(s, GEServiceScenario):
        return age_ge_service(s, P)
    if isinstance(s, GEArrivalScenario):
        return age_ge_arrival(s, P)
    raise TypeError(f"unknown scenario type {type(s).__name__}")


def age_single_state(lam: float, mu: float) -> float:
    """Average age of the unmodulated M/M/1 queue with blocking."""
    _check_rate("lambda", lam)
    _check_rate("mu", mu)
    return 1.0 / lam + 2.0 / mu - 1.0 / (lam + mu)


def age_on_line(s: Scenario, alpha: float, p: float) -> float:
    """Age along the budget line ``q = alpha * p`` as a function of ``p`` alone."""
    if not (math.isfinite(alpha) and alpha > 0):
        raise ValidationError(f"alpha must be positive, got {alpha!r}")
    p_max = min(1.0, 1.0 / alpha)
    if not 0.0 < p <= p_max * (1.0 + 1e-12):
        raise ValidationError(f"p must lie in (0, {p_max}], got {p!r}")
    q = min(alpha * p, 1.0)
    if isinstance(s, GEServiceScenario):
        eq_b, eq_g, ey_b, ey_g = service_terms(s, p, q)
    else:
        eq_b, eq_g, ey_b, ey_g = arrival_terms(s)
    return (alpha * eq_b + eq_g) / (alpha * ey_b + ey_g)
