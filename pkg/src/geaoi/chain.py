"""Two-state (bad/good) event-triggered Markov chain."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import ValidationError


class State(enum.IntEnum):
    BAD = 0
    GOOD = 1


def _check_probability(name: str, value: float) -> None:
    if not (isinstance(value, (int, float)) and math.isfinite(value)):
        raise ValidationError(f"{name} must be a finite number, got {value!r}")
    if not 0.0 <= value <= 1.0:
        raise ValidationError(f"{name} must lie in [0, 1], got {value!r}")


@dataclass(frozen=True)
class TransitionMatrix:
    """Transition probabilities ``p`` (bad -> good) and ``q`` (good -> bad).

    The closed interval [0, 1] is admitted for both so that limit points such
    as ``(1, 0)`` can be evaluated; ``p = q = 0`` is rejected because the chain
    then has no unique stationary distribution.
    """

    p: float
    q: float

    def __post_init__(self) -> None:
        _check_probability("p", self.p)
        _check_probability("q", self.q)
        if self.p + self.q <= 0.0:
            raise ValidationError(
                "p = q = 0: chain has no unique stationary distribution"
            )

    def as_array(self) -> list[list[float]]:
        return [[1.0 - self.p, self.p], [self.q, 1.0 - self.q]]


@dataclass(frozen=True)
class StationaryDist:
    pi_b: float
    pi_g: float


@dataclass(frozen=True)
class CostModel:
    """Per-unit-time operating cost in each state and the overall budget."""

    c_b: float
    c_g: float
    c: float

    def __post_init__(self) -> None:
        for name in ("c_b", "c_g", "c"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v)):
                raise ValidationError(f"{name} must be a finite number, got {v!r}")
        if not 0.0 <= self.c_b <= self.c_g:
            raise ValidationError(
                f"costs must satisfy 0 <= c_b <= c_g, got c_b={self.c_b}, c_g={self.c_g}"
            )


def stationary_distribution(P: TransitionMatrix) -> StationaryDist:
    pi_b = P.q / (P.p + P.q)
    # 1 - pi_b keeps pi_b + pi_g == 1 exactly
    return StationaryDist(pi_b=pi_b, pi_g=1.0 - pi_b)


def next_state(s: State, P: TransitionMatrix, u: float) -> State:
    """Advance the chain one step using the uniform draw ``u`` in [0, 1)."""
    if s == State.BAD:
        return State.GOOD if u < P.p else State.BAD
    return State.BAD if u < P.q else State.GOOD


def average_cost(P: TransitionMatrix, cm: CostModel) -> float:
    pi = stationary_distribution(P)
    return pi.pi_b * cm.c_b + pi.pi_g * cm.c_g
