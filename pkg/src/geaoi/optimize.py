"""Age-optimal transition matrices, with and without an average-cost budget."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

from .analytic import GEArrivalScenario, GEServiceScenario, Scenario, age, exp_moments
from .chain import CostModel, TransitionMatrix
from .errors import InfeasibleBudgetError, ValidationError

DEFAULT_EPSILON = 1e-6


class Feasibility(enum.Enum):
    UNCONSTRAINED = "unconstrained"
    BINDING = "binding"
    INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class OptimResult:
    """Optimal (or supremum-approaching) transition matrix.

    ``attained`` is False when the optimum sits on the open boundary of
    (0, 1)^2 and the returned point is only epsilon away from it.
    """

    p_star: float
    q_star: float
    delta_star: float
    attained: bool
    feasibility: Feasibility
    constant_along_line: bool = False
    alpha: Optional[float] = None
    tie: bool = False


def classify(cm: CostModel) -> tuple[Feasibility, Optional[float]]:
    """Feasibility regime of a budget, with the line slope alpha when binding."""
    if cm.c >= cm.c_g:
        return Feasibility.UNCONSTRAINED, None
    if cm.c <= cm.c_b:
        return Feasibility.INFEASIBLE, None
    return Feasibility.BINDING, (cm.c_g - cm.c) / (cm.c - cm.c_b)


def _check_epsilon(epsilon: float) -> None:
    if not 0.0 < epsilon < 0.5:
        raise ValidationError(f"epsilon must lie in (0, 0.5), got {epsilon!r}")


def optimal_unconstrained(scenario: Scenario, epsilon: float = DEFAULT_EPSILON) -> OptimResult:
    # age decreases in p and increases in q: approach (1, 0)
    _check_epsilon(epsilon)
    p, q = 1.0 - epsilon, epsilon
    return OptimResult(
        p_star=p,
        q_star=q,
        delta_star=age(scenario, TransitionMatrix(p, q)).delta,
        attained=False,
        feasibility=Feasibility.UNCONSTRAINED,
    )


def optimal_constrained(
    scenario: Scenario, cm: CostModel, epsilon: float = DEFAULT_EPSILON
) -> OptimResult:
    """Minimize age subject to ``pi_b c_b + pi_g c_g <= c``.

    The optimum lies on the budget line ``q = alpha p``.  With modulated
    service the age falls along the line as ``p`` grows, so the answer is the
    far corner ``p = min(1, 1/alpha)``, pulled in by ``epsilon``.  With
    modulated sampling the age is constant on the line; the same corner is
    returned as a canonical representative.
    """
    _check_epsilon(epsilon)
    regime, alpha = classify(cm)
    if regime is Feasibility.UNCONSTRAINED:
        return optimal_unconstrained(scenario, epsilon)
    if regime is Feasibility.INFEASIBLE:
        raise InfeasibleBudgetError(
            f"budget c={cm.c} does not exceed the cheapest state cost c_b={cm.c_b}"
        )
    p = min(1.0, 1.0 / alpha) * (1.0 - epsilon)
    q = alpha * p
    arrival = isinstance(scenario, GEArrivalScenario)
    return OptimResult(
        p_star=p,
        q_star=q,
        delta_star=age(scenario, TransitionMatrix(p, q)).delta,
        attained=arrival,
        feasibility=Feasibility.BINDING,
        constant_along_line=arrival,
        alpha=alpha,
        tie=alpha == 1.0,
    )


def lemma1_sign_condition(s: GEServiceScenario, q: float) -> float:
    """Numerator of d(age)/dp for modulated service, up to the positive factor q.

    It does not depend on ``p``; a negative value means the age decreases in p.
    """
    if not 0.0 < q < 1.0:
        raise ValidationError(f"q must lie in (0, 1), got {q!r}")
    sb, sg, z = exp_moments(s.mu_b), exp_moments(s.mu_g), exp_moments(s.lam)
    ey_b, ey_g = sb[0] + z[0], sg[0] + z[0]
    ey2_b = sb[1] + 2.0 * sb[0] * z[0] + z[1]
    ey2_g = sg[1] + 2.0 * sg[0] * z[0] + z[1]
    return (
        0.5 * ey_b * ey2_g
        - 0.5 * ey_g * ey2_b
        + ey_b * (sg[0] - sb[0]) * ((1.0 - q) * ey_g + q * ey_b)
    )


@dataclass(frozen=True)
class Violation:
    axis: str  # "p" (age should decrease) or "q" (age should increase)
    fixed: float
    lo: float
    hi: float
    delta_lo: float
    delta_hi: float


@dataclass
class MonotonicityReport:
    points: list[tuple[float, float, float]] = field(default_factory=list)
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def open_grid(n: int) -> list[float]:
    """``n`` evenly spaced points strictly inside (0, 1)."""
    return [round(k / (n + 1), 15) for k in range(1, n + 1)]


def verify_monotonicity(scenario: Scenario, grid_resolution: int = 9) -> MonotonicityReport:
    """Check strict decrease in p (fixed q) and strict increase in q (fixed p) on a grid."""
    if grid_resolution < 3:
        raise ValidationError("grid_resolution must be at least 3")
    grid = open_grid(grid_resolution)
    table = {(p, q): age(scenario, TransitionMatrix(p, q)).delta for p in grid for q in grid}
    report = MonotonicityReport(points=[(p, q, d) for (p, q), d in table.items()])
    for a, b in zip(grid, grid[1:]):
        for other in grid:
            d_a, d_b = table[(a, other)], table[(b, other)]
            if not d_b < d_a:
                report.violations.append(Violation("p", other, a, b, d_a, d_b))
            d_a, d_b = table[(other, a)], table[(other, b)]
            if not d_b > d_a:
                report.violations.append(Violation("q", other, a, b, d_a, d_b))
    return report


def log_grid(lo: float, hi: float, n: int) -> list[float]:
    return [math.exp(math.log(lo) + (math.log(hi) - math.log(lo)) * k / (n - 1)) for k in range(n)]
