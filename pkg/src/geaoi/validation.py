"""Self-checks run by ``geaoi validate``."""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from typing import Callable

from . import analytic, optimize
from .analytic import GEArrivalScenario, GEServiceScenario
from .chain import CostModel, TransitionMatrix, average_cost
from .simulate import SimConfig, simulate_cycles

SERVICE = GEServiceScenario(1.0, 0.1, 1.0)
ARRIVAL = GEArrivalScenario(1.0, 0.1, 1.0)


@dataclass
class Check:
    name: str
    passed: bool
    detail: str


def _rel(a: float, b: float) -> float:
    return abs(a - b) / abs(b)


def check_anchors() -> Check:
    errs = [
        _rel(analytic.age_single_state(1.0, 1.0), 2.5),
        _rel(analytic.age_single_state(1.0, 0.1), 221.0 / 11.0),
        _rel(analytic.age_ge_service(SERVICE, TransitionMatrix(0.5, 0.5)).delta, 185.5 / 13.0),
        _rel(analytic.age_ge_arrival(ARRIVAL, TransitionMatrix(0.5, 0.5)).delta, 127.0 / 13.0),
    ]
    worst = max(errs)
    return Check("anchors", worst <= 1e-12, f"max relative error {worst:.3e}")


def check_boundary_consistency(n: int = 100, seed: int = 0) -> Check:
    rng = random.Random(seed)
    worst = 0.0
    for _ in range(n):
        a = 10 ** rng.uniform(-2, 2)
        lo, hi = sorted(10 ** rng.uniform(-2, 2) for _ in range(2))
        if lo == hi:
            continue
        for s in (GEServiceScenario(a, lo, hi), GEArrivalScenario(a, lo, hi)):
            good = analytic.age(s, TransitionMatrix(1.0, 0.0)).delta
            bad = analytic.age(s, TransitionMatrix(0.0, 1.0)).delta
            worst = max(
                worst,
                _rel(good, analytic.age_single_state(*s.good_baseline())),
                _rel(bad, analytic.age_single_state(*s.bad_baseline())),
            )
    return Check("boundary_consistency", worst <= 1e-12, f"max relative error {worst:.3e}")


def check_ray_invariance() -> Check:
    worst = 0.0
    grid = optimize.open_grid(9)
    for p, q, k in itertools.product(grid, grid, (0.5, 2.0)):
        if k * p > 1.0 or k * q > 1.0:
            continue
        d1 = analytic.age_ge_arrival(ARRIVAL, TransitionMatrix(p, q)).delta
        d2 = analytic.age_ge_arrival(ARRIVAL, TransitionMatrix(k * p, k * q)).delta
        worst = max(worst, _rel(d2, d1))
    return Check("ray_invariance", worst <= 1e-12, f"max relative error {worst:.3e}")


def check_monotonicity() -> Check:
    bad = {s.kind: len(optimize.verify_monotonicity(s, 9).violations) for s in (SERVICE, ARRIVAL)}
    return Check("monotonicity_grid", not any(bad.values()), f"violations {bad}")


def check_range() -> Check:
    failures = 0
    grid = optimize.open_grid(9)
    for s in (SERVICE, ARRIVAL):
        lo = analytic.age_single_state(*s.good_baseline())
        hi = analytic.age_single_state(*s.bad_baseline())
        for p, q in itertools.product(grid, grid):
            d = analytic.age(s, TransitionMatrix(p, q)).delta
            failures += not lo < d < hi
    return Check("range", failures == 0, f"{failures} grid points outside the single-state bounds")


def check_sign_condition() -> Check:
    grid = optimize.log_grid(0.01, 100.0, 10)
    worst = -math.inf
    count = 0
    for lam, mu_b, mu_g in itertools.product(grid, grid, grid):
        if not mu_b < mu_g:
            continue
        s = GEServiceScenario(lam, mu_b, mu_g)
        for q in (0.01, 0.5, 0.99):
            v = optimize.lemma1_sign_condition(s, q)
            worst = max(worst, v)
            count += 1
    return Check("sign_condition", worst < 0.0, f"{count} points, max value {worst:.3e}")


def check_constrained_corners() -> Check:
    problems = []
    for c, corner in ((1.8, (1.0, 0.25)), (1.2, (0.25, 1.0))):
        cm = CostModel(1.0, 2.0, c)
        res = optimize.optimal_constrained(SERVICE, cm)
        if max(abs(res.p_star - corner[0]), abs(res.q_star - corner[1])) > 1e-5:
            problems.append(f"c={c}: got ({res.p_star}, {res.q_star})")
        cost = average_cost(TransitionMatrix(res.p_star, res.q_star), cm)
        if abs(cost - c) > 1e-9:
            problems.append(f"c={c}: cost {cost}")
    res = optimize.optimal_constrained(ARRIVAL, CostModel(1.0, 2.0, 1.5))
    if not res.constant_along_line:
        problems.append("arrival case not flagged constant along line")
    return Check("constrained_corners", not problems, "; ".join(problems) or "ok")


def check_oracle_agreement(cycles: int, replications: int, seed: int, workers: int = 1) -> Check:
    cases = [
        (SERVICE, TransitionMatrix(0.5, 0.5)),
        (SERVICE, TransitionMatrix(0.9, 0.1)),
        (ARRIVAL, TransitionMatrix(0.5, 0.5)),
    ]
    notes = []
    ok = True
    for s, P in cases:
        exact = analytic.age(s, P).delta
        res = simulate_cycles(SimConfig(s, P, cycles, seed, replications), workers=workers)
        z = abs(res.delta_hat - exact) / res.std_error if res.std_error > 0 else math.inf
        ok &= z <= 3.0
        notes.append(f"{s.kind}({P.p},{P.q}): {z:.2f} se")
    return Check("oracle_agreement", ok, ", ".join(notes))


ANALYTIC_CHECKS: list[Callable[[], Check]] = [
    check_anchors,
    check_boundary_consistency,
    check_ray_invariance,
    check_monotonicity,
    check_range,
    check_sign_condition,
    check_constrained_corners,
]


def run_checks(quick: bool, cycles: int, replications: int, seed: int, workers: int = 1) -> list[Check]:
    checks = []
    for fn in ANALYTIC_CHECKS:
        try:
            checks.append(fn())
        except Exception as exc:  # a crashing check is a failing check
            checks.append(Check(fn.__name__.removeprefix("check_"), False, f"error: {exc}"))
    if not quick:
        checks.append(check_oracle_agreement(cycles, replications, seed, workers))
    return checks
