import itertools

import pytest

from geaoi import (
    CostModel,
    GEArrivalScenario,
    GEServiceScenario,
    InfeasibleBudgetError,
    TransitionMatrix,
    ValidationError,
    age,
    age_ge_service,
    average_cost,
)
from geaoi.analytic import exp_moments
from geaoi.optimize import (
    Feasibility,
    classify,
    lemma1_sign_condition,
    log_grid,
    optimal_constrained,
    optimal_unconstrained,
    verify_monotonicity,
)

SVC = GEServiceScenario(1.0, 0.1, 1.0)
ARR = GEArrivalScenario(1.0, 0.1, 1.0)


@pytest.mark.parametrize(
    "c, regime, alpha",
    [(1.8, Feasibility.BINDING, 0.25), (1.2, Feasibility.BINDING, 4.0), (3.0, Feasibility.UNCONSTRAINED, None),
     (2.0, Feasibility.UNCONSTRAINED, None), (1.0, Feasibility.INFEASIBLE, None), (0.5, Feasibility.INFEASIBLE, None)],
)
def test_classify(c, regime, alpha):
    got, a = classify(CostModel(1.0, 2.0, c))
    assert got is regime
    if alpha is None:
        assert a is None
    else:
        assert a == pytest.approx(alpha, rel=1e-12)


@pytest.mark.parametrize("s", [SVC, ARR], ids=["service", "arrival"])
def test_unconstrained(s):
    res = optimal_unconstrained(s, 1e-6)
    assert (res.p_star, res.q_star) == (1 - 1e-6, 1e-6)
    assert not res.attained
    assert abs(res.delta_star - 2.5) < 1e-4
    assert optimal_unconstrained(s, 1e-3).delta_star >= res.delta_star


@pytest.mark.parametrize("eps", [0.0, 0.5, -1e-3])
def test_epsilon_range(eps):
    with pytest.raises(ValidationError):
        optimal_unconstrained(SVC, eps)


@pytest.mark.parametrize("c, corner", [(1.8, (1.0, 0.25)), (1.2, (0.25, 1.0))])
def test_constrained_service_corners(c, corner):
    cm = CostModel(1.0, 2.0, c)
    res = optimal_constrained(SVC, cm, 1e-6)
    assert res.feasibility is Feasibility.BINDING
    assert res.p_star == pytest.approx(corner[0], abs=1e-5)
    assert res.q_star == pytest.approx(corner[1], abs=1e-5)
    assert res.q_star == pytest.approx(res.alpha * res.p_star, rel=1e-12)
    assert average_cost(TransitionMatrix(res.p_star, res.q_star), cm) == pytest.approx(c, abs=1e-9)
    assert res.delta_star == age_ge_service(SVC, TransitionMatrix(res.p_star, res.q_star)).delta
    assert not res.attained and not res.constant_along_line


def test_constrained_service_is_best_on_line():
    cm = CostModel(1.0, 2.0, 1.8)
    res = optimal_constrained(SVC, cm, 1e-6)
    for k in range(1, 50):
        p = k / 50
        assert age(SVC, TransitionMatrix(p, res.alpha * p)).delta >= res.delta_star


def test_constrained_arrival_constant():
    res = optimal_constrained(ARR, CostModel(1.0, 2.0, 1.5))
    assert res.constant_along_line and res.attained and res.tie
    a = age(ARR, TransitionMatrix(0.3, 0.3)).delta
    b = age(ARR, TransitionMatrix(0.9, 0.9)).delta
    assert abs(a - b) <= 1e-12 * a


def test_tie_service():
    res = optimal_constrained(SVC, CostModel(1.0, 2.0, 1.5), 1e-6)
    assert res.tie
    assert (res.p_star, res.q_star) == pytest.approx((1.0, 1.0), abs=1e-5)


def test_budget_at_max_cost_is_unconstrained():
    res = optimal_constrained(SVC, CostModel(1.0, 2.0, 2.0))
    assert res.feasibility is Feasibility.UNCONSTRAINED


def test_infeasible():
    with pytest.raises(InfeasibleBudgetError):
        optimal_constrained(SVC, CostModel(1.0, 2.0, 1.0))


def numeric_dp(s, p, q, h=1e-6):
    f = lambda x: age_ge_service(s, TransitionMatrix(x, q)).delta  # noqa: E731
    return (f(p + h) - f(p - h)) / (2 * h)


@pytest.mark.parametrize("q", [0.01, 0.5, 0.99])
@pytest.mark.parametrize("p", [0.2, 0.6])
def test_sign_condition_is_derivative_numerator(p, q):
    s = GEServiceScenario(0.7, 0.2, 3.0)
    br = age_ge_service(s, TransitionMatrix(p, q))
    den = q * br.ey_b + p * br.ey_g
    expected = numeric_dp(s, p, q) * den**2 / q
    assert lemma1_sign_condition(s, q) == pytest.approx(expected, rel=1e-5)


@pytest.mark.parametrize("q", [0.01, 0.5, 0.99])
def test_sign_condition_examples(q):
    assert lemma1_sign_condition(SVC, q) < 0


def test_second_moment_gap_negative_on_grid():
    # E[Y_b] E[Y_g^2] - E[Y_g] E[Y_b^2] < 0 whenever mu_g > mu_b
    grid = log_grid(0.01, 100, 12)
    for lam, mu_b, mu_g in itertools.product(grid, grid, grid):
        if mu_b >= mu_g:
            continue
        z, sb, sg = exp_moments(lam), exp_moments(mu_b), exp_moments(mu_g)
        ey = lambda s: s[0] + z[0]  # noqa: E731
        ey2 = lambda s: s[1] + 2 * s[0] * z[0] + z[1]  # noqa: E731
        assert ey(sb) * ey2(sg) - ey(sg) * ey2(sb) < 0


def test_sign_condition_rejects_boundary():
    with pytest.raises(ValidationError):
        lemma1_sign_condition(SVC, 1.0)


@pytest.mark.parametrize("s", [SVC, ARR], ids=["service", "arrival"])
def test_monotonicity_grid(s):
    rep = verify_monotonicity(s, 9)
    assert rep.ok
    assert len(rep.points) == 81


def test_monotonicity_report_shape():
    rep = verify_monotonicity(SVC, 3)
    assert sorted((p, q) for p, q, _ in rep.points) == [
        (p, q) for p in (0.25, 0.5, 0.75) for q in (0.25, 0.5, 0.75)
    ]
    with pytest.raises(ValidationError):
        verify_monotonicity(SVC, 2)


def test_monotonicity_detects_violation(monkeypatch):
    import geaoi.optimize as opt

    real = opt.age
    monkeypatch.setattr(opt, "age", lambda s, P: type(real(s, P))(P.p, P.q, 1, 1, 1, 1, delta=P.p))
    rep = verify_monotonicity(SVC, 3)
    assert {v.axis for v in rep.violations} == {"p", "q"}
