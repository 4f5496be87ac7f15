import math

import numpy as np
import pytest

import oracles
from geaoi import (
    GEArrivalScenario,
    GEServiceScenario,
    SimConfig,
    State,
    TransitionMatrix,
    ValidationError,
    age,
    simulate_area_paper_partition,
    simulate_cycles,
    stationary_distribution,
    trajectory,
)
from geaoi import simulate as sim

SVC = GEServiceScenario(1.0, 0.1, 1.0)
ARR = GEArrivalScenario(1.0, 0.1, 1.0)


def within(res, exact, k=3.0):
    return abs(res.delta_hat - exact) <= k * res.std_error


@pytest.mark.parametrize(
    "cfg",
    [
        dict(num_cycles=0),
        dict(replications=0),
        dict(seed=-1),
        dict(seed=2**64),
        dict(num_cycles=1.5),
    ],
)
def test_config_validation(cfg):
    with pytest.raises(ValidationError):
        SimConfig(SVC, TransitionMatrix(0.5, 0.5), **cfg)


def test_trapezoid_needs_two_cycles():
    with pytest.raises(ValidationError):
        simulate_area_paper_partition(SimConfig(SVC, TransitionMatrix(0.5, 0.5), num_cycles=1))


def test_trajectory_empty():
    assert trajectory(SimConfig(SVC, TransitionMatrix(0.5, 0.5)), 0) == []


def test_trajectory_deterministic_and_cumulative():
    cfg = SimConfig(ARR, TransitionMatrix(0.3, 0.4), seed=11)
    a, b = trajectory(cfg, 200), trajectory(cfg, 200)
    assert a == b
    prev = 0.0
    for rec in a:
        assert rec.service + rec.wait > 0
        assert rec.t == pytest.approx(prev + rec.service + rec.wait, rel=1e-15)
        prev = rec.t


@pytest.mark.parametrize("scenario", [SVC, ARR], ids=["service", "arrival"])
def test_kernel_matches_direct_age_integral(backend, scenario):
    """Kernel sums agree with integrating the age curve of the exported path."""
    n = 500
    cfg = SimConfig(scenario, TransitionMatrix(0.3, 0.6), num_cycles=n, seed=5, replications=1)
    recs = trajectory(cfg, n + 1)
    acc = sim.run_replications(cfg)[0]
    area, span = oracles.age_curve_area(recs[:n], recs[n].service)
    assert acc[2] == pytest.approx(area, rel=1e-12)
    assert acc[3] == pytest.approx(span, rel=1e-12)
    total_y = sum(r.service + r.wait for r in recs[:n])
    trap = sum(
        0.5 * (r.service + r.wait) ** 2 + (r.service + r.wait) * nxt.service for r, nxt in zip(recs[:n], recs[1:])
    )
    assert acc[1] == pytest.approx(total_y, rel=1e-12)
    assert acc[0] == pytest.approx(trap, rel=1e-12)
    assert acc[6] == sum(r.state == State.BAD for r in recs[:n])


def test_chunking_does_not_change_stream(backend):
    cfg = SimConfig(SVC, TransitionMatrix(0.2, 0.3), num_cycles=10_000, seed=3, replications=2)
    a = sim.run_replications(cfg, chunk_rows=1 << 16)
    b = sim.run_replications(cfg, chunk_rows=777)
    for x, y in zip(a, b):
        np.testing.assert_allclose(x, y, rtol=1e-12)


def test_determinism(backend):
    cfg = SimConfig(SVC, TransitionMatrix(0.5, 0.5), num_cycles=20_000, seed=42, replications=4)
    assert simulate_cycles(cfg) == simulate_cycles(cfg)
    assert simulate_cycles(cfg, workers=3) == simulate_cycles(cfg)


def test_replications_independent():
    cfg = SimConfig(SVC, TransitionMatrix(0.5, 0.5), num_cycles=1000, seed=42, replications=3)
    est = [r.delta_hat for r in simulate_cycles(cfg).per_replication]
    assert len(set(est)) == 3


def test_result_shape():
    cfg = SimConfig(SVC, TransitionMatrix(0.5, 0.5), num_cycles=1000, seed=1, replications=3)
    res = simulate_cycles(cfg)
    assert res.cycles_total == 3000
    assert res.sim_time_total == pytest.approx(sum(r.time for r in res.per_replication))
    assert res.delta_hat == pytest.approx(np.mean([r.delta_hat for r in res.per_replication]))
    single = simulate_cycles(SimConfig(SVC, TransitionMatrix(0.5, 0.5), num_cycles=1000, replications=1))
    assert single.std_error == 0.0


def test_fixed_initial_state():
    cfg = SimConfig(SVC, TransitionMatrix(0.01, 0.01), num_cycles=1, replications=1, initial_state=State.GOOD)
    assert trajectory(cfg, 1)[0].state is State.GOOD


@pytest.mark.parametrize(
    "scenario, P, reps",
    [
        (SVC, TransitionMatrix(1 - 1e-9, 1e-9), 8),
        (SVC, TransitionMatrix(0.5, 0.5), 8),
        (SVC, TransitionMatrix(0.9, 0.1), 8),
        (ARR, TransitionMatrix(0.5, 0.5), 8),
    ],
)
def test_matches_analytic(scenario, P, reps):
    res = simulate_cycles(SimConfig(scenario, P, 10**6, 0, reps))
    exact = age(scenario, P).delta
    assert within(res, exact)
    assert res.std_error / exact < 0.01


def test_trapezoid_matches_analytic():
    P = TransitionMatrix(0.5, 0.5)
    res = simulate_area_paper_partition(SimConfig(SVC, P, 10**6, 0, 8))
    assert within(res, 185.5 / 13)


def test_trapezoid_tied_arrival_baseline():
    s = GEArrivalScenario.with_tied_rates(1.0, 1.0)
    res = simulate_area_paper_partition(SimConfig(s, TransitionMatrix(0.3, 0.8), 10**6, 0, 8))
    assert within(res, 2.5)


def test_partitions_agree_up_to_boundary():
    cfg = SimConfig(SVC, TransitionMatrix(0.5, 0.5), 10**5, 9, 1)
    a = simulate_cycles(cfg)
    b = simulate_area_paper_partition(cfg)
    bound = max(a.max_cycle_area, b.max_cycle_area) / b.sim_time_total
    assert abs(a.delta_hat - b.delta_hat) <= bound


@pytest.mark.parametrize("P", [TransitionMatrix(0.2, 0.6), TransitionMatrix(0.7, 0.05)])
def test_state_occupancy(P):
    res = simulate_cycles(SimConfig(SVC, P, 10**6, 2, 1))
    pi_b = stationary_distribution(P).pi_b
    r = 1 - P.p - P.q
    sigma = math.sqrt(pi_b * (1 - pi_b) / 10**6 * (1 + r) / (1 - r))
    assert abs(res.bad_fraction - pi_b) < 3 * sigma


def test_set_backend_rejects_unknown():
    with pytest.raises(ValueError):
        sim.set_backend("fortran")
