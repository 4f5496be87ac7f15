"""Seeded Monte Carlo estimate of the time-average age.

The simulator works at cycle level: after a delivery the server waits an
exponential residual time for the next admitted packet, so arrivals that are
blocked during service never need to be generated.  The modulation state is
advanced once per cycle, when a packet enters service.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from . import _kernel_py
from .analytic import Scenario, GEArrivalScenario, GEServiceScenario
from .chain import State, TransitionMatrix, next_state, stationary_distribution
from .errors import ValidationError

try:
    from ._kernel import run_chunk as _compiled_run_chunk
except ImportError:  # pragma: no cover - depends on the build
    _compiled_run_chunk = None

_BACKENDS = {"python": _kernel_py.run_chunk}
if _compiled_run_chunk is not None:
    _BACKENDS["cython"] = _compiled_run_chunk

_backend = "cython" if _compiled_run_chunk is not None else "python"

CHUNK_ROWS = 1 << 16


def available_backends() -> list[str]:
    return sorted(_BACKENDS)


def get_backend() -> str:
    return _backend


def set_backend(name: str) -> None:
    """Select the cycle kernel ("cython" or "python")."""
    global _backend
    if name not in _BACKENDS:
        raise ValueError(f"backend {name!r} not available; have {available_backends()}")
    _backend = name


@dataclass(frozen=True)
class SimConfig:
    """One Monte Carlo experiment.

    ``initial_state=None`` draws the first state from the stationary
    distribution; pass a :class:`State` to pin it.
    """

    scenario: Scenario
    P: TransitionMatrix
    num_cycles: int = 10**6
    seed: int = 0
    replications: int = 8
    initial_state: Optional[State] = None

    def __post_init__(self) -> None:
        if not isinstance(self.scenario, (GEServiceScenario, GEArrivalScenario)):
            raise ValidationError(f"unsupported scenario {self.scenario!r}")
        if isinstance(self.num_cycles, bool) or not isinstance(self.num_cycles, int) or self.num_cycles < 1:
            raise ValidationError(f"num_cycles must be a positive integer, got {self.num_cycles!r}")
        if isinstance(self.replications, bool) or not isinstance(self.replications, int) or self.replications < 1:
            raise ValidationError(f"replications must be a positive integer, got {self.replications!r}")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise ValidationError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")


class Replication(NamedTuple):
    delta_hat: float
    cycles: int
    time: float


@dataclass(frozen=True)
class SimResult:
    delta_hat: float
    std_error: float
    cycles_total: int
    sim_time_total: float
    per_replication: tuple[Replication, ...]
    bad_fraction: float
    max_cycle_area: float


class CycleRecord(NamedTuple):
    t: float
    service: float
    wait: float
    state: State


def replication_rng(seed: int, r: int) -> np.random.Generator:
    """Independent Philox substream for replication ``r``."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(r,))))


def _initial_state(cfg: SimConfig, u0: float) -> int:
    if cfg.initial_state is not None:
        return int(cfg.initial_state)
    return int(State.BAD) if u0 < stationary_distribution(cfg.P).pi_b else int(State.GOOD)


def _run_replication(cfg: SimConfig, r: int, run_chunk, chunk_rows: int) -> np.ndarray:
    rng = replication_rng(cfg.seed, r)
    state = _initial_state(cfg, rng.random())
    svc_b, svc_g, arr_b, arr_g = cfg.scenario.state_rates()
    acc = np.zeros(_kernel_py.ACC_SIZE)
    remaining = cfg.num_cycles + 1  # trailing row closes the last cycle
    while remaining > 0:
        m = min(chunk_rows, remaining)
        u = rng.random((m, 3))
        remaining -= m
        n_full = m - 1 if remaining == 0 else m
        state = run_chunk(u, n_full, state, cfg.P.p, cfg.P.q, svc_b, svc_g, arr_b, arr_g, acc)
    return acc


def run_replications(cfg: SimConfig, workers: int = 1, chunk_rows: int = CHUNK_ROWS) -> list[np.ndarray]:
    """Raw accumulator arrays, one per replication, in replication order."""
    run_chunk = _BACKENDS[_backend]
    if workers <= 1 or cfg.replications == 1:
        return [_run_replication(cfg, r, run_chunk, chunk_rows) for r in range(cfg.replications)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda r: _run_replication(cfg, r, run_chunk, chunk_rows), range(cfg.replications)))


def _aggregate(accs: list[np.ndarray], area_idx: int, time_idx: int, max_idx: int) -> SimResult:
    reps = tuple(
        Replication(float(a[area_idx] / a[time_idx]), int(a[7]), float(a[time_idx])) for a in accs
    )
    est = np.array([rep.delta_hat for rep in reps])
    n = len(reps)
    std_error = float(est.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    cycles = sum(rep.cycles for rep in reps)
    return SimResult(
        delta_hat=float(est.mean()),
        std_error=std_error,
        cycles_total=cycles,
        sim_time_total=float(sum(rep.time for rep in reps)),
        per_replication=reps,
        bad_fraction=float(sum(a[6] for a in accs) / cycles),
        max_cycle_area=float(max(a[max_idx] for a in accs)),
    )


def simulate_cycles(cfg: SimConfig, workers: int = 1) -> SimResult:
    """Sawtooth estimator: area and time accumulated between consecutive deliveries."""
    return _aggregate(run_replications(cfg, workers), 2, 3, 5)


def simulate_area_paper_partition(cfg: SimConfig, workers: int = 1) -> SimResult:
    """Estimator built from per-cycle trapezoids ``Y_j^2/2 + Y_j S_{j+1}`` over ``sum Y_j``."""
    if cfg.num_cycles < 2:
        raise ValidationError("the trapezoid partition needs num_cycles >= 2")
    return _aggregate(run_replications(cfg, workers), 0, 1, 4)


def trajectory(cfg: SimConfig, max_cycles: int) -> list[CycleRecord]:
    """Per-cycle sample path of replication 0, drawn from the same stream as the kernels."""
    if max_cycles <= 0:
        return []
    rng = replication_rng(cfg.seed, 0)
    state = State(_initial_state(cfg, rng.random()))
    svc_b, svc_g, arr_b, arr_g = cfg.scenario.state_rates()
    u = rng.random((max_cycles, 3))
    out = []
    t = 0.0
    for u_s, u_z, u_t in u.tolist():
        bad = state == State.BAD
        service = -math.log1p(-u_s) / (svc_b if bad else svc_g)
        wait = -math.log1p(-u_z) / (arr_b if bad else arr_g)
        t += service + wait
        out.append(CycleRecord(t, service, wait, state))
        state = next_state(state, cfg.P, u_t)
    return out
