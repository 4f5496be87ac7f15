"""Compare the compiled and numpy cycle kernels.

    python benchmarks/bench_kernel.py [--cycles N] [--repeat R]

Reports kernel-only throughput (uniforms pre-generated) and end-to-end
``simulate_cycles`` time, where random-number generation is included.
"""

import argparse
import time

import numpy as np

from geaoi import GEServiceScenario, SimConfig, TransitionMatrix, simulate_cycles
from geaoi import simulate as sim
from geaoi._kernel_py import ACC_SIZE


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--cycles", type=int, default=10**6)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)

    u = np.random.default_rng(0).random((args.cycles + 1, 3))
    params = (0.5, 0.5, 0.1, 1.0, 1.0, 1.0)
    cfg = SimConfig(GEServiceScenario(1.0, 0.1, 1.0), TransitionMatrix(0.5, 0.5), args.cycles, 0, 1)
    previous = sim.get_backend()
    print(f"{'backend':<8} {'kernel ns/cycle':>16} {'end-to-end ns/cycle':>20} {'delta_hat':>12}")
    try:
        for name in sim.available_backends():
            run_chunk = sim._BACKENDS[name]
            kernel = best_of(lambda: run_chunk(u, args.cycles, 0, *params, np.zeros(ACC_SIZE)), args.repeat)
            sim.set_backend(name)
            result = {}
            total = best_of(lambda: result.setdefault("r", simulate_cycles(cfg)), args.repeat)
            print(
                f"{name:<8} {kernel / args.cycles * 1e9:>16.1f} {total / args.cycles * 1e9:>20.1f}"
                f" {result['r'].delta_hat:>12.6f}"
            )
    finally:
        sim.set_backend(previous)


if __name__ == "__main__":
    main()
