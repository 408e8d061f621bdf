"""Timing comparison of the numba and pure-numpy Monte Carlo kernels.

Runs the tilted-walk and norm-product kernels on identical inputs with
both backends and prints a small table.  Numba warm-up (JIT compilation)
is excluded from the timings.

Usage: python bench/benchmark_kernels.py [--samples N] [--steps N]
"""

import argparse
import time

import numpy as np

from rmatld import _kernels_numpy, rng
from rmatld.model import MatrixModel
from rmatld.spectral import solve_spectral

FIB2 = {
    "dimension": 2,
    "generators": [[[2.0, 1.0], [1.0, 1.0]], [[1.0, 1.0], [1.0, 2.0]]],
    "weights": [0.5, 0.5],
}


def _time(fn, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--samples", type=int, default=100_000)
    parser.add_argument("--steps", type=int, default=80)
    args = parser.parse_args()

    try:
        from rmatld import _kernels_numba
        backends = {"numpy": _kernels_numpy, "numba": _kernels_numba}
    except ImportError:
        print("numba unavailable; timing the numpy backend only")
        backends = {"numpy": _kernels_numpy}

    model = MatrixModel.from_dict(FIB2)
    data = solve_spectral(model, 1.0, N=512)
    uni = rng.chunk_uniforms(1, 0, args.samples, args.steps)
    cumw = np.cumsum(model.weights)

    jobs = {
        "walk_batch": lambda impl: impl.walk_batch(
            model.generators, model.weights, data.s, data.log_kappa, data.r_s,
            0.7, uni, 0.0, 0.0, data.r_s, False),
        "kappa_batch": lambda impl: impl.kappa_batch(
            model.generators, cumw, 1, uni),
    }

    print(f"samples={args.samples} steps={args.steps}")
    print(f"{'kernel':<12} {'backend':<8} {'seconds':>9} {'Msteps/s':>9}")
    results = {}
    for job_name, job in jobs.items():
        for name, impl in backends.items():
            job(impl)  # warm-up (JIT compile / cache touch)
            seconds = _time(lambda: job(impl))
            rate = args.samples * args.steps / seconds / 1e6
            results[(job_name, name)] = seconds
            print(f"{job_name:<12} {name:<8} {seconds:9.3f} {rate:9.1f}")
        if len(backends) == 2:
            speedup = (results[(job_name, 'numpy')]
                       / results[(job_name, 'numba')])
            print(f"{job_name:<12} speedup numba/numpy: {speedup:.1f}x")


if __name__ == "__main__":
    main()
