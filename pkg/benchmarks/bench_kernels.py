#!/usr/bin/env python3
"""Time the hot kernels and the end-to-end rolling harness on both paths.

The compiled path is whatever the current process dispatches to (numba unless
ISSUEFORECAST_DISABLE_NUMBA is set); the pure path is each kernel's original
Python function. Run:

    python benchmarks/bench_kernels.py            # compiled vs pure
    ISSUEFORECAST_DISABLE_NUMBA=1 python benchmarks/bench_kernels.py
"""

import argparse
import time

import numpy as np

from issueforecast import kernels
from issueforecast.evaluation import WindowConfig, rolling_eval
from issueforecast.synth import generate_project

LAMBDAS = np.array([(k - 20) / 10.0 for k in range(41)])


def timeit(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(3):
        start = time.perf_counter()
        for _ in range(repeat):
            fn()
        best = min(best, (time.perf_counter() - start) / repeat)
    return best


def bench_kernels(repeat: int) -> None:
    rng = np.random.default_rng(0)
    window = rng.uniform(1.0, 40.0, size=20)
    walk = np.cumsum(rng.normal(size=20)) + 30.0
    phi = np.array([0.4, 0.2])
    seed = window[-2:]

    cases = [
        ("acf(20, lag 6)", kernels.acf_kernel, (window, 6)),
        ("boxcox_llf(20 x 41)", kernels.boxcox_llf_kernel, (window, LAMBDAS)),
        ("lag_ols(20, p=2)", kernels.lag_ols_kernel, (window, 2)),
        ("adf_ols(20, lags=1)", kernels.adf_ols_kernel, (walk, 1)),
        ("ar_recursion(h=4)", kernels.ar_recursion_kernel, (phi, 0.5, seed, 4)),
    ]
    print(f"{'kernel':<22}{'dispatched':>14}{'pure':>14}{'speedup':>10}")
    for name, kernel, args in cases:
        kernel(*args)  # compile / warm
        fast = timeit(lambda: kernel(*args), repeat)
        plain = kernels.pure(kernel)
        slow = timeit(lambda: plain(*args), max(repeat // 20, 1))
        ratio = slow / fast if fast > 0 else float("inf")
        print(f"{name:<22}{fast * 1e6:>12.2f}us{slow * 1e6:>12.2f}us{ratio:>9.1f}x")


def bench_harness() -> None:
    bundle = generate_project("bench", seed=1, weeks=120)
    config = WindowConfig()
    rolling_eval(bundle.bugs, None, config)  # warm everything
    start = time.perf_counter()
    result = rolling_eval(bundle.bugs, None, config)
    elapsed = time.perf_counter() - start
    print(
        f"\nrolling_eval(120 weeks, {result.steps} windows): "
        f"{elapsed * 1e3:.1f} ms  ({elapsed / result.steps * 1e3:.2f} ms/window)"
    )


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=2000, help="iterations per kernel timing")
    args = parser.parse_args()
    mode = "numba" if kernels.NUMBA_ENABLED else "pure python"
    print(f"dispatch mode: {mode}\n")
    bench_kernels(args.repeat)
    bench_harness()


if __name__ == "__main__":
    main()
