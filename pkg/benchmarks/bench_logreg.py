#!/usr/bin/env python3
"""Benchmark the logistic-regression training kernel: numba JIT vs pure numpy.

The search-based tuner performs hundreds of fits per run, so this loop is the
package's hot path. Run:

    python benchmarks/bench_logreg.py [--rows N] [--features D] [--epochs E]

The kernel backend is normally chosen at import time via COTUNE_NUMBA; here
both implementations are loaded explicitly so one process can time the two
paths side by side and report their numeric agreement.
"""

import argparse
import time

import numpy as np

from cotune._kernels import _train_logistic_jit_impl, train_logistic_numpy


def time_fn(fn, args, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--rows", type=int, default=5600)
    parser.add_argument("--features", type=int, default=6)
    parser.add_argument("--epochs", type=int, default=300)
    parser.add_argument("--repeats", type=int, default=10)
    args = parser.parse_args()

    try:
        from numba import njit
    except ImportError:
        raise SystemExit("numba is not installed; nothing to compare")
    jit_train = njit(cache=True)(_train_logistic_jit_impl)

    rng = np.random.default_rng(0)
    X = rng.normal(size=(args.rows, args.features))
    y = (rng.random(args.rows) < 0.4).astype(np.float64)
    fit_args = (X, y, 0.1, args.epochs, 1e-4)

    t0 = time.perf_counter()
    w_nb, b_nb, losses_nb = jit_train(*fit_args)
    compile_time = time.perf_counter() - t0
    w_np, b_np, losses_np = train_logistic_numpy(*fit_args)

    t_nb = time_fn(jit_train, fit_args, args.repeats)
    t_np = time_fn(train_logistic_numpy, fit_args, args.repeats)

    print(f"problem: {args.rows} rows x {args.features} features, {args.epochs} epochs")
    print(f"numba   {t_nb * 1e3:8.2f} ms/fit   (first call incl. compile: {compile_time:.2f} s)")
    print(f"numpy   {t_np * 1e3:8.2f} ms/fit")
    print(f"speedup {t_np / t_nb:8.2f}x")
    print(f"agreement: max|dw|={np.abs(w_nb - w_np).max():.2e}  |db|={abs(b_nb - b_np):.2e}  "
          f"max|dloss|={np.abs(losses_nb - losses_np).max():.2e}")


if __name__ == "__main__":
    main()
