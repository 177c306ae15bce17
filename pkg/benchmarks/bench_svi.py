#!/usr/bin/env python3
"""Benchmark the compiled variational kernel against the NumPy fallback.

The fitting loop runs on O(d^2) Gram statistics, so per-step cost is
independent of the row count and interpreter overhead dominates the
pure-Python path.  Usage: python benchmarks/bench_svi.py [--steps N]
"""

import argparse
import math
import time

import numpy as np

from infocontours.backend import available_backends
from infocontours.inference import INIT_LOG_SD


def problem(rng, n, d):
    X = rng.standard_normal((n, d))
    X = (X - X.mean(0)) / X.std(0)
    y = X @ rng.standard_normal(d) + 5.0 + rng.normal(0, 1.0, n)
    return (X.T @ X, X.T @ y, X.sum(0), float(y.sum()), float(y @ y), float(n))


def time_backend(mod, stats, steps, repeats=5):
    args = stats + (0.03, steps, 1.0, 0.0, 2.0, INIT_LOG_SD, 0.0, 0.0)
    best = math.inf
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = mod.svi_adam(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--steps", type=int, default=2000)
    args = parser.parse_args()

    backends = available_backends()
    if "cython" not in backends:
        print("compiled backend not built; only timing the fallback")
    rng = np.random.default_rng(0)
    print(f"{'n':>6} {'d':>4} {'numpy (ms)':>11} {'cython (ms)':>12} "
          f"{'speedup':>8} {'max |mu| diff':>14}")
    for n, d in [(500, 3), (2000, 6), (5000, 10), (5000, 30), (20000, 15)]:
        stats = problem(rng, n, d)
        t_py, out_py = time_backend(backends["numpy"], stats, args.steps)
        if "cython" in backends:
            t_cy, out_cy = time_backend(backends["cython"], stats, args.steps)
            diff = np.abs(out_cy[0] - out_py[0]).max()
            print(f"{n:>6} {d:>4} {t_py * 1e3:>11.1f} {t_cy * 1e3:>12.2f} "
                  f"{t_py / t_cy:>7.1f}x {diff:>14.2e}")
        else:
            print(f"{n:>6} {d:>4} {t_py * 1e3:>11.1f} {'-':>12} {'-':>8} {'-':>14}")


if __name__ == "__main__":
    main()
