#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Usage: python benchmarks/bench_kernels.py [--sizes 50,100,200,400] [--repeats 5]

The numpy path is what you get with TASKWEB_NUMBA=0; the numba path is the
default. Triple counting is O(n^3) and is where numba pays off; the pivot
scorer is O(n^2) and stays close to numpy until n gets large.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from taskweb._kernels import nb_backend, np_backend


def problem(rng, n):
    scores = rng.normal(scale=0.05, size=(n, n))
    present = rng.random(size=(n, n)) < 0.8
    np.fill_diagonal(present, False)
    f_vals = rng.normal(size=n)
    thresholds = np.array([0.0, 0.01, 0.02, 0.04])
    return scores, present, f_vals, thresholds


def best_of(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--sizes", default="50,100,200,400")
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    rng = np.random.default_rng(0)
    # warm up the JIT so compile time is not measured
    s, p, f, th = problem(rng, 8)
    nb_backend.transitive_counts(s, p, th)
    nb_backend.pivot_scores(s, p, f, 0.5)

    header = f"{'n':>6} {'kernel':<18} {'numpy':>12} {'numba':>12} {'speedup':>9}"
    print(header)
    print("-" * len(header))
    for n in sizes:
        scores, present, f_vals, thresholds = problem(rng, n)

        t_np = best_of(lambda: np_backend.transitive_counts(scores, present, thresholds),
                       args.repeats)
        t_nb = best_of(lambda: nb_backend.transitive_counts(scores, present, thresholds),
                       args.repeats)
        agree = np.array_equal(
            np_backend.transitive_counts(scores, present, thresholds)[0],
            nb_backend.transitive_counts(scores, present, thresholds)[0],
        )
        assert agree
        print(f"{n:>6} {'transitive_counts':<18} {t_np * 1e3:>10.2f}ms "
              f"{t_nb * 1e3:>10.2f}ms {t_np / t_nb:>8.1f}x")

        t_np = best_of(lambda: np_backend.pivot_scores(scores, present, f_vals, 0.5),
                       args.repeats)
        t_nb = best_of(lambda: nb_backend.pivot_scores(scores, present, f_vals, 0.5),
                       args.repeats)
        print(f"{n:>6} {'pivot_scores':<18} {t_np * 1e3:>10.2f}ms "
              f"{t_nb * 1e3:>10.2f}ms {t_np / t_nb:>8.1f}x")


if __name__ == "__main__":
    main()
