"""Benchmark the numba kernels against their pure-numpy fallbacks.

Usage: python3 benchmarks/bench_kernels.py [--repeats N]

Each kernel is timed on realistic input sizes (QA windows of 384 tokens,
embedding matrices around 50x768, lexicon-sized edit-distance pairs).  The
numba variants are warmed once before timing so JIT compilation is not
counted.
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np
from numba import njit

from pathqa import kernels


def bench(name, fn, args, repeats):
    fn(*args)  # warm-up (JIT compile / cache touch)
    t = min(timeit.repeat(lambda: fn(*args), number=repeats, repeat=3)) / repeats
    print(f"  {name:<12} {t * 1e6:10.1f} us/call")
    return t


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=200)
    args = parser.parse_args()
    rng = np.random.default_rng(0)

    jit_span = njit(cache=True)(kernels._span_pair_scores_loop)
    jit_match = njit(cache=True)(kernels._greedy_match_loop)
    jit_lev = njit(cache=True)(kernels._levenshtein_loop)

    n = 384
    start, end = rng.normal(size=n), rng.normal(size=n)
    mask = rng.random(n) < 0.9
    print(f"span_pair_scores (n={n}, max_len=30)")
    t_np = bench("numpy", kernels._span_pair_scores_np, (start, end, mask, 30), args.repeats)
    t_nb = bench("numba", jit_span, (start, end, mask, 30), args.repeats)
    print(f"  speedup      {t_np / t_nb:10.2f}x\n")

    sim = rng.normal(size=(48, 64))
    w_pred, w_ref = np.abs(rng.normal(size=48)) + 0.1, np.abs(rng.normal(size=64)) + 0.1
    print("greedy_match (48x64 similarity)")
    t_np = bench("numpy", kernels._greedy_match_np, (sim, w_pred, w_ref), args.repeats)
    t_nb = bench("numba", jit_match, (sim, w_pred, w_ref), args.repeats)
    print(f"  speedup      {t_np / t_nb:10.2f}x\n")

    a = rng.integers(97, 123, size=18).astype(np.int64)
    b = a.copy()
    b[5], b[11] = b[11], b[5]
    print("levenshtein_bounded (len 18, limit 2)")
    t_np = bench("numpy", kernels._levenshtein_np, (a, b, 2), args.repeats)
    t_nb = bench("numba", jit_lev, (a, b, 2), args.repeats)
    print(f"  speedup      {t_np / t_nb:10.2f}x")


if __name__ == "__main__":
    main()
