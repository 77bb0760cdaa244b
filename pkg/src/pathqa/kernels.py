"""Hot numeric kernels with optional numba acceleration.

Each kernel has a pure-numpy implementation and an ``@njit`` twin.  The
numpy path is selected by setting ``PATHQA_NO_NUMBA=1`` in the environment
before import (or when numba is not importable).  Both paths are exercised
by the test suite and compared by ``benchmarks/bench_kernels.py``.
"""

from __future__ import annotations

import os

import numpy as np

USE_NUMBA = os.environ.get("PATHQA_NO_NUMBA", "0") not in ("1", "true", "yes")

if USE_NUMBA:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover - numba is a hard dep in practice
        USE_NUMBA = False

# ---------------------------------------------------------------------------
# Span pair scoring: enumerate all (i, j) with mask[i] & mask[j] and
# i <= j <= i + max_len - 1, scored start[i] + end[j].


def _span_pair_scores_np(start, end, mask, max_len):
    n = start.shape[0]
    idx = np.arange(n)
    ii, jj = np.meshgrid(idx, idx, indexing="ij")
    valid = (jj >= ii) & (jj < ii + max_len) & mask[ii] & mask[jj]
    ii, jj = ii[valid], jj[valid]
    return ii, jj, start[ii] + end[jj]


def _span_pair_scores_loop(start, end, mask, max_len):
    n = start.shape[0]
    cap = n * max_len
    out_i = np.empty(cap, dtype=np.int64)
    out_j = np.empty(cap, dtype=np.int64)
    out_s = np.empty(cap, dtype=np.float64)
    k = 0
    for i in range(n):
        if not mask[i]:
            continue
        hi = min(n, i + max_len)
        for j in range(i, hi):
            if not mask[j]:
                continue
            out_i[k] = i
            out_j[k] = j
            out_s[k] = start[i] + end[j]
            k += 1
    return out_i[:k], out_j[:k], out_s[:k]


# ---------------------------------------------------------------------------
# BERTScore greedy matching over a precomputed token-similarity matrix.


def _greedy_match_np(sim, w_pred, w_ref):
    p = float(np.dot(sim.max(axis=1), w_pred) / w_pred.sum())
    r = float(np.dot(sim.max(axis=0), w_ref) / w_ref.sum())
    return p, r


def _greedy_match_loop(sim, w_pred, w_ref):
    n_pred, n_ref = sim.shape
    p_num = 0.0
    r_best = np.full(n_ref, -np.inf)
    for i in range(n_pred):
        best = -np.inf
        for j in range(n_ref):
            s = sim[i, j]
            if s > best:
                best = s
            if s > r_best[j]:
                r_best[j] = s
        p_num += best * w_pred[i]
    r_num = 0.0
    for j in range(n_ref):
        r_num += r_best[j] * w_ref[j]
    return p_num / w_pred.sum(), r_num / w_ref.sum()


# ---------------------------------------------------------------------------
# Bounded Levenshtein distance over integer code arrays.  Returns
# limit + 1 as soon as the distance provably exceeds `limit`.


def _levenshtein_loop(a, b, limit):
    la, lb = a.shape[0], b.shape[0]
    if abs(la - lb) > limit:
        return limit + 1
    prev = np.arange(lb + 1)
    cur = np.empty(lb + 1, dtype=np.int64)
    for i in range(1, la + 1):
        cur[0] = i
        row_min = cur[0]
        for j in range(1, lb + 1):
            cost = 0 if a[i - 1] == b[j - 1] else 1
            c = prev[j - 1] + cost
            if prev[j] + 1 < c:
                c = prev[j] + 1
            if cur[j - 1] + 1 < c:
                c = cur[j - 1] + 1
            cur[j] = c
            if c < row_min:
                row_min = c
        if row_min > limit:
            return limit + 1
        prev, cur = cur, prev
    d = prev[lb]
    return d if d <= limit else limit + 1


def _levenshtein_np(a, b, limit):
    la, lb = a.shape[0], b.shape[0]
    if abs(la - lb) > limit:
        return limit + 1
    prev = np.arange(lb + 1)
    for i in range(1, la + 1):
        cost = (a[i - 1] != b).astype(np.int64)
        cur = np.empty(lb + 1, dtype=np.int64)
        cur[0] = i
        sub = prev[:-1] + cost
        dele = prev[1:] + 1
        # insertion needs the running value, so scan left to right
        best = np.minimum(sub, dele)
        for j in range(lb):
            v = best[j]
            ins = cur[j] + 1
            cur[j + 1] = v if v < ins else ins
        if cur.min() > limit:
            return limit + 1
        prev = cur
    d = int(prev[lb])
    return d if d <= limit else limit + 1


if USE_NUMBA:
    span_pair_scores = njit(cache=True)(_span_pair_scores_loop)
    greedy_match = njit(cache=True)(_greedy_match_loop)
    levenshtein_bounded = njit(cache=True)(_levenshtein_loop)
else:
    span_pair_scores = _span_pair_scores_np
    greedy_match = _greedy_match_np
    levenshtein_bounded = _levenshtein_np


def levenshtein(a: str, b: str, limit: int) -> int:
    """Bounded edit distance between two strings (limit+1 when exceeded)."""
    ca = np.frombuffer(a.encode("utf-32-le"), dtype=np.uint32).astype(np.int64)
    cb = np.frombuffer(b.encode("utf-32-le"), dtype=np.uint32).astype(np.int64)
    return int(levenshtein_bounded(ca, cb, limit))
