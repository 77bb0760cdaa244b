"""Independent brute-force oracles used to check the fast paths.

Deliberately naive: plain Python loops and per-pair cosine formulas, no
shared code with the implementations they verify.
"""

from __future__ import annotations

import math


def best_span_bruteforce(start, end, mask, max_answer_tokens):
    """Exhaustive top-1 over all valid (i, j): ties to smaller i, then j."""
    best = None
    n = len(start)
    for i in range(n):
        if not mask[i]:
            continue
        for j in range(i, min(n, i + max_answer_tokens)):
            if not mask[j]:
                continue
            score = start[i] + end[j]
            if best is None or score > best[2]:
                best = (i, j, score)
    return best


def all_spans_bruteforce(start, end, mask, max_answer_tokens):
    out = []
    n = len(start)
    for i in range(n):
        if not mask[i]:
            continue
        for j in range(i, min(n, i + max_answer_tokens)):
            if mask[j]:
                out.append((i, j, start[i] + end[j]))
    out.sort(key=lambda t: (-t[2], t[0], t[1]))
    return out


def _cosine(u, v):
    du = math.sqrt(sum(x * x for x in u))
    dv = math.sqrt(sum(x * x for x in v))
    if du == 0 or dv == 0:
        return 0.0
    return sum(a * b for a, b in zip(u, v)) / (du * dv)


def bertscore_bruteforce(pred, ref, w_pred=None, w_ref=None):
    """Full pairwise cosine matrix, row/column maxima, weighted means."""
    w_pred = [1.0] * len(pred) if w_pred is None else list(w_pred)
    w_ref = [1.0] * len(ref) if w_ref is None else list(w_ref)
    sim = [[_cosine(p, r) for r in ref] for p in pred]
    p_val = sum(w * max(row) for w, row in zip(w_pred, sim)) / sum(w_pred)
    r_val = (
        sum(w_ref[j] * max(sim[i][j] for i in range(len(pred))) for j in range(len(ref)))
        / sum(w_ref)
    )
    f_val = 0.0 if p_val + r_val == 0 else 2 * p_val * r_val / (p_val + r_val)
    return p_val, r_val, f_val


def levenshtein_bruteforce(a: str, b: str) -> int:
    rows = [list(range(len(b) + 1))]
    for i, ca in enumerate(a, 1):
        row = [i]
        for j, cb in enumerate(b, 1):
            row.append(
                min(rows[i - 1][j - 1] + (ca != cb), rows[i - 1][j] + 1, row[j - 1] + 1)
            )
        rows.append(row)
    return rows[len(a)][len(b)]
