"""Additive start+end span decoding with a length cap."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import NoValidSpan
from ..kernels import span_pair_scores
from .encode import TokenizedWindow


@dataclass
class SpanLogits:
    start: np.ndarray
    end: np.ndarray


@dataclass(frozen=True)
class AnswerCandidate:
    text: str
    char_span: tuple[int, int]
    score: float
    window_index: int


def decode_span(
    logits: SpanLogits,
    window: TokenizedWindow,
    context: str,
    max_answer_tokens: int = 30,
    n_best: int = 1,
) -> list[AnswerCandidate]:
    """Top spans by start[i] + end[j] over valid context positions.

    Valid pairs satisfy i <= j <= i + max_answer_tokens - 1 with both ends
    on context tokens; ties go to the smaller start, then smaller end.
    """
    if max_answer_tokens < 1 or n_best < 1:
        raise ValueError("max_answer_tokens and n_best must be >= 1")
    mask = np.asarray(window.context_mask, dtype=np.bool_)
    if not mask.any():
        raise NoValidSpan("window has no context tokens", window=window.window_index)
    start = np.asarray(logits.start, dtype=np.float64)
    end = np.asarray(logits.end, dtype=np.float64)
    ii, jj, scores = span_pair_scores(start, end, mask, max_answer_tokens)
    order = np.lexsort((jj, ii, -scores))[:n_best]
    out = []
    for k in order:
        i, j = int(ii[k]), int(jj[k])
        c0 = window.char_offsets[i][0]
        c1 = window.char_offsets[j][1]
        out.append(
            AnswerCandidate(
                text=context[c0:c1],
                char_span=(c0, c1),
                score=float(scores[k]),
                window_index=window.window_index,
            )
        )
    return out


def merge_windows(candidates: list[AnswerCandidate], n_best: int = 1) -> list[AnswerCandidate]:
    """Deduplicate by char span (max score wins), re-rank, keep n_best."""
    best: dict[tuple[int, int], AnswerCandidate] = {}
    for cand in candidates:
        cur = best.get(cand.char_span)
        if cur is None or cand.score > cur.score:
            best[cand.char_span] = cand
    ranked = sorted(best.values(), key=lambda c: (-c.score, c.char_span[0], c.char_span[1]))
    return ranked[:n_best]
