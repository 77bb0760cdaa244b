"""Encoder backends: the numpy-runtime backend plus test doubles."""

from __future__ import annotations

from typing import Protocol

import numpy as np

from ..errors import BackendFailure
from .decode import SpanLogits
from .encode import TokenizedWindow


class EncoderBackend(Protocol):
    def run(self, window: TokenizedWindow) -> SpanLogits: ...


def infer(backend: EncoderBackend, window: TokenizedWindow) -> SpanLogits:
    """Run one window through the backend, validating the logits contract."""
    try:
        logits = backend.run(window)
    except BackendFailure:
        raise
    except Exception as exc:
        raise BackendFailure(f"backend raised: {exc}") from exc
    n = len(window.token_ids)
    if len(logits.start) != n or len(logits.end) != n:
        raise BackendFailure(
            "logit length does not match token count",
            expected=n,
            got=(len(logits.start), len(logits.end)),
        )
    return logits


class InjectedLogitsBackend:
    """Test double returning pre-scripted logits verbatim, in call order."""

    def __init__(self, scripted: list[tuple[np.ndarray, np.ndarray]]):
        self._scripted = list(scripted)
        self.calls = 0

    def run(self, window: TokenizedWindow) -> SpanLogits:
        start, end = self._scripted[self.calls % len(self._scripted)]
        self.calls += 1
        return SpanLogits(start=np.asarray(start, float), end=np.asarray(end, float))


class OracleBackend:
    """Peaks start/end logits at the tokens covering a known gold char span.

    ``gold`` maps (record_id, question_kind) to a (char_start, char_end)
    span in the record's context; the window's ``meta`` carries both keys.
    Windows that do not contain the span get flat zero logits.
    """

    def __init__(self, gold: dict[tuple[str, str], tuple[int, int]], peak: float = 10.0):
        self.gold = dict(gold)
        self.peak = peak

    def run(self, window: TokenizedWindow) -> SpanLogits:
        n = len(window.token_ids)
        start = np.zeros(n)
        end = np.zeros(n)
        key = (window.meta.get("record_id"), window.meta.get("question_kind"))
        span = self.gold.get(key)
        if span is not None:
            s, e = span
            covering = [
                i
                for i, (is_ctx, off) in enumerate(zip(window.context_mask, window.char_offsets))
                if is_ctx and off[1] > s and off[0] < e
            ]
            if covering:
                start[covering[0]] = self.peak
                end[covering[-1]] = self.peak
        return SpanLogits(start=start, end=end)


class NumpyEncoderBackend:
    """Backend over an exported encoder graph run by the numpy runtime."""

    def __init__(self, runtime):
        self.runtime = runtime

    def run(self, window: TokenizedWindow) -> SpanLogits:
        start, end = self.runtime.qa_logits(window.token_ids)
        return SpanLogits(start=start, end=end)
