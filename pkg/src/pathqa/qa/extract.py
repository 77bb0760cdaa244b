"""Per-record answer extraction for the two fixed questions."""

from __future__ import annotations

from dataclasses import dataclass

from ..corpus import BROAD, SUBTYPE, CorpusRecord
from ..errors import PipelineError
from .backend import EncoderBackend, infer
from .decode import AnswerCandidate, decode_span, merge_windows
from .encode import encode

QUESTIONS = {
    BROAD: "Which cancer is mentioned?",
    SUBTYPE: "What is the specific cancer type?",
}


def build_query(kind: str) -> str:
    try:
        return QUESTIONS[kind]
    except KeyError:
        raise ValueError(f"unknown question kind {kind!r}") from None


@dataclass
class QaConfig:
    max_seq_len: int = 384
    stride: int = 128
    max_answer_tokens: int = 30
    n_best: int = 20


def extract(
    record: CorpusRecord,
    backend: EncoderBackend,
    tokenizer,
    config: QaConfig | None = None,
) -> dict[str, AnswerCandidate]:
    """Top answer candidate per question kind for one record."""
    config = config or QaConfig()
    answers: dict[str, AnswerCandidate] = {}
    for kind in (BROAD, SUBTYPE):
        try:
            windows = encode(
                build_query(kind),
                record.context,
                tokenizer,
                max_seq_len=config.max_seq_len,
                stride=config.stride,
            )
            candidates = []
            for window in windows:
                window.meta.update(record_id=record.id, question_kind=kind)
                logits = infer(backend, window)
                candidates.extend(
                    decode_span(
                        logits,
                        window,
                        record.context,
                        max_answer_tokens=config.max_answer_tokens,
                        n_best=config.n_best,
                    )
                )
            answers[kind] = merge_windows(candidates, n_best=1)[0]
        except PipelineError as exc:
            exc.details.setdefault("record_id", record.id)
            exc.details.setdefault("question_kind", kind)
            raise
    return answers
