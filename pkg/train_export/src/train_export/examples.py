"""Training examples assembled from the pipeline's corpus and split files.

This package talks to the inference pipeline only through its file
schemas: the line-delimited corpus (records with gold labels and char
spans), the split file, and the bundle directory it exports.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

# The two fixed questions; must match the inference side verbatim so the
# fine-tuned model sees identical question-context pairs.
QUESTIONS = {
    "broad": "Which cancer is mentioned?",
    "subtype": "What is the specific cancer type?",
}


class MissingSpan(ValueError):
    """A record selected for training carries no gold char-span."""

    def __init__(self, record_id: str, question_kind: str):
        super().__init__(f"record {record_id!r} has no gold span for {question_kind!r}")
        self.record_id = record_id
        self.question_kind = question_kind


@dataclass(frozen=True)
class TrainingExample:
    record_id: str
    question_kind: str  # broad | subtype
    question: str
    context: str
    answer_start: int
    answer_text: str

    @property
    def answer_end(self) -> int:
        return self.answer_start + len(self.answer_text)


def _read_jsonl(path: str | Path):
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                yield json.loads(line)


def prepare_training_examples(
    corpus_path: str | Path,
    splits_path: str | Path,
    split: str = "train",
) -> list[TrainingExample]:
    """Two (question, context, answer) examples per record of the split."""
    wanted = {rec["record_id"] for rec in _read_jsonl(splits_path) if rec["split"] == split}
    examples = []
    for rec in _read_jsonl(corpus_path):
        if rec["id"] not in wanted:
            continue
        for kind, span_key, label_key in (
            ("broad", "broad_span", "broad_label"),
            ("subtype", "subtype_span", "subtype_label"),
        ):
            span = rec.get(span_key)
            if not span:
                raise MissingSpan(rec["id"], kind)
            start, end = span
            examples.append(
                TrainingExample(
                    record_id=rec["id"],
                    question_kind=kind,
                    question=QUESTIONS[kind],
                    context=rec["context"],
                    answer_start=start,
                    answer_text=rec["context"][start:end],
                )
            )
    return examples
