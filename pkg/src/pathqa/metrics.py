"""Answer scoring: exact match, token-overlap F1 and BERTScore."""

from __future__ import annotations

import hashlib
import re
import string
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import jsonl
from .errors import DimensionMismatch, EmptyInput, EmptySequence
from .kernels import greedy_match

_ARTICLES_RE = re.compile(r"\b(a|an|the)\b")
_PUNCT_TABLE = str.maketrans("", "", string.punctuation)


def normalize_answer(text: str) -> list[str]:
    """Lowercase, strip punctuation, drop articles, split on whitespace."""
    text = text.lower().translate(_PUNCT_TABLE)
    text = _ARTICLES_RE.sub(" ", text)
    return text.split()


def exact_match(pred: str, golds: set[str] | Sequence[str]) -> int:
    if not golds:
        raise ValueError("golds must be non-empty")
    pred_toks = normalize_answer(pred)
    return int(any(pred_toks == normalize_answer(g) for g in golds))


def _f1_single(pred_toks: list[str], gold_toks: list[str]) -> float:
    if not pred_toks and not gold_toks:
        return 1.0
    if not pred_toks or not gold_toks:
        return 0.0
    overlap = sum((Counter(pred_toks) & Counter(gold_toks)).values())
    if overlap == 0:
        return 0.0
    precision = overlap / len(pred_toks)
    recall = overlap / len(gold_toks)
    return 2 * precision * recall / (precision + recall)


def token_f1(pred: str, golds: set[str] | Sequence[str]) -> float:
    if not golds:
        raise ValueError("golds must be non-empty")
    pred_toks = normalize_answer(pred)
    return max(_f1_single(pred_toks, normalize_answer(g)) for g in golds)


# ---------------------------------------------------------------------------
# BERTScore


def _unit_rows(mat: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(mat, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    return mat / norms


def _cosine_matrix(pred: np.ndarray, ref: np.ndarray) -> np.ndarray:
    pred_n, ref_n = _unit_rows(pred), _unit_rows(ref)
    sim = pred_n @ ref_n.T
    # cos of a vector with itself is 1 by definition; float normalization can
    # land one ulp off, so snap exactly-equal nonzero token pairs to 1.0
    identical = (pred_n[:, None, :] == ref_n[None, :, :]).all(axis=-1)
    nonzero = (pred_n != 0).any(axis=1)[:, None] & (ref_n != 0).any(axis=1)[None, :]
    sim[identical & nonzero] = 1.0
    return np.clip(sim, -1.0, 1.0)


def bertscore(
    pred_emb: Sequence[Sequence[float]] | np.ndarray,
    ref_emb: Sequence[Sequence[float]] | np.ndarray,
    pred_weights: Sequence[float] | None = None,
    ref_weights: Sequence[float] | None = None,
) -> tuple[float, float, float]:
    """Greedy token matching over cosine similarity.

    Recall matches each reference token to its best prediction token and
    precision the converse; optional per-token weights (e.g. IDF) rescale
    the averages.  Returns (P, R, F).
    """
    pred = np.atleast_2d(np.asarray(pred_emb, dtype=np.float64))
    ref = np.atleast_2d(np.asarray(ref_emb, dtype=np.float64))
    if pred.size == 0 or ref.size == 0:
        raise EmptySequence("bertscore needs at least one token per side")
    if pred.shape[1] != ref.shape[1]:
        raise DimensionMismatch(
            "embedding dimensions differ", pred=pred.shape[1], ref=ref.shape[1]
        )
    w_pred = (
        np.ones(pred.shape[0]) if pred_weights is None else np.asarray(pred_weights, float)
    )
    w_ref = np.ones(ref.shape[0]) if ref_weights is None else np.asarray(ref_weights, float)
    if w_pred.shape[0] != pred.shape[0] or w_ref.shape[0] != ref.shape[0]:
        raise DimensionMismatch("weight length does not match token count")
    p, r = greedy_match(_cosine_matrix(pred, ref), w_pred, w_ref)
    f = 0.0 if p + r == 0 else 2 * p * r / (p + r)
    return float(p), float(r), float(f)


# ---------------------------------------------------------------------------
# Embedding backends

_WORD_RE = re.compile(r"\w+|[^\w\s]")


class HashEmbedder:
    """Deterministic test embedder: token -> fixed hash-derived unit vector."""

    def __init__(self, dim: int = 32):
        self.dim = dim

    def _vector(self, token: str) -> np.ndarray:
        digest = hashlib.sha256(token.encode("utf-8")).digest()
        seed = int.from_bytes(digest[:8], "little")
        rng = np.random.default_rng(seed)
        v = rng.standard_normal(self.dim)
        return v / np.linalg.norm(v)

    def embed(self, text: str) -> np.ndarray:
        tokens = _WORD_RE.findall(text.lower())
        if not tokens:
            raise EmptySequence("cannot embed empty text")
        return np.stack([self._vector(t) for t in tokens])


class EncoderEmbedder:
    """Contextual embeddings from an exported encoder bundle."""

    def __init__(self, runtime, tokenizer):
        self.runtime = runtime
        self.tokenizer = tokenizer

    def embed(self, text: str) -> np.ndarray:
        ids, _ = self.tokenizer.encode_text(text)
        if not ids:
            raise EmptySequence("cannot embed empty text")
        ids = [self.tokenizer.cls_id, *ids, self.tokenizer.sep_id]
        hidden = self.runtime.hidden_states(ids)
        return hidden[1:-1]  # drop special positions


def embed(text: str, embedder) -> np.ndarray:
    return embedder.embed(text)


# ---------------------------------------------------------------------------
# Aggregation and reporting


@dataclass
class ExampleScore:
    record_id: str
    question_kind: str
    exact: int
    token_f1: float
    bert_p: float
    bert_r: float
    bert_f: float


@dataclass
class MetricsReport:
    model_name: str
    exact_match_pct: float
    macro_f1: float
    f1_bert: float
    n_examples: int
    per_example: list[ExampleScore] = field(default_factory=list)


def score_example(
    record_id: str,
    question_kind: str,
    pred: str,
    golds: Sequence[str],
    embedder,
) -> ExampleScore:
    em = exact_match(pred, golds)
    f1 = token_f1(pred, golds)
    best = (0.0, 0.0, 0.0)
    for gold in golds:
        try:
            p, r, f = bertscore(embed(pred, embedder), embed(gold, embedder))
        except EmptySequence:
            p = r = f = 1.0 if not pred.strip() and not gold.strip() else 0.0
        if f >= best[2]:
            best = (p, r, f)
    return ExampleScore(
        record_id=record_id,
        question_kind=question_kind,
        exact=em,
        token_f1=f1,
        bert_p=best[0],
        bert_r=best[1],
        bert_f=best[2],
    )


def aggregate(scores: Sequence[ExampleScore], model_name: str) -> MetricsReport:
    if not scores:
        raise EmptyInput("no example scores to aggregate")
    n = len(scores)
    return MetricsReport(
        model_name=model_name,
        exact_match_pct=100.0 * sum(s.exact for s in scores) / n,
        macro_f1=sum(s.token_f1 for s in scores) / n,
        f1_bert=sum(s.bert_f for s in scores) / n,
        n_examples=n,
        per_example=list(scores),
    )


def render_table(reports: Sequence[MetricsReport]) -> str:
    """Fixed-width table: model, exact match, macro-F1, F1-BERT."""
    header = ("Language Models", "Exact match", "Macro-Averaged F1", "F1_BERT")
    rows = [header]
    for r in reports:
        rows.append(
            (r.model_name, f"{r.exact_match_pct:.2f}%", f"{r.macro_f1:.2f}", f"{r.f1_bert:.2f}")
        )
    widths = [max(len(row[c]) for row in rows) for c in range(4)]
    lines = []
    for i, row in enumerate(rows):
        lines.append("  ".join(cell.ljust(widths[c]) for c, cell in enumerate(row)).rstrip())
        if i == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def write_report(report: MetricsReport, report_path: str | Path, detail_path: str | Path) -> None:
    jsonl.write_records(
        report_path,
        [
            {
                "model_name": report.model_name,
                "exact_match_pct": report.exact_match_pct,
                "macro_f1": report.macro_f1,
                "f1_bert": report.f1_bert,
                "n_examples": report.n_examples,
            }
        ],
    )
    jsonl.write_records(
        detail_path,
        (
            {
                "record_id": s.record_id,
                "question_kind": s.question_kind,
                "exact": s.exact,
                "token_f1": s.token_f1,
                "bert_p": s.bert_p,
                "bert_r": s.bert_r,
                "bert_f": s.bert_f,
            }
            for s in report.per_example
        ),
    )


def read_report(path: str | Path) -> MetricsReport:
    rec = next(iter(jsonl.read_records(path)))
    return MetricsReport(
        model_name=rec["model_name"],
        exact_match_pct=rec["exact_match_pct"],
        macro_f1=rec["macro_f1"],
        f1_bert=rec["f1_bert"],
        n_examples=rec["n_examples"],
    )
