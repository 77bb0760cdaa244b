"""Labeled corpus, two-level cancer ontology, weak-label localization and
deterministic dataset splitting."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

from . import jsonl
from .errors import DuplicateName, EmptyInput, MissingGold, OrphanSubtype

BROAD = "broad"
SUBTYPE = "subtype"


def normalize_name(name: str) -> str:
    return " ".join(name.lower().split())


def normalize_for_lookup(name: str) -> str:
    """Ontology lookup normalization: also strips punctuation."""
    cleaned = re.sub(r"[^\w\s]", " ", name.lower())
    return " ".join(cleaned.split())


@dataclass(frozen=True)
class OntologyNode:
    id: str
    name: str
    level: str  # broad | subtype
    parent_id: str | None = None


@dataclass(frozen=True)
class IcdOTriplet:
    cancer_type_code: str
    topography_code: str
    morphology_code: str


class Ontology:
    """Two-level vocabulary: broad cancer types and their subtypes."""

    def __init__(self, nodes: Sequence[OntologyNode]):
        self.nodes: dict[str, OntologyNode] = {}
        self._by_name: dict[str, list[OntologyNode]] = {}
        seen_names: dict[tuple[str, str], str] = {}
        for node in nodes:
            if node.level not in (BROAD, SUBTYPE):
                raise ValueError(f"unknown ontology level {node.level!r}")
            key = (node.level, normalize_name(node.name))
            if key in seen_names:
                raise DuplicateName(
                    f"ontology name {node.name!r} collides at level {node.level}",
                    node_id=node.id,
                    other_id=seen_names[key],
                )
            seen_names[key] = node.id
            self.nodes[node.id] = node
        for node in self.nodes.values():
            if node.level == SUBTYPE:
                parent = self.nodes.get(node.parent_id or "")
                if parent is None or parent.level != BROAD:
                    raise OrphanSubtype(
                        f"subtype {node.name!r} has no broad parent", node_id=node.id,
                        parent_id=node.parent_id,
                    )
            elif node.parent_id:
                raise ValueError(f"broad node {node.id} must not have a parent")
            self._by_name.setdefault(normalize_for_lookup(node.name), []).append(node)

    def __len__(self) -> int:
        return len(self.nodes)

    def lookup(self, text: str) -> OntologyNode | None:
        """Exact match on the normalized name; subtype wins name collisions."""
        candidates = self._by_name.get(normalize_for_lookup(text))
        if not candidates:
            return None
        return min(candidates, key=lambda n: (n.level != SUBTYPE, n.id))

    def terms(self) -> list[str]:
        return [n.name for n in self.nodes.values()]

    def token_vocabulary(self) -> frozenset[str]:
        """All lowercase word tokens of ontology names (spell-check lexicon)."""
        tokens: set[str] = set()
        for node in self.nodes.values():
            tokens.update(normalize_for_lookup(node.name).split())
        return frozenset(tokens)


def load_ontology(path: str | Path) -> Ontology:
    nodes = [
        OntologyNode(
            id=rec["id"],
            name=rec["name"],
            level=rec["level"],
            parent_id=rec.get("parent_id"),
        )
        for rec in jsonl.read_records(path)
    ]
    return Ontology(nodes)


def save_ontology(path: str | Path, ontology: Ontology) -> int:
    records = []
    for node in ontology.nodes.values():
        rec = {"id": node.id, "name": node.name, "level": node.level}
        if node.parent_id is not None:
            rec["parent_id"] = node.parent_id
        records.append(rec)
    return jsonl.write_records(path, records)


def map_to_ontology(answer: str, ontology: Ontology) -> OntologyNode | None:
    return ontology.lookup(answer)


# ---------------------------------------------------------------------------
# Corpus records and weak-label localization


@dataclass
class CorpusRecord:
    id: str
    context: str
    broad_label: str
    subtype_label: str
    label_source: str  # exact_match | manual
    broad_span: tuple[int, int] | None = None
    subtype_span: tuple[int, int] | None = None
    icdo: IcdOTriplet | None = None

    def gold_answer(self, kind: str) -> str:
        return self.broad_label if kind == BROAD else self.subtype_label

    def gold_span(self, kind: str) -> tuple[int, int] | None:
        return self.broad_span if kind == BROAD else self.subtype_span


def localize_label(context: str, label: str) -> tuple[int, int] | None:
    """Leftmost case-insensitive occurrence of the label, tolerating runs of
    whitespace inside the context where the label has single spaces."""
    if not label:
        raise ValueError("label must be non-empty")
    parts = [re.escape(tok) for tok in label.split()]
    if not parts:
        return None
    pattern = re.compile(r"\s+".join(parts), re.IGNORECASE)
    m = pattern.search(context)
    if m is None:
        return None
    return (m.start(), m.end())


def build_corpus(
    chunks: Sequence,
    gold: dict[str, tuple[str, str, IcdOTriplet | None]],
) -> list[CorpusRecord]:
    """Pair chunks with gold labels, localizing exact-match spans.

    ``gold`` maps chunk id to (broad_label, subtype_label, icdo).  Records
    whose labels cannot both be localized are flagged ``manual``; their
    spans arrive later through the annotation sidecar.
    """
    records = []
    for chunk in chunks:
        if chunk.id not in gold:
            raise MissingGold(f"no gold entry for chunk {chunk.id}", chunk_id=chunk.id)
        broad_label, subtype_label, icdo = gold[chunk.id]
        broad_span = localize_label(chunk.text, broad_label)
        subtype_span = localize_label(chunk.text, subtype_label)
        source = "exact_match" if broad_span and subtype_span else "manual"
        records.append(
            CorpusRecord(
                id=chunk.id,
                context=chunk.text,
                broad_label=broad_label,
                subtype_label=subtype_label,
                label_source=source,
                broad_span=broad_span if source == "exact_match" else None,
                subtype_span=subtype_span if source == "exact_match" else None,
                icdo=icdo,
            )
        )
    return records


def apply_annotations(records: Sequence[CorpusRecord], path: str | Path) -> None:
    """Fill manual records' spans from the annotation sidecar file."""
    by_id = {r.id: r for r in records}
    for rec in jsonl.read_records(path):
        record = by_id.get(rec["record_id"])
        if record is None:
            continue
        span = (int(rec["char_start"]), int(rec["char_end"]))
        if rec["question_kind"] == BROAD:
            record.broad_span = span
        else:
            record.subtype_span = span


# ---------------------------------------------------------------------------
# Deterministic splitting: splitmix64-driven Fisher-Yates shuffle, so the
# permutation is reproducible across platforms and implementations.

_MASK = (1 << 64) - 1


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def bounded(self, n: int) -> int:
        return self.next_u64() % n


def shuffled_indices(n: int, seed: int) -> list[int]:
    rng = SplitMix64(seed)
    idx = list(range(n))
    for i in range(n - 1, 0, -1):
        j = rng.bounded(i + 1)
        idx[i], idx[j] = idx[j], idx[i]
    return idx


@dataclass(frozen=True)
class SplitAssignment:
    record_id: str
    split: str  # train | validation | test


def split_sizes(n: int, ratios: tuple[float, float, float]) -> tuple[int, int, int]:
    # exact rationals: int(0.7 * n) can round one ulp low when 7n/10 is integral
    train = int(Fraction(ratios[0]).limit_denominator(10_000) * n)
    validation = int(Fraction(ratios[1]).limit_denominator(10_000) * n)
    return (train, validation, n - train - validation)


def split_dataset(
    records: Sequence[CorpusRecord],
    seed: int,
    ratios: tuple[float, float, float] = (0.7, 0.1, 0.2),
) -> list[SplitAssignment]:
    """Seeded shuffle, then floor(train), floor(validation), remainder test."""
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError(f"ratios must sum to 1.0, got {ratios}")
    if not records:
        raise EmptyInput("cannot split an empty corpus")
    n = len(records)
    n_train, n_val, _ = split_sizes(n, ratios)
    order = shuffled_indices(n, seed)
    assignments = []
    for pos, idx in enumerate(order):
        if pos < n_train:
            split = "train"
        elif pos < n_train + n_val:
            split = "validation"
        else:
            split = "test"
        assignments.append(SplitAssignment(record_id=records[idx].id, split=split))
    assignments.sort(key=lambda a: a.record_id)
    return assignments


# ---------------------------------------------------------------------------
# File formats


def read_corpus(path: str | Path) -> list[CorpusRecord]:
    records = []
    for rec in jsonl.read_records(path):
        icdo = None
        if rec.get("icdo"):
            icdo = IcdOTriplet(**rec["icdo"])
        records.append(
            CorpusRecord(
                id=rec["id"],
                context=rec["context"],
                broad_label=rec["broad_label"],
                subtype_label=rec["subtype_label"],
                label_source=rec["label_source"],
                broad_span=tuple(rec["broad_span"]) if rec.get("broad_span") else None,
                subtype_span=tuple(rec["subtype_span"]) if rec.get("subtype_span") else None,
                icdo=icdo,
            )
        )
    return records


def write_corpus(path: str | Path, records: Iterable[CorpusRecord]) -> int:
    def encode(r: CorpusRecord) -> dict:
        rec = {
            "id": r.id,
            "context": r.context,
            "broad_label": r.broad_label,
            "subtype_label": r.subtype_label,
            "label_source": r.label_source,
        }
        if r.broad_span:
            rec["broad_span"] = list(r.broad_span)
        if r.subtype_span:
            rec["subtype_span"] = list(r.subtype_span)
        if r.icdo:
            rec["icdo"] = {
                "cancer_type_code": r.icdo.cancer_type_code,
                "topography_code": r.icdo.topography_code,
                "morphology_code": r.icdo.morphology_code,
            }
        return rec

    return jsonl.write_records(path, (encode(r) for r in records))


def read_splits(path: str | Path) -> list[SplitAssignment]:
    return [
        SplitAssignment(record_id=rec["record_id"], split=rec["split"])
        for rec in jsonl.read_records(path)
    ]


def write_splits(path: str | Path, assignments: Iterable[SplitAssignment]) -> int:
    return jsonl.write_records(
        path, ({"record_id": a.record_id, "split": a.split} for a in assignments)
    )
