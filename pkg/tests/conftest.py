from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from pathqa.corpus import (
    CorpusRecord,
    IcdOTriplet,
    Ontology,
    OntologyNode,
    localize_label,
)
from pathqa.ingest import WordBox

LABEL_PAIRS = [
    ("colorectal cancer", "colon adenocarcinoma"),
    ("prostate cancer", "metastatic prostate cancer"),
    ("sarcoma", "leiomyosarcoma"),
    ("pancreatic cancer", "pancreatic ductal adenocarcinoma"),
    ("glioma", "glioblastoma"),
]


@pytest.fixture
def small_ontology() -> Ontology:
    nodes = []
    for i, (broad, subtype) in enumerate(LABEL_PAIRS):
        nodes.append(OntologyNode(id=f"b{i}", name=broad, level="broad"))
        nodes.append(OntologyNode(id=f"s{i}", name=subtype, level="subtype", parent_id=f"b{i}"))
    return Ontology(nodes)


def make_synthetic_corpus(n: int) -> list[CorpusRecord]:
    """Records whose contexts contain both gold labels verbatim, spans at
    word boundaries so token-aligned extraction recovers them exactly."""
    records = []
    for i in range(n):
        broad, subtype = LABEL_PAIRS[i % len(LABEL_PAIRS)]
        # broad label first so it never localizes inside the subtype phrase
        context = (
            f"Specimen {i:03d} received in formalin. Impression: {broad} is "
            f"favored on morphology. Sections show features consistent with "
            f"{subtype} involving adjacent tissue."
        )
        records.append(
            CorpusRecord(
                id=f"rec{i:04d}",
                context=context,
                broad_label=broad,
                subtype_label=subtype,
                label_source="exact_match",
                broad_span=localize_label(context, broad),
                subtype_span=localize_label(context, subtype),
                icdo=IcdOTriplet("C18", "C18.9", "8140/3"),
            )
        )
    return records


@pytest.fixture
def synthetic_corpus() -> list[CorpusRecord]:
    return make_synthetic_corpus(50)


def word_boxes_for_line(text: str, page: int, y0: float, y1: float, x0: float = 0.05):
    """Lay the words of one line out left to right with small gaps."""
    boxes = []
    x = x0
    for word in text.split():
        width = 0.012 * len(word)
        boxes.append(WordBox(text=word, page=page, bbox=(x, y0, x + width, y1), confidence=0.9))
        x += width + 0.008
    return boxes


HEADER_TEXT = "St Example Pathology Service"
FOOTER_TEXT = "Confidential do not distribute"


def make_three_page_doc():
    """3-page fixture: repeated top-band header, bottom-band footer, and two
    body blocks per page whose reading order is hand-specified."""
    pages = []
    body_texts = []
    for page in range(1, 4):
        words = []
        words += word_boxes_for_line(HEADER_TEXT, page, 0.015, 0.035)
        first = f"Body page {page} first paragraph about specimen handling"
        second = f"Body page {page} second paragraph with the diagnosis text"
        words += word_boxes_for_line(first, page, 0.20, 0.22)
        words += word_boxes_for_line(second, page, 0.50, 0.52)
        words += word_boxes_for_line(FOOTER_TEXT, page, 0.945, 0.965)
        body_texts += [first, second]
        pages.append(words)
    return pages, body_texts


@pytest.fixture
def three_page_doc():
    return make_three_page_doc()


def write_doc_word_boxes(path, context: str, page: int = 1):
    """Serialize a context as one JSONL word-box document, 8 words per line."""
    import json

    words = context.split()
    lines = [words[i : i + 8] for i in range(0, len(words), 8)]
    with open(path, "w", encoding="utf-8") as fh:
        for row, line_words in enumerate(lines):
            y0 = 0.2 + row * 0.022
            x = 0.05
            for word in line_words:
                width = 0.01 * len(word)
                fh.write(
                    json.dumps(
                        {
                            "text": word,
                            "page": page,
                            "x0": x,
                            "y0": round(y0, 4),
                            "x1": x + width,
                            "y1": round(y0 + 0.018, 4),
                            "confidence": 0.95,
                        }
                    )
                    + "\n"
                )
                x += width + 0.005


def make_oracle_bundle(bundle_dir, corpus_path):
    """Oracle bundle directory replaying the corpus' gold spans."""
    import shutil

    from pathqa.qa import write_manifest

    bundle_dir.mkdir(parents=True, exist_ok=True)
    shutil.copy(corpus_path, bundle_dir / "gold.jsonl")
    write_manifest(
        bundle_dir,
        {"kind": "oracle", "gold_corpus": "gold.jsonl", "max_seq_len": "384"},
        hash_files=["gold.jsonl"],
    )
    return bundle_dir


@pytest.fixture
def fixture_lexicon() -> frozenset[str]:
    words = set()
    for broad, subtype in LABEL_PAIRS:
        words.update(broad.split())
        words.update(subtype.split())
    words.update(
        "specimen received formalin sections show features consistent with "
        "involving adjacent tissue impression favored morphology the and of".split()
    )
    return frozenset(words)
