from __future__ import annotations

import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

LABEL_PAIRS = [
    ("colorectal cancer", "colon adenocarcinoma"),
    ("prostate cancer", "metastatic prostate cancer"),
    ("sarcoma", "leiomyosarcoma"),
    ("pancreatic cancer", "pancreatic ductal adenocarcinoma"),
    ("glioma", "glioblastoma"),
]


def corpus_rows(n: int) -> list[dict]:
    """Records in the pipeline's corpus file schema, spans localized."""
    rows = []
    for i in range(n):
        broad, subtype = LABEL_PAIRS[i % len(LABEL_PAIRS)]
        context = (
            f"Specimen {i:03d} received in formalin. Impression: {broad} is "
            f"favored on morphology. Sections show features consistent with "
            f"{subtype} involving adjacent tissue."
        )
        b = context.index(broad)
        s = context.index(subtype)
        rows.append(
            {
                "id": f"rec{i:04d}",
                "context": context,
                "broad_label": broad,
                "subtype_label": subtype,
                "label_source": "exact_match",
                "broad_span": [b, b + len(broad)],
                "subtype_span": [s, s + len(subtype)],
            }
        )
    return rows


def write_jsonl(path, rows) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, sort_keys=True) + "\n")
    return path


def make_corpus_files(tmp_path: Path, n: int, split: str = "train"):
    """(corpus_path, splits_path) with every record in `split`."""
    rows = corpus_rows(n)
    corpus = write_jsonl(tmp_path / "corpus.jsonl", rows)
    splits = write_jsonl(
        tmp_path / "splits.jsonl", [{"record_id": r["id"], "split": split} for r in rows]
    )
    return corpus, splits
