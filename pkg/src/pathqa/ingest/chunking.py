"""Document-level chunking: word boxes in, clean text chunks out."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from ..errors import MalformedBox
from .. import jsonl
from .layout import Block, WordBox, classify_boilerplate, group_lines, segment_blocks
from .spell import SpellCorrector


@dataclass
class IngestConfig:
    overlap_ratio: float = 0.5
    gap_factor: float = 1.5
    top_band: float = 0.08
    bottom_band: float = 0.92
    max_edit_distance: int = 2
    lexicon: frozenset[str] = frozenset()


@dataclass(frozen=True)
class Chunk:
    id: str
    text: str
    source_blocks: tuple[int, ...]  # indices into the document's block list
    page_span: tuple[int, int]


def chunk_document(
    pages: Sequence[Sequence[WordBox]],
    config: IngestConfig | None = None,
    id_prefix: str = "chunk",
) -> list[Chunk]:
    """Full layout pipeline: lines -> blocks -> boilerplate removal -> spell
    correction -> one chunk per surviving body block, in reading order.

    Raises MALFORMED_BOX (with page and word index) on any invalid box.
    """
    config = config or IngestConfig()
    for page_idx, words in enumerate(pages):
        for word_idx, word in enumerate(words):
            try:
                word.validate()
            except MalformedBox as exc:
                raise MalformedBox(
                    exc.message, page=page_idx + 1, index=word_idx, **exc.details
                ) from exc

    blocks: list[Block] = []
    for words in pages:
        lines = group_lines(words, overlap_ratio=config.overlap_ratio)
        blocks.extend(segment_blocks(lines, gap_factor=config.gap_factor))
    blocks = classify_boilerplate(
        blocks,
        page_count=max(len(pages), 1),
        top_band=config.top_band,
        bottom_band=config.bottom_band,
    )
    # reading order across the whole document
    order = sorted(
        range(len(blocks)),
        key=lambda i: (blocks[i].page, blocks[i].bbox[1], blocks[i].bbox[0]),
    )
    corrector = SpellCorrector(config.lexicon, config.max_edit_distance) if config.lexicon else None
    chunks: list[Chunk] = []
    for block_idx in order:
        block = blocks[block_idx]
        if block.kind != "body":
            continue
        text = " ".join(block.text.split())
        if corrector is not None:
            text = corrector.correct(text)
        chunks.append(
            Chunk(
                id=f"{id_prefix}:{len(chunks):04d}",
                text=text,
                source_blocks=(block_idx,),
                page_span=(block.page, block.page),
            )
        )
    return chunks


def read_word_boxes(path: str | Path) -> list[list[WordBox]]:
    """Read one document's JSONL word boxes, grouped into per-page lists."""
    by_page: dict[int, list[WordBox]] = {}
    for rec in jsonl.read_records(path):
        box = WordBox(
            text=rec["text"],
            page=int(rec["page"]),
            bbox=(float(rec["x0"]), float(rec["y0"]), float(rec["x1"]), float(rec["y1"])),
            confidence=float(rec.get("confidence", 1.0)),
        )
        by_page.setdefault(box.page, []).append(box)
    if not by_page:
        return []
    return [by_page.get(p, []) for p in range(1, max(by_page) + 1)]


def write_chunks(path: str | Path, chunks: Iterable[Chunk]) -> int:
    return jsonl.write_records(
        path,
        (
            {
                "id": c.id,
                "text": c.text,
                "page_first": c.page_span[0],
                "page_last": c.page_span[1],
            }
            for c in chunks
        ),
    )
