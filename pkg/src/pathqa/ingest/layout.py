"""Geometric post-processing of OCR word boxes.

Coordinates are fractions of the page size, so every rule here is
scale-free: line grouping by vertical-interval overlap, block segmentation
by inter-line gaps relative to the median line height, and margin-band
boilerplate detection.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from statistics import median
from typing import Sequence

from ..errors import MalformedBox


@dataclass(frozen=True)
class WordBox:
    text: str
    page: int
    bbox: tuple[float, float, float, float]  # (x0, y0, x1, y1), page fractions
    confidence: float = 1.0

    def validate(self) -> None:
        x0, y0, x1, y1 = self.bbox
        if not (x0 < x1 and y0 < y1):
            raise MalformedBox("degenerate bbox", bbox=self.bbox)
        if not self.text.strip():
            raise MalformedBox("empty word text", bbox=self.bbox)
        if self.page < 1:
            raise MalformedBox("page must be >= 1", page=self.page)


@dataclass
class Line:
    words: list[WordBox]
    page: int

    @property
    def bbox(self) -> tuple[float, float, float, float]:
        return (
            min(w.bbox[0] for w in self.words),
            min(w.bbox[1] for w in self.words),
            max(w.bbox[2] for w in self.words),
            max(w.bbox[3] for w in self.words),
        )

    @property
    def text(self) -> str:
        return " ".join(w.text.strip() for w in self.words)

    @property
    def height(self) -> float:
        b = self.bbox
        return b[3] - b[1]


@dataclass
class Block:
    lines: list[Line]
    page: int
    kind: str = "body"  # body | header | footer

    @property
    def bbox(self) -> tuple[float, float, float, float]:
        boxes = [ln.bbox for ln in self.lines]
        return (
            min(b[0] for b in boxes),
            min(b[1] for b in boxes),
            max(b[2] for b in boxes),
            max(b[3] for b in boxes),
        )

    @property
    def text(self) -> str:
        return " ".join(ln.text for ln in self.lines)


def _vertical_overlap_ratio(a: WordBox, b: WordBox) -> float:
    top = max(a.bbox[1], b.bbox[1])
    bot = min(a.bbox[3], b.bbox[3])
    if bot <= top:
        return 0.0
    shorter = min(a.bbox[3] - a.bbox[1], b.bbox[3] - b.bbox[1])
    return (bot - top) / shorter if shorter > 0 else 0.0


def group_lines(words: Sequence[WordBox], overlap_ratio: float = 0.5) -> list[Line]:
    """Cluster same-page words into lines.

    Two words share a line iff their vertical intervals overlap by at least
    ``overlap_ratio`` of the shorter interval; the relation is closed
    transitively (union-find).  Lines come out sorted by top edge, words
    within a line by left edge.
    """
    if not words:
        return []
    pages = {w.page for w in words}
    if len(pages) > 1:
        raise ValueError(f"group_lines expects a single page, got {sorted(pages)}")
    n = len(words)
    parent = list(range(n))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if _vertical_overlap_ratio(words[i], words[j]) >= overlap_ratio:
                parent[find(i)] = find(j)

    groups: dict[int, list[WordBox]] = {}
    for i, w in enumerate(words):
        groups.setdefault(find(i), []).append(w)
    lines = [
        Line(words=sorted(g, key=lambda w: (w.bbox[0], w.bbox[1])), page=g[0].page)
        for g in groups.values()
    ]
    lines.sort(key=lambda ln: (ln.bbox[1], ln.bbox[0]))
    return lines


def _x_overlaps(a: Line, b: Line) -> bool:
    return min(a.bbox[2], b.bbox[2]) > max(a.bbox[0], b.bbox[0])


def segment_blocks(lines: Sequence[Line], gap_factor: float = 1.5) -> list[Block]:
    """Group y-sorted lines into blocks.

    A line continues an open block when the vertical gap to that block's
    last line is at most ``gap_factor`` times the page's median line height
    and the two lines overlap horizontally; the horizontal condition keeps
    side-by-side columns apart.  Blocks are returned in reading order:
    top-to-bottom, ties broken left-to-right.
    """
    if gap_factor <= 0:
        raise ValueError("gap_factor must be positive")
    if not lines:
        return []
    lines = sorted(lines, key=lambda ln: (ln.bbox[1], ln.bbox[0]))
    med_h = median(ln.height for ln in lines)
    threshold = gap_factor * med_h
    open_blocks: list[Block] = []
    for ln in lines:
        placed = False
        for blk in reversed(open_blocks):
            last = blk.lines[-1]
            gap = ln.bbox[1] - last.bbox[3]
            if gap <= threshold and _x_overlaps(last, ln):
                blk.lines.append(ln)
                placed = True
                break
        if not placed:
            open_blocks.append(Block(lines=[ln], page=ln.page))
    open_blocks.sort(key=lambda b: (b.bbox[1], b.bbox[0]))
    return open_blocks


def _normalized(text: str) -> str:
    return " ".join(text.lower().split())


def classify_boilerplate(
    blocks: Sequence[Block],
    page_count: int,
    top_band: float = 0.08,
    bottom_band: float = 0.92,
    min_pages: int | None = None,
) -> list[Block]:
    """Assign header/footer kinds to margin-band blocks.

    A block is a header when it sits entirely inside the top margin band and
    its normalized text recurs on at least ``min_pages`` distinct pages
    (default ``min(2, page_count)``, so single-page documents fall back to
    the band rule alone).  Footers are symmetric at the bottom band.
    """
    if page_count < 1:
        raise ValueError("page_count must be >= 1")
    if min_pages is None:
        min_pages = min(2, page_count)
    pages_by_text: dict[str, set[int]] = {}
    for blk in blocks:
        pages_by_text.setdefault(_normalized(blk.text), set()).add(blk.page)
    out = []
    for blk in blocks:
        bbox = blk.bbox
        recurs = len(pages_by_text[_normalized(blk.text)]) >= min_pages
        kind = "body"
        if bbox[3] <= top_band and recurs:
            kind = "header"
        elif bbox[1] >= bottom_band and recurs:
            kind = "footer"
        out.append(Block(lines=blk.lines, page=blk.page, kind=kind))
    return out
