"""Subword tokenization with character offsets.

Two interchangeable backends:

* ``SimpleTokenizer`` — dependency-free deterministic tokenizer (word and
  punctuation pieces, long words split into fixed-width subpieces, stable
  hashed ids).  Used by tests and anywhere no trained vocabulary exists.
* ``FileTokenizer`` — wraps a serialized tokenizer spec produced by the
  training side, guaranteeing identical ids across both sides.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

TokenOffsets = list[tuple[int, int]]

_PIECE_RE = re.compile(r"\w+|[^\w\s]", re.UNICODE)


def _fnv1a32(data: str) -> int:
    h = 0x811C9DC5
    for byte in data.encode("utf-8"):
        h ^= byte
        h = (h * 0x01000193) & 0xFFFFFFFF
    return h


@dataclass
class SimpleTokenizer:
    max_piece_chars: int = 12
    vocab_size: int = 50000
    pad_id: int = 0
    cls_id: int = 1
    sep_id: int = 2

    _N_SPECIAL = 4  # pad, cls, sep, unk

    def encode_text(self, text: str) -> tuple[list[int], TokenOffsets]:
        ids: list[int] = []
        offsets: TokenOffsets = []
        for m in _PIECE_RE.finditer(text):
            start, end = m.span()
            while start < end:
                stop = min(start + self.max_piece_chars, end)
                piece = text[start:stop].lower()
                ids.append(
                    self._N_SPECIAL
                    + _fnv1a32(piece) % (self.vocab_size - self._N_SPECIAL)
                )
                offsets.append((start, stop))
                start = stop
        return ids, offsets


class FileTokenizer:
    """Tokenizer loaded from a serialized spec file (``tokenizers`` format)."""

    def __init__(self, spec_path: str | Path):
        from tokenizers import Tokenizer  # heavy import, keep lazy

        self._tok = Tokenizer.from_file(str(spec_path))
        self.cls_id = self._token_id("<s>", "[CLS]")
        self.sep_id = self._token_id("</s>", "[SEP]")
        self.pad_id = self._token_id("<pad>", "[PAD]")

    def _token_id(self, *names: str) -> int:
        for name in names:
            tid = self._tok.token_to_id(name)
            if tid is not None:
                return tid
        raise ValueError(f"tokenizer spec defines none of {names}")

    def encode_text(self, text: str) -> tuple[list[int], TokenOffsets]:
        enc = self._tok.encode(text, add_special_tokens=False)
        return list(enc.ids), [tuple(o) for o in enc.offsets]
