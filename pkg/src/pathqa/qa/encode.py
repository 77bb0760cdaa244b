"""Question-context pair encoding with sliding windows over long contexts."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import ContextTooLong, EmptySequence

SENTINEL = (-1, -1)


@dataclass
class TokenizedWindow:
    token_ids: list[int]
    char_offsets: list[tuple[int, int]]  # SENTINEL for question/special tokens
    context_mask: list[bool]
    window_index: int
    window_stride: int
    meta: dict = field(default_factory=dict)  # record_id / question_kind, for backends

    def __post_init__(self):
        n = len(self.token_ids)
        assert len(self.char_offsets) == n and len(self.context_mask) == n
        for off, is_ctx in zip(self.char_offsets, self.context_mask):
            assert is_ctx == (off != SENTINEL)


def encode(
    question: str,
    context: str,
    tokenizer,
    max_seq_len: int,
    stride: int,
) -> list[TokenizedWindow]:
    """Tokenize into ``[CLS] question [SEP] context [SEP]`` windows.

    When the context exceeds the window capacity, overlapping windows are
    emitted advancing by ``stride`` context tokens; their union covers every
    context token at least once.
    """
    q_ids, _ = tokenizer.encode_text(question)
    c_ids, c_offsets = tokenizer.encode_text(context)
    if not c_ids:
        raise EmptySequence("context produced no tokens")
    capacity = max_seq_len - len(q_ids) - 3  # cls + 2 sep
    if capacity < 1:
        raise ContextTooLong(
            "question leaves no room for context tokens",
            max_seq_len=max_seq_len,
            question_tokens=len(q_ids),
        )
    if not (1 <= stride < capacity) and len(c_ids) > capacity:
        raise ValueError(f"stride must be in [1, {capacity}) for windowing, got {stride}")

    prefix_ids = [tokenizer.cls_id, *q_ids, tokenizer.sep_id]
    windows = []
    start = 0
    while True:
        ctx_ids = c_ids[start : start + capacity]
        ctx_offs = c_offsets[start : start + capacity]
        token_ids = [*prefix_ids, *ctx_ids, tokenizer.sep_id]
        offsets = [SENTINEL] * len(prefix_ids) + list(ctx_offs) + [SENTINEL]
        mask = [False] * len(prefix_ids) + [True] * len(ctx_ids) + [False]
        windows.append(
            TokenizedWindow(
                token_ids=token_ids,
                char_offsets=offsets,
                context_mask=mask,
                window_index=len(windows),
                window_stride=stride,
            )
        )
        if start + capacity >= len(c_ids):
            break
        start += stride
    return windows
