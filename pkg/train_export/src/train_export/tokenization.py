"""BPE tokenizer training and serialization.

The serialized spec file is loaded by the inference pipeline with the
same `tokenizers` library, so token ids and char offsets agree on both
sides by construction; the test suite fuzzes this equality anyway.
"""

from __future__ import annotations

from pathlib import Path

from tokenizers import Tokenizer, models, pre_tokenizers, trainers

# id order fixed by the trainer's special_tokens list
PAD, CLS, SEP, UNK = "<pad>", "<s>", "</s>", "<unk>"


def train_tokenizer(texts: list[str], vocab_size: int = 1000) -> Tokenizer:
    """Train a word-boundary BPE tokenizer with char offsets."""
    tokenizer = Tokenizer(models.BPE(unk_token=UNK))
    tokenizer.pre_tokenizer = pre_tokenizers.Whitespace()
    trainer = trainers.BpeTrainer(
        vocab_size=vocab_size,
        special_tokens=[PAD, CLS, SEP, UNK],
        show_progress=False,
    )
    tokenizer.train_from_iterator(texts, trainer=trainer)
    return tokenizer


def save_tokenizer(tokenizer: Tokenizer, path: str | Path) -> None:
    tokenizer.save(str(path))


def special_ids(tokenizer: Tokenizer) -> tuple[int, int, int]:
    """(pad_id, cls_id, sep_id) as recorded in the spec file."""
    return (
        tokenizer.token_to_id(PAD),
        tokenizer.token_to_id(CLS),
        tokenizer.token_to_id(SEP),
    )
