"""Fine-tuning of a RoBERTa-style span-extraction model.

Sequences are encoded as ``[CLS] question [SEP] context [SEP]`` with the
answer supervised as (start, end) token indices, matching the window
layout the inference pipeline decodes.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field

import numpy as np
import torch
from tokenizers import Tokenizer
from transformers import RobertaConfig, RobertaForQuestionAnswering

from .examples import TrainingExample
from .tokenization import special_ids, train_tokenizer

log = logging.getLogger(__name__)


@dataclass
class TrainingConfig:
    base_model_name: str = "tiny-roberta"
    learning_rate: float = 3e-5
    epochs: int = 3
    batch_size: int = 16
    max_seq_len: int = 384
    stride: int = 128
    seed: int = 0
    # architecture of the randomly initialized base encoder
    hidden_size: int = 64
    num_layers: int = 2
    num_heads: int = 2
    intermediate_size: int = 128
    vocab_size: int = 1000


@dataclass
class Feature:
    """One encoded example with gold token positions."""

    input_ids: list[int]
    start_position: int
    end_position: int
    context_token_span: tuple[int, int]  # [first, last] context token index


@dataclass
class Checkpoint:
    model: RobertaForQuestionAnswering
    tokenizer: Tokenizer
    config: TrainingConfig
    epoch_losses: list[float] = field(default_factory=list)
    epoch_em: list[float] = field(default_factory=list)


def encode_feature(example: TrainingExample, tokenizer: Tokenizer, max_seq_len: int) -> Feature:
    pad_id, cls_id, sep_id = special_ids(tokenizer)
    q = tokenizer.encode(example.question, add_special_tokens=False)
    c = tokenizer.encode(example.context, add_special_tokens=False)
    input_ids = [cls_id, *q.ids, sep_id, *c.ids, sep_id]
    if len(input_ids) > max_seq_len:
        raise ValueError(
            f"encoded length {len(input_ids)} exceeds max_seq_len {max_seq_len} "
            f"(record {example.record_id})"
        )
    base = len(q.ids) + 2  # index of the first context token
    start_tok = end_tok = None
    for k, (off_start, off_end) in enumerate(c.offsets):
        if start_tok is None and off_end > example.answer_start:
            start_tok = base + k
        if off_start < example.answer_end:
            end_tok = base + k
    if start_tok is None or end_tok is None or end_tok < start_tok:
        raise ValueError(f"answer span not alignable for record {example.record_id}")
    return Feature(
        input_ids=input_ids,
        start_position=start_tok,
        end_position=end_tok,
        context_token_span=(base, base + len(c.ids) - 1),
    )


def _batch_tensors(features: list[Feature], pad_id: int):
    width = max(len(f.input_ids) for f in features)
    ids = torch.full((len(features), width), pad_id, dtype=torch.long)
    mask = torch.zeros((len(features), width), dtype=torch.long)
    for row, f in enumerate(features):
        ids[row, : len(f.input_ids)] = torch.tensor(f.input_ids)
        mask[row, : len(f.input_ids)] = 1
    starts = torch.tensor([f.start_position for f in features], dtype=torch.long)
    ends = torch.tensor([f.end_position for f in features], dtype=torch.long)
    return ids, mask, starts, ends


def check_finite(loss: torch.Tensor, epoch: int, step: int, config: TrainingConfig) -> None:
    if not torch.isfinite(loss):
        raise RuntimeError(
            f"training diverged: loss={loss.item()} at epoch {epoch} step {step} "
            f"(lr={config.learning_rate}, batch_size={config.batch_size}, "
            f"seed={config.seed})"
        )


@torch.no_grad()
def _train_em(model, features: list[Feature], pad_id: int) -> float:
    """Fraction of features whose argmax start/end equal the gold positions."""
    model.eval()
    hits = 0
    for f in features:
        ids = torch.tensor([f.input_ids], dtype=torch.long)
        out = model(input_ids=ids, attention_mask=torch.ones_like(ids))
        lo, hi = f.context_token_span
        start = int(out.start_logits[0, lo : hi + 1].argmax()) + lo
        end = int(out.end_logits[0, lo : hi + 1].argmax()) + lo
        hits += int(start == f.start_position and end == f.end_position)
    model.train()
    return hits / len(features)


def fine_tune(
    examples: list[TrainingExample],
    config: TrainingConfig,
    tokenizer: Tokenizer | None = None,
    stop_at_em: float | None = None,
) -> Checkpoint:
    """Train span heads (and here the whole tiny encoder) on the examples.

    With a fixed seed the run is bit-reproducible on CPU.  `stop_at_em`
    ends training early once the training-set exact match reaches it.
    """
    if not examples:
        raise ValueError("no training examples")
    torch.manual_seed(config.seed)
    np.random.seed(config.seed)
    rng = random.Random(config.seed)

    if tokenizer is None:
        texts = sorted({e.context for e in examples} | {e.question for e in examples})
        tokenizer = train_tokenizer(texts, vocab_size=config.vocab_size)
    pad_id, cls_id, sep_id = special_ids(tokenizer)
    features = [encode_feature(e, tokenizer, config.max_seq_len) for e in examples]

    model_config = RobertaConfig(
        vocab_size=tokenizer.get_vocab_size(),
        hidden_size=config.hidden_size,
        num_hidden_layers=config.num_layers,
        num_attention_heads=config.num_heads,
        intermediate_size=config.intermediate_size,
        max_position_embeddings=config.max_seq_len + pad_id + 8,
        pad_token_id=pad_id,
        bos_token_id=cls_id,
        eos_token_id=sep_id,
    )
    model = RobertaForQuestionAnswering(model_config)
    model.train()
    optimizer = torch.optim.AdamW(model.parameters(), lr=config.learning_rate)

    checkpoint = Checkpoint(model=model, tokenizer=tokenizer, config=config)
    order = list(range(len(features)))
    for epoch in range(config.epochs):
        rng.shuffle(order)
        epoch_loss = 0.0
        steps = 0
        for at in range(0, len(order), config.batch_size):
            batch = [features[i] for i in order[at : at + config.batch_size]]
            ids, mask, starts, ends = _batch_tensors(batch, pad_id)
            out = model(
                input_ids=ids, attention_mask=mask, start_positions=starts, end_positions=ends
            )
            check_finite(out.loss, epoch, steps, config)
            optimizer.zero_grad()
            out.loss.backward()
            optimizer.step()
            epoch_loss += float(out.loss.detach())
            steps += 1
        em = _train_em(model, features, pad_id)
        checkpoint.epoch_losses.append(epoch_loss / steps)
        checkpoint.epoch_em.append(em)
        log.info("epoch %d loss=%.4f train_em=%.3f", epoch, epoch_loss / steps, em)
        if stop_at_em is not None and em >= stop_at_em:
            break
    model.eval()
    return checkpoint
