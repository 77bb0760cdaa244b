"""Command-line entry: fine-tune on a corpus split and export a bundle."""

from __future__ import annotations

import argparse
import logging
import sys

from .examples import prepare_training_examples
from .export import export_bundle
from .train import TrainingConfig, fine_tune


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="train-export",
        description="Fine-tune the QA encoder and export a portable model bundle",
    )
    p.add_argument("corpus", help="corpus JSONL with gold labels and spans")
    p.add_argument("splits", help="split-assignment JSONL")
    p.add_argument("out_dir", help="bundle output directory")
    p.add_argument("--split", default="train")
    p.add_argument("--model-name", default="fine-tuned")
    p.add_argument("--embedder-out", help="also export an embedder bundle here")
    p.add_argument("--epochs", type=int, default=3)
    p.add_argument("--learning-rate", type=float, default=3e-5)
    p.add_argument("--batch-size", type=int, default=16)
    p.add_argument("--max-seq-len", type=int, default=384)
    p.add_argument("--stride", type=int, default=128)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--hidden-size", type=int, default=64)
    p.add_argument("--num-layers", type=int, default=2)
    p.add_argument("--num-heads", type=int, default=2)
    p.add_argument("--intermediate-size", type=int, default=128)
    p.add_argument("--vocab-size", type=int, default=1000)
    p.add_argument("--stop-at-em", type=float, help="stop early at this training EM")
    p.add_argument("--log-level", default="INFO")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=args.log_level.upper(), format="%(levelname)s %(message)s")
    config = TrainingConfig(
        learning_rate=args.learning_rate,
        epochs=args.epochs,
        batch_size=args.batch_size,
        max_seq_len=args.max_seq_len,
        stride=args.stride,
        seed=args.seed,
        hidden_size=args.hidden_size,
        num_layers=args.num_layers,
        num_heads=args.num_heads,
        intermediate_size=args.intermediate_size,
        vocab_size=args.vocab_size,
    )
    examples = prepare_training_examples(args.corpus, args.splits, args.split)
    if not examples:
        print("no examples in the requested split", file=sys.stderr)
        return 2
    checkpoint = fine_tune(examples, config, stop_at_em=args.stop_at_em)
    export_bundle(checkpoint, args.out_dir, model_name=args.model_name)
    if args.embedder_out:
        export_bundle(
            checkpoint, args.embedder_out, model_name=f"{args.model_name}-embedder", qa_head=False
        )
    print(
        f"examples={len(examples)} epochs={len(checkpoint.epoch_em)} "
        f"final_train_em={checkpoint.epoch_em[-1]:.3f} bundle={args.out_dir}"
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
