"""Command-line entry point tying the pipeline stages together.

Commands: ingest, build-corpus, split, extract, genbench, evaluate, report.
All artifacts are line-delimited JSON; reruns on unchanged inputs are
byte-identical.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import corpus as corpus_mod
from . import genbench as genbench_mod
from . import jsonl, metrics
from .config import PipelineConfig, load_config
from .errors import (
    ConfigError,
    DanglingPrediction,
    EmptyInput,
    PipelineError,
    UnknownSplit,
)
from .ingest import IngestConfig, chunk_document, load_lexicon, read_word_boxes, write_chunks
from .qa import QaConfig, extract, load_backend, load_bundle

log = logging.getLogger("pathqa")


def _ingest_config(config: PipelineConfig) -> IngestConfig:
    lexicon: frozenset[str] = frozenset()
    lexicon_path = config.get("ingest", "lexicon_path")
    if lexicon_path:
        lexicon = load_lexicon(str(lexicon_path))
    return IngestConfig(
        overlap_ratio=config.get("ingest", "overlap_ratio", 0.5),
        gap_factor=config.get("ingest", "gap_factor", 1.5),
        top_band=config.get("ingest", "top_band", 0.08),
        bottom_band=config.get("ingest", "bottom_band", 0.92),
        max_edit_distance=config.get("ingest", "max_edit_distance", 2),
        lexicon=lexicon,
    )


def cmd_ingest(args, config: PipelineConfig) -> int:
    input_dir = Path(args.input_dir)
    doc_paths = sorted(input_dir.glob("*.jsonl"))
    ingest_config = _ingest_config(config)
    failures = 0
    all_chunks = []

    def process(path: Path):
        pages = read_word_boxes(path)
        return chunk_document(pages, ingest_config, id_prefix=path.stem)

    with ThreadPoolExecutor(max_workers=args.jobs) as pool:
        futures = [(path, pool.submit(process, path)) for path in doc_paths]
        for path, fut in futures:
            try:
                all_chunks.extend(fut.result())
            except (PipelineError, ValueError, OSError) as exc:
                failures += 1
                log.error("ingest failed for %s: %s", path, exc)
    all_chunks.sort(key=lambda c: c.id)
    write_chunks(args.out_file, all_chunks)
    log.info("wrote %d chunks from %d documents", len(all_chunks), len(doc_paths) - failures)
    return 1 if failures else 0


class _ChunkView:
    __slots__ = ("id", "text")

    def __init__(self, id: str, text: str):
        self.id, self.text = id, text


def cmd_build_corpus(args, config: PipelineConfig) -> int:
    chunk_views = [
        _ChunkView(rec["id"], rec["text"]) for rec in jsonl.read_records(args.chunks_file)
    ]
    gold = {}
    for rec in jsonl.read_records(args.gold_file):
        icdo = corpus_mod.IcdOTriplet(**rec["icdo"]) if rec.get("icdo") else None
        gold[rec["id"]] = (rec["broad_label"], rec["subtype_label"], icdo)
    records = corpus_mod.build_corpus(chunk_views, gold)
    if args.annotations:
        corpus_mod.apply_annotations(records, args.annotations)
    corpus_mod.write_corpus(args.out_file, records)
    n_manual = sum(1 for r in records if r.label_source == "manual")
    log.info("wrote %d corpus records (%d manual)", len(records), n_manual)
    return 0


def cmd_split(args, config: PipelineConfig) -> int:
    records = corpus_mod.read_corpus(args.corpus_file)
    ratios = (
        config.get("corpus", "train_ratio", 0.7),
        config.get("corpus", "validation_ratio", 0.1),
        config.get("corpus", "test_ratio", 0.2),
    )
    assignments = corpus_mod.split_dataset(records, seed=args.seed, ratios=ratios)
    corpus_mod.write_splits(args.out_file, assignments)
    counts = {"train": 0, "validation": 0, "test": 0}
    for a in assignments:
        counts[a.split] += 1
    print(f"train={counts['train']} validation={counts['validation']} test={counts['test']}")
    return 0


def _select_split(corpus_file: str, split_file: str, split_name: str):
    records = {r.id: r for r in corpus_mod.read_corpus(corpus_file)}
    assignments = corpus_mod.read_splits(split_file)
    names = {a.split for a in assignments}
    if split_name not in names:
        raise UnknownSplit(f"split {split_name!r} not present", available=sorted(names))
    chosen = [records[a.record_id] for a in assignments if a.split == split_name]
    chosen.sort(key=lambda r: r.id)
    return chosen


def cmd_extract(args, config: PipelineConfig) -> int:
    bundle = load_bundle(args.bundle_dir)  # aborts before any inference on failure
    backend, tokenizer = load_backend(bundle)
    records = _select_split(args.corpus_file, args.split_file, args.split)
    qa_config = QaConfig(
        max_seq_len=config.get("qa", "max_seq_len", bundle.max_seq_len),
        stride=config.get("qa", "stride", 128),
        max_answer_tokens=config.get("qa", "max_answer_tokens", 30),
        n_best=config.get("qa", "n_best", 20),
    )
    rows = []
    for i, record in enumerate(records, start=1):
        answers = extract(record, backend, tokenizer, qa_config)
        for kind in (corpus_mod.BROAD, corpus_mod.SUBTYPE):
            cand = answers[kind]
            rows.append(
                {
                    "record_id": record.id,
                    "question_kind": kind,
                    "text": cand.text,
                    "char_start": cand.char_span[0],
                    "char_end": cand.char_span[1],
                    "score": cand.score,
                }
            )
        if i % 100 == 0:
            log.info("extracted %d/%d records", i, len(records))
    rows.sort(key=lambda r: (r["record_id"], r["question_kind"]))
    jsonl.write_records(args.out_file, rows)
    log.info("wrote %d predictions for %d records", len(rows), len(records))
    return 0


def _make_embedder(spec: str):
    if spec == "test":
        return metrics.HashEmbedder()
    from .qa.runtime import NumpyEncoder
    from .tokenize import FileTokenizer

    bundle = load_bundle(spec)
    runtime = NumpyEncoder.load(bundle.graph_path)
    return metrics.EncoderEmbedder(runtime, FileTokenizer(bundle.tokenizer_spec_path))


def cmd_evaluate(args, config: PipelineConfig) -> int:
    records = {r.id: r for r in corpus_mod.read_corpus(args.corpus_file)}
    embedder = _make_embedder(args.embedder or config.get("metrics", "embedder", "test"))
    scores = []
    for rec in jsonl.read_records(args.predictions_file):
        record = records.get(rec["record_id"])
        if record is None:
            raise DanglingPrediction(
                "prediction references unknown record", record_id=rec["record_id"]
            )
        gold = record.gold_answer(rec["question_kind"])
        scores.append(
            metrics.score_example(
                rec["record_id"], rec["question_kind"], rec["text"], [gold], embedder
            )
        )
    if not scores:
        raise EmptyInput("no predictions to evaluate")
    scores.sort(key=lambda s: (s.record_id, s.question_kind))
    report = metrics.aggregate(scores, model_name=args.model_name)
    out = Path(args.out_report)
    metrics.write_report(report, out, out.with_suffix(".detail.jsonl"))
    table = metrics.render_table([report])
    out.with_suffix(".txt").write_text(table, encoding="utf-8")
    print(table, end="")
    return 0


def cmd_genbench(args, config: PipelineConfig) -> int:
    records = _select_split(args.corpus_file, args.split_file, args.split)
    endpoint = args.endpoint or config.get("genbench", "endpoint")
    if not endpoint:
        raise ConfigError("no generation endpoint configured")
    template = genbench_mod.PromptTemplate()
    params = genbench_mod.GenerationParams(
        max_new_tokens=config.get("genbench", "max_new_tokens", 64),
        temperature=config.get("genbench", "temperature", 0.0),
        seed=config.get("genbench", "seed", args.seed),
        retry_max=config.get("genbench", "retry_max", 3),
        timeout_s=config.get("genbench", "timeout_s", 30.0),
        backoff_base_s=args.backoff_base_s,
    )
    in_flight = config.get("genbench", "in_flight", 4)
    with ThreadPoolExecutor(max_workers=in_flight) as pool:
        results = list(
            pool.map(
                lambda r: genbench_mod.run_record(r, endpoint, template, params), records
            )
        )
    results.sort(key=lambda r: r.record_id)
    jsonl.write_records(
        args.out_file,
        (
            {
                "record_id": r.record_id,
                "raw_text": r.raw_text,
                "parsed_broad": r.parsed_broad,
                "parsed_subtype": r.parsed_subtype,
                "duplicate_answer_flag": r.duplicate_answer_flag,
                "latency_ms": r.latency_ms,
                "error": r.error,
            }
            for r in results
        ),
    )
    if args.predictions_out:
        rows = []
        for r in results:
            for kind, text in ((corpus_mod.BROAD, r.parsed_broad), (corpus_mod.SUBTYPE, r.parsed_subtype)):
                rows.append(
                    {
                        "record_id": r.record_id,
                        "question_kind": kind,
                        "text": text or "",
                        "char_start": -1,
                        "char_end": -1,
                        "score": 0.0,
                    }
                )
        rows.sort(key=lambda r: (r["record_id"], r["question_kind"]))
        jsonl.write_records(args.predictions_out, rows)
    failures = sum(1 for r in results if r.error)
    duplicates = sum(1 for r in results if r.duplicate_answer_flag)
    print(
        f"records={len(results)} failed={failures} "
        f"duplicate_answer_rate={duplicates / len(results):.3f}"
        if results
        else "records=0"
    )
    return 1 if failures else 0


def cmd_report(args, config: PipelineConfig) -> int:
    reports = [metrics.read_report(p) for p in args.report_files]
    print(metrics.render_table(reports), end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pathqa",
        description="Cancer-type extraction pipeline for OCR'd pathology reports.",
    )
    parser.add_argument("--config", help="INI config file")
    parser.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    parser.add_argument("--seed", type=int, default=13)
    parser.add_argument("--log-level", default="INFO")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="word boxes -> text chunks")
    p.add_argument("input_dir")
    p.add_argument("out_file")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("build-corpus", help="chunks + gold labels -> corpus")
    p.add_argument("chunks_file")
    p.add_argument("gold_file")
    p.add_argument("out_file")
    p.add_argument("--annotations", help="manual-annotation sidecar JSONL")
    p.set_defaults(func=cmd_build_corpus)

    p = sub.add_parser("split", help="deterministic train/validation/test split")
    p.add_argument("corpus_file")
    p.add_argument("out_file")
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("extract", help="run QA extraction over a split")
    p.add_argument("corpus_file")
    p.add_argument("split_file")
    p.add_argument("split", choices=("train", "validation", "test"))
    p.add_argument("bundle_dir")
    p.add_argument("out_file")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("genbench", help="benchmark a generation service")
    p.add_argument("corpus_file")
    p.add_argument("split_file")
    p.add_argument("split", choices=("train", "validation", "test"))
    p.add_argument("out_file")
    p.add_argument("--endpoint")
    p.add_argument("--predictions-out", help="also emit cmd_evaluate-compatible predictions")
    p.add_argument("--backoff-base-s", type=float, default=0.5)
    p.set_defaults(func=cmd_genbench)

    p = sub.add_parser("evaluate", help="score predictions against gold answers")
    p.add_argument("predictions_file")
    p.add_argument("corpus_file")
    p.add_argument("out_report")
    p.add_argument("--embedder", help="'test' or an embedder bundle directory")
    p.add_argument("--model-name", default="model")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("report", help="render a comparison table from report files")
    p.add_argument("report_files", nargs="+")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, args.log_level.upper(), logging.INFO),
        stream=sys.stderr,
        format="%(levelname)s %(name)s %(message)s",
    )
    try:
        config = load_config(args.config)
        return args.func(args, config)
    except PipelineError as exc:
        log.error("%s", exc)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
