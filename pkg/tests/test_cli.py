import json

import pytest

from pathqa import jsonl
from pathqa.cli import main
from pathqa.corpus import read_corpus

from conftest import make_oracle_bundle, make_synthetic_corpus, write_doc_word_boxes
from stub_service import StubService


@pytest.fixture
def workspace(tmp_path):
    """Word-box docs + gold labels for a 12-record synthetic corpus."""
    records = make_synthetic_corpus(12)
    docs = tmp_path / "docs"
    docs.mkdir()
    gold_rows = []
    for r in records:
        write_doc_word_boxes(docs / f"{r.id}.jsonl", r.context)
        gold_rows.append(
            {
                "id": f"{r.id}:0000",
                "broad_label": r.broad_label,
                "subtype_label": r.subtype_label,
            }
        )
    gold_file = tmp_path / "gold.jsonl"
    jsonl.write_records(gold_file, gold_rows)
    return tmp_path, records


def run(*argv):
    return main([str(a) for a in argv])


class TestIngest:
    def test_empty_dir_exit_zero(self, tmp_path):
        empty = tmp_path / "docs"
        empty.mkdir()
        out = tmp_path / "chunks.jsonl"
        assert run("ingest", empty, out) == 0
        assert out.read_text() == ""

    def test_chunks_reconstruct_contexts(self, workspace, tmp_path):
        root, records = workspace
        out = root / "chunks.jsonl"
        assert run("ingest", root / "docs", out) == 0
        chunks = {rec["id"]: rec["text"] for rec in jsonl.read_records(out)}
        for r in records:
            assert chunks[f"{r.id}:0000"] == r.context

    def test_malformed_doc_reported_others_written(self, workspace):
        root, records = workspace
        bad = root / "docs" / "zzz-bad.jsonl"
        bad.write_text(json.dumps({"text": "x", "page": 1, "x0": 0.5, "y0": 0.5, "x1": 0.4, "y1": 0.6}) + "\n")
        out = root / "chunks.jsonl"
        assert run("ingest", root / "docs", out) == 1
        ids = {rec["id"] for rec in jsonl.read_records(out)}
        assert len(ids) == len(records)  # all good docs still present

    def test_rerun_byte_identical(self, workspace):
        root, _ = workspace
        out1, out2 = root / "c1.jsonl", root / "c2.jsonl"
        assert run("ingest", root / "docs", out1) == 0
        assert run("ingest", root / "docs", out2) == 0
        assert out1.read_bytes() == out2.read_bytes()


class TestPipelineEndToEnd:
    def _build(self, root):
        run("ingest", root / "docs", root / "chunks.jsonl")
        assert (
            run("build-corpus", root / "chunks.jsonl", root / "gold.jsonl", root / "corpus.jsonl")
            == 0
        )
        assert run("--seed", 7, "split", root / "corpus.jsonl", root / "splits.jsonl") == 0

    def test_full_compose(self, workspace, capsys):
        root, _ = workspace
        self._build(root)
        corpus = read_corpus(root / "corpus.jsonl")
        assert all(r.label_source == "exact_match" for r in corpus)
        bundle = make_oracle_bundle(root / "bundle", root / "corpus.jsonl")
        assert (
            run(
                "extract",
                root / "corpus.jsonl",
                root / "splits.jsonl",
                "test",
                bundle,
                root / "preds.jsonl",
            )
            == 0
        )
        assert (
            run(
                "evaluate",
                root / "preds.jsonl",
                root / "corpus.jsonl",
                root / "report.jsonl",
                "--embedder",
                "test",
                "--model-name",
                "oracle",
            )
            == 0
        )
        report = next(iter(jsonl.read_records(root / "report.jsonl")))
        assert report["exact_match_pct"] == 100.0
        assert report["macro_f1"] == 1.0
        assert report["f1_bert"] == 1.0
        assert run("report", root / "report.jsonl") == 0
        out = capsys.readouterr().out
        assert "oracle" in out and "100.00%" in out

    def test_split_sizes_printed_and_deterministic(self, workspace, capsys):
        root, _ = workspace
        self._build(root)
        out = capsys.readouterr().out
        assert "train=8 validation=1 test=3" in out
        first = (root / "splits.jsonl").read_bytes()
        assert run("--seed", 7, "split", root / "corpus.jsonl", root / "splits.jsonl") == 0
        assert (root / "splits.jsonl").read_bytes() == first

    def test_empty_corpus_split_fails(self, tmp_path):
        empty = tmp_path / "corpus.jsonl"
        empty.write_text("")
        assert run("split", empty, tmp_path / "splits.jsonl") == 2

    def test_unknown_split(self, workspace):
        root, _ = workspace
        self._build(root)
        bundle = make_oracle_bundle(root / "bundle", root / "corpus.jsonl")
        (root / "splits.jsonl").write_text(
            "\n".join(
                json.dumps({"record_id": r.id, "split": "train"})
                for r in read_corpus(root / "corpus.jsonl")
            )
        )
        code = run(
            "extract",
            root / "corpus.jsonl",
            root / "splits.jsonl",
            "test",
            bundle,
            root / "preds.jsonl",
        )
        assert code == 2

    def test_missing_bundle_manifest(self, workspace):
        root, _ = workspace
        self._build(root)
        (root / "empty_bundle").mkdir()
        code = run(
            "extract",
            root / "corpus.jsonl",
            root / "splits.jsonl",
            "test",
            root / "empty_bundle",
            root / "preds.jsonl",
        )
        assert code == 2

    def test_tampered_bundle_rejected(self, workspace):
        root, _ = workspace
        self._build(root)
        bundle = make_oracle_bundle(root / "bundle", root / "corpus.jsonl")
        with open(bundle / "gold.jsonl", "a") as fh:
            fh.write("\n")
        code = run(
            "extract",
            root / "corpus.jsonl",
            root / "splits.jsonl",
            "test",
            bundle,
            root / "preds.jsonl",
        )
        assert code == 2

    def test_dangling_prediction(self, workspace):
        root, _ = workspace
        self._build(root)
        jsonl.write_records(
            root / "preds.jsonl",
            [
                {
                    "record_id": "ghost",
                    "question_kind": "broad",
                    "text": "sarcoma",
                    "char_start": 0,
                    "char_end": 7,
                    "score": 1.0,
                }
            ],
        )
        code = run(
            "evaluate", root / "preds.jsonl", root / "corpus.jsonl", root / "report.jsonl"
        )
        assert code == 2

    def test_extract_rerun_byte_identical(self, workspace):
        root, _ = workspace
        self._build(root)
        bundle = make_oracle_bundle(root / "bundle", root / "corpus.jsonl")
        for out in ("p1.jsonl", "p2.jsonl"):
            assert (
                run(
                    "extract",
                    root / "corpus.jsonl",
                    root / "splits.jsonl",
                    "test",
                    bundle,
                    root / out,
                )
                == 0
            )
        assert (root / "p1.jsonl").read_bytes() == (root / "p2.jsonl").read_bytes()


class TestGenbenchCommand:
    def test_stub_round_trip_to_evaluate(self, workspace, capsys):
        root, records = workspace
        TestPipelineEndToEnd()._build(root)
        corpus = read_corpus(root / "corpus.jsonl")
        by_marker = {r.context[:16]: r for r in corpus}

        def responder(prompt, index):
            for marker, rec in by_marker.items():
                if marker in prompt:
                    return f"Cancer type: {rec.broad_label}\nSubtype: {rec.subtype_label}"
            return 404

        with StubService(responder) as stub:
            code = run(
                "genbench",
                root / "corpus.jsonl",
                root / "splits.jsonl",
                "test",
                root / "gen.jsonl",
                "--endpoint",
                stub.endpoint,
                "--predictions-out",
                root / "gen_preds.jsonl",
                "--backoff-base-s",
                0.01,
            )
        assert code == 0
        assert (
            run(
                "evaluate",
                root / "gen_preds.jsonl",
                root / "corpus.jsonl",
                root / "gen_report.jsonl",
                "--model-name",
                "stub-llm",
            )
            == 0
        )
        report = next(iter(jsonl.read_records(root / "gen_report.jsonl")))
        assert report["exact_match_pct"] == 100.0

    def test_endpoint_down_marks_all_and_fails(self, workspace, capsys):
        root, _ = workspace
        TestPipelineEndToEnd()._build(root)
        code = run(
            "genbench",
            root / "corpus.jsonl",
            root / "splits.jsonl",
            "test",
            root / "gen.jsonl",
            "--endpoint",
            "http://127.0.0.1:9/generate",
            "--backoff-base-s",
            0.01,
        )
        assert code == 1
        results = list(jsonl.read_records(root / "gen.jsonl"))
        assert results and all(r["error"] == "SERVICE_UNREACHABLE" for r in results)

    def test_duplicate_answer_rate_reported(self, workspace, capsys):
        root, _ = workspace
        TestPipelineEndToEnd()._build(root)
        with StubService(lambda p, i: "Cancer type: sarcoma\nSubtype: sarcoma") as stub:
            code = run(
                "genbench",
                root / "corpus.jsonl",
                root / "splits.jsonl",
                "test",
                root / "gen.jsonl",
                "--endpoint",
                stub.endpoint,
            )
        assert code == 0
        assert "duplicate_answer_rate=1.000" in capsys.readouterr().out
        assert all(r["duplicate_answer_flag"] for r in jsonl.read_records(root / "gen.jsonl"))
