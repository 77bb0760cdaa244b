import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pathqa import corpus as cm
from pathqa.errors import DuplicateName, EmptyInput, MissingGold, OrphanSubtype

from conftest import make_synthetic_corpus


class TestOntology:
    def test_two_node_parent_link(self, tmp_path):
        path = tmp_path / "onto.jsonl"
        path.write_text(
            '{"id": "b1", "name": "colorectal cancer", "level": "broad"}\n'
            '{"id": "s1", "name": "colon adenocarcinoma", "level": "subtype", "parent_id": "b1"}\n'
        )
        onto = cm.load_ontology(path)
        assert len(onto) == 2
        assert onto.nodes["s1"].parent_id == "b1"

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.jsonl"
        path.write_text("")
        assert len(cm.load_ontology(path)) == 0

    def test_orphan_subtype(self):
        with pytest.raises(OrphanSubtype):
            cm.Ontology([cm.OntologyNode("s1", "colon adenocarcinoma", "subtype", "nope")])

    def test_duplicate_normalized_name(self):
        with pytest.raises(DuplicateName):
            cm.Ontology(
                [
                    cm.OntologyNode("b1", "Sarcoma", "broad"),
                    cm.OntologyNode("b2", "sarcoma  ", "broad"),
                ]
            )

    def test_round_trip_isomorphic(self, small_ontology, tmp_path):
        path = tmp_path / "onto.jsonl"
        cm.save_ontology(path, small_ontology)
        again = cm.load_ontology(path)
        assert {(n.id, n.name, n.level, n.parent_id) for n in again.nodes.values()} == {
            (n.id, n.name, n.level, n.parent_id) for n in small_ontology.nodes.values()
        }


class TestMapToOntology:
    def test_punctuation_and_case_stripped(self, small_ontology):
        node = cm.map_to_ontology("Colon adenocarcinoma.", small_ontology)
        assert node is not None and node.level == "subtype"

    def test_broad_exact(self, small_ontology):
        assert cm.map_to_ontology("colorectal cancer", small_ontology).level == "broad"

    def test_paraphrase_absent(self, small_ontology):
        assert cm.map_to_ontology("met prostatic adenocarcinoma", small_ontology) is None

    def test_round_trip_identity_every_node(self, small_ontology):
        for node in small_ontology.nodes.values():
            assert cm.map_to_ontology(node.name, small_ontology) is node

    def test_subtype_preferred_on_collision(self):
        onto = cm.Ontology(
            [
                cm.OntologyNode("b1", "mesothelioma", "broad"),
                cm.OntologyNode("s1", "Mesothelioma", "subtype", "b1"),
            ]
        )
        assert onto.lookup("mesothelioma").level == "subtype"


class TestLocalizeLabel:
    def test_case_insensitive_match(self):
        ctx = "findings consistent with Metastatic Prostate Cancer involving bone"
        span = cm.localize_label(ctx, "metastatic prostate cancer")
        assert ctx[span[0] : span[1]] == "Metastatic Prostate Cancer"

    def test_paraphrase_absent(self):
        assert cm.localize_label("met prostatic adenocarcinoma", "metastatic prostate cancer") is None

    def test_leftmost_of_two_occurrences(self):
        ctx = "sarcoma noted; recurrent sarcoma favored"
        assert cm.localize_label(ctx, "sarcoma") == (0, 7)

    def test_collapsed_whitespace_inside_context(self):
        ctx = "shows prostate   cancer cells"
        span = cm.localize_label(ctx, "prostate cancer")
        assert " ".join(ctx[span[0] : span[1]].lower().split()) == "prostate cancer"

    def test_empty_label_rejected(self):
        with pytest.raises(ValueError):
            cm.localize_label("anything", "")


class TestSplitDataset:
    def test_paper_corpus_size(self):
        assert cm.split_sizes(3634, (0.7, 0.1, 0.2)) == (2543, 363, 728)

    def test_small_n(self):
        assert cm.split_sizes(10, (0.7, 0.1, 0.2)) == (7, 1, 2)

    def test_determinism(self):
        records = make_synthetic_corpus(37)
        a = cm.split_dataset(records, seed=99)
        b = cm.split_dataset(records, seed=99)
        assert a == b
        c = cm.split_dataset(records, seed=100)
        assert a != c

    def test_partition_property(self):
        records = make_synthetic_corpus(41)
        assignments = cm.split_dataset(records, seed=5)
        assert sorted(a.record_id for a in assignments) == sorted(r.id for r in records)
        counts = {"train": 0, "validation": 0, "test": 0}
        for a in assignments:
            counts[a.split] += 1
        assert (counts["train"], counts["validation"], counts["test"]) == cm.split_sizes(
            41, (0.7, 0.1, 0.2)
        )

    @given(st.integers(min_value=1, max_value=10_000))
    @settings(max_examples=200, deadline=None)
    def test_floor_rule_against_independent_arithmetic(self, n):
        train, val, test = cm.split_sizes(n, (0.7, 0.1, 0.2))
        assert train == 7 * n // 10
        assert val == n // 10
        assert test == n - train - val

    def test_bad_ratios(self):
        with pytest.raises(ValueError):
            cm.split_dataset(make_synthetic_corpus(3), seed=1, ratios=(0.5, 0.1, 0.2))

    def test_empty_corpus(self):
        with pytest.raises(EmptyInput):
            cm.split_dataset([], seed=1)


class TestBuildCorpus:
    class Chunk:
        def __init__(self, id, text):
            self.id, self.text = id, text

    def test_exact_match_gets_span(self):
        chunk = self.Chunk("c1", "sections show colon adenocarcinoma and colorectal cancer")
        gold = {"c1": ("colorectal cancer", "colon adenocarcinoma", None)}
        [rec] = cm.build_corpus([chunk], gold)
        assert rec.label_source == "exact_match"
        assert rec.context[rec.subtype_span[0] : rec.subtype_span[1]] == "colon adenocarcinoma"

    def test_paraphrase_flagged_manual(self):
        chunk = self.Chunk("c1", "met prostatic adenocarcinoma seen")
        gold = {"c1": ("prostate cancer", "metastatic prostate cancer", None)}
        [rec] = cm.build_corpus([chunk], gold)
        assert rec.label_source == "manual"
        assert rec.broad_span is None and rec.subtype_span is None

    def test_missing_gold(self):
        with pytest.raises(MissingGold):
            cm.build_corpus([self.Chunk("c1", "text")], {})

    def test_annotation_sidecar_fills_spans(self, tmp_path):
        chunk = self.Chunk("c1", "met prostatic adenocarcinoma seen")
        gold = {"c1": ("prostate cancer", "metastatic prostate cancer", None)}
        records = cm.build_corpus([chunk], gold)
        sidecar = tmp_path / "ann.jsonl"
        sidecar.write_text(
            '{"record_id": "c1", "question_kind": "subtype", "char_start": 0, "char_end": 28}\n'
        )
        cm.apply_annotations(records, sidecar)
        assert records[0].subtype_span == (0, 28)


def test_corpus_file_round_trip(tmp_path):
    records = make_synthetic_corpus(7)
    path = tmp_path / "corpus.jsonl"
    cm.write_corpus(path, records)
    assert cm.read_corpus(path) == records


def test_split_file_round_trip(tmp_path):
    assignments = cm.split_dataset(make_synthetic_corpus(11), seed=3)
    path = tmp_path / "splits.jsonl"
    cm.write_splits(path, assignments)
    assert cm.read_splits(path) == assignments
