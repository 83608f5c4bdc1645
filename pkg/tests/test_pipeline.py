import json

import pytest

from kexops.errors import PipelineError
from kexops.pipeline import (
    AnnotatedDocument,
    CallbackRegistry,
    Entity,
    PipelineSpec,
    Relation,
    apply_cleaners,
    build_loader,
    default_registry,
    label_matrix,
    normalize_whitespace,
    read_bios,
    read_csv_entities,
    read_json_list,
    read_json_triples,
    token_label,
    write_bios,
)

from conftest import generate_bios_sentences, make_dataset, make_model, write_bios_file


class TestSchema:
    def test_valid_document(self):
        doc = AnnotatedDocument(
            "d1",
            "aspirin treats headache",
            [Entity(0, 7, "DRUG"), Entity(15, 23, "DISEASE")],
            [Relation(0, 1, "treats")],
        )
        doc.validate()
        assert doc.surface(doc.entities[0]) == "aspirin"

    def test_invalid_span_rejected(self):
        with pytest.raises(PipelineError, match="invalid span"):
            AnnotatedDocument("d", "abc", [Entity(2, 2, "X")]).validate()
        with pytest.raises(PipelineError, match="invalid span"):
            AnnotatedDocument("d", "abc", [Entity(1, 9, "X")]).validate()

    def test_relation_index_out_of_range(self):
        with pytest.raises(PipelineError, match="relation"):
            AnnotatedDocument("d", "abc", [Entity(0, 1, "X")], [Relation(0, 3, "r")]).validate()


class TestBiosReader:
    def test_spans_reconstructed_from_runs(self, tmp_path):
        path = tmp_path / "sample.txt"
        path.write_text(
            "john B-PER\nsmith I-PER\nvisited O\nparis S-LOC\n\nacme B-ORG\n",
            encoding="utf-8",
        )
        docs = read_bios(path)
        assert len(docs) == 2
        first = docs[0]
        assert first.text == "john smith visited paris"
        assert [(first.surface(e), e.type) for e in first.entities] == [
            ("john smith", "PER"),
            ("paris", "LOC"),
        ]
        assert docs[1].entities == [Entity(0, 4, "ORG")]

    def test_dangling_continuation_opens_fresh_run(self, tmp_path):
        path = tmp_path / "dangling.txt"
        path.write_text("x I-PER\ny I-LOC\n", encoding="utf-8")
        docs = read_bios(path)
        assert [(e.type,) for e in docs[0].entities] == [("PER",), ("LOC",)]

    def test_malformed_line_rejected(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("token-without-tag\n", encoding="utf-8")
        with pytest.raises(PipelineError, match="bad.txt:1"):
            read_bios(path)

    def test_round_trip_is_identity(self, tmp_path, rng):
        path = tmp_path / "corpus.txt"
        write_bios_file(path, generate_bios_sentences(rng, 20))
        original = path.read_text(encoding="utf-8")
        docs = read_bios(path)
        out = tmp_path / "rewritten.txt"
        write_bios(docs, out)
        assert out.read_text(encoding="utf-8") == original


class TestOtherReaders:
    def test_json_list_passes_spans_through(self, tmp_path):
        path = tmp_path / "docs.jsonl"
        rec = {
            "text": "ibuprofen for fever",
            "entities": [{"start": 0, "end": 9, "type": "DRUG"}],
            "relations": [],
        }
        path.write_text(json.dumps(rec) + "\n", encoding="utf-8")
        docs = read_json_list(path)
        assert docs[0].entities == [Entity(0, 9, "DRUG")]
        assert docs[0].doc_id == "docs-0"

    def test_json_triples_interns_entities(self, tmp_path):
        path = tmp_path / "triples.jsonl"
        rec = {
            "text": "aspirin treats pain and fever",
            "triples": [
                {
                    "head": {"start": 0, "end": 7, "type": "DRUG"},
                    "tail": {"start": 15, "end": 19, "type": "SYMPTOM"},
                    "type": "treats",
                },
                {
                    "head": {"start": 0, "end": 7, "type": "DRUG"},
                    "tail": {"start": 24, "end": 29, "type": "SYMPTOM"},
                    "type": "treats",
                },
            ],
        }
        path.write_text(json.dumps(rec) + "\n", encoding="utf-8")
        doc = read_json_triples(path)[0]
        assert len(doc.entities) == 3  # shared head interned once
        assert [r.to_dict() for r in doc.relations] == [
            {"head": 0, "tail": 1, "type": "treats"},
            {"head": 0, "tail": 2, "type": "treats"},
        ]

    def test_csv_entities_grouped_by_doc(self, tmp_path):
        path = tmp_path / "ents.csv"
        path.write_text(
            "doc_id,text,start,end,type\n"
            "d1,aspirin helps,0,7,DRUG\n"
            "d2,plain sentence,,,\n",
            encoding="utf-8",
        )
        docs = read_csv_entities(path)
        assert len(docs) == 2
        assert docs[0].entities == [Entity(0, 7, "DRUG")]
        assert docs[1].entities == []

    def test_bad_json_line_reports_position(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text("{not json}\n", encoding="utf-8")
        with pytest.raises(PipelineError, match="bad.jsonl:1"):
            read_json_list(path)


class TestCallbacks:
    def test_duplicate_registration_rejected(self):
        reg = CallbackRegistry()
        reg.register_retrieval("bios-txt", read_bios)
        with pytest.raises(PipelineError, match="already registered"):
            reg.register_retrieval("bios-txt", read_bios)

    def test_unknown_callback_rejected(self):
        reg = CallbackRegistry()
        with pytest.raises(PipelineError, match="no retrieval callback"):
            reg.retrieval("missing")

    def test_default_registry_has_builtins(self):
        reg = default_registry()
        assert reg.retrieval("bios-txt") is read_bios
        assert reg.feature_extractor("identity")("x") == "x"


class TestCleaners:
    def test_empty_cleaner_list_is_identity(self):
        doc = AnnotatedDocument("d", "abc", [Entity(0, 1, "X")])
        assert apply_cleaners(doc, []) is doc

    def test_whitespace_normalization_remaps_offsets(self):
        doc = AnnotatedDocument("d", "a  b", [Entity(3, 4, "X")])
        cleaned = normalize_whitespace(doc)
        assert cleaned.text == "a b"
        assert cleaned.surface(cleaned.entities[0]) == "b"

    def test_normalization_handles_edges_and_tabs(self):
        doc = AnnotatedDocument("d", "  drug\t\tname  ", [Entity(2, 6, "X"), Entity(8, 12, "Y")])
        cleaned = normalize_whitespace(doc)
        assert cleaned.text == "drug name"
        assert cleaned.surface(cleaned.entities[0]) == "drug"
        assert cleaned.surface(cleaned.entities[1]) == "name"

    def test_span_covering_collapsed_gap_stays_valid(self):
        doc = AnnotatedDocument("d", "big  gap", [Entity(0, 8, "X")])
        cleaned = normalize_whitespace(doc)
        assert cleaned.surface(cleaned.entities[0]) == "big gap"

    def test_broken_cleaner_is_named(self):
        def bad_cleaner(doc):
            return AnnotatedDocument(doc.doc_id, doc.text, [Entity(2, 1, "X")])

        doc = AnnotatedDocument("d", "abc")
        with pytest.raises(PipelineError, match="bad_cleaner"):
            apply_cleaners(doc, [bad_cleaner])


class TestExtractors:
    def test_token_label_inverts_bios_reader(self, tmp_path, rng):
        path = tmp_path / "corpus.txt"
        sentences = generate_bios_sentences(rng, 10)
        write_bios_file(path, sentences)
        for doc, sentence in zip(read_bios(path), sentences):
            rec = token_label(doc)
            assert list(zip(rec["tokens"], rec["tags"])) == sentence

    def test_token_label_rejects_misaligned_span(self):
        doc = AnnotatedDocument("d", "ab cd", [Entity(1, 4, "X")])
        with pytest.raises(PipelineError, match="align"):
            token_label(doc)

    def test_label_matrix_blocks(self):
        doc = AnnotatedDocument(
            "d", "abcd", [Entity(0, 2, "E1"), Entity(3, 4, "E2")], [Relation(0, 1, "rel")]
        )
        rec = label_matrix(doc)
        grid = rec["labels"]
        assert rec["n"] == 4
        assert grid[0][0] == grid[0][1] == grid[1][1] == "E1"
        assert grid[3][3] == "E2"
        assert grid[0][3] == grid[1][3] == "rel"
        assert grid[2][2] == "O"


class TestLoader:
    @pytest.fixture
    def seeded_corpus(self, tmp_path, rng):
        path = tmp_path / "corpus.txt"
        write_bios_file(path, generate_bios_sentences(rng, 5))
        return path

    def _bind(self, registry, corpus):
        make_dataset(registry, "ds", corpus_ref=str(corpus), reader="bios-txt")
        make_model(registry, "mdl", feature_extractor="identity")

    def test_batch_sizes(self, registry, seeded_corpus):
        self._bind(registry, seeded_corpus)
        loader = build_loader(registry, "ds", "mdl", PipelineSpec(batch_size=2))
        assert [len(b) for b in loader] == [2, 2, 1]
        assert len(loader) == 3

    def test_shuffle_deterministic_per_seed(self, registry, seeded_corpus):
        self._bind(registry, seeded_corpus)
        spec = PipelineSpec(batch_size=2, shuffle=True)
        ids1 = [
            d.doc_id
            for batch in build_loader(registry, "ds", "mdl", spec, seed=7)
            for d in batch
        ]
        ids2 = [
            d.doc_id
            for batch in build_loader(registry, "ds", "mdl", spec, seed=7)
            for d in batch
        ]
        assert ids1 == ids2
        assert sorted(ids1) == sorted(d.doc_id for d in read_bios(seeded_corpus))

    def test_epochs_reshuffle_but_cover_every_doc(self, registry, seeded_corpus):
        self._bind(registry, seeded_corpus)
        loader = build_loader(registry, "ds", "mdl", PipelineSpec(batch_size=3, shuffle=True))
        epoch1 = [d.doc_id for b in loader for d in b]
        epoch2 = [d.doc_id for b in loader for d in b]
        assert sorted(epoch1) == sorted(epoch2)

    def test_unresolvable_callback(self, registry, seeded_corpus):
        make_dataset(registry, "ds", corpus_ref=str(seeded_corpus), reader="nope")
        make_model(registry, "mdl", feature_extractor="identity")
        with pytest.raises(PipelineError, match="nope"):
            build_loader(registry, "ds", "mdl")

    def test_missing_binding(self, registry, seeded_corpus):
        make_dataset(registry, "ds", corpus_ref=str(seeded_corpus))
        make_model(registry, "mdl", feature_extractor="identity")
        with pytest.raises(PipelineError, match="no retrieval callback bound"):
            build_loader(registry, "ds", "mdl")

    def test_extractor_error_carries_doc_id(self, registry, seeded_corpus, tmp_path):
        path = tmp_path / "misaligned.jsonl"
        rec = {"text": "ab cd", "entities": [{"start": 1, "end": 4, "type": "X"}]}
        path.write_text(json.dumps(rec) + "\n", encoding="utf-8")
        make_dataset(registry, "ds", corpus_ref=str(path), reader="json-list")
        make_model(registry, "mdl", feature_extractor="token-label")
        with pytest.raises(PipelineError, match="misaligned-0"):
            build_loader(registry, "ds", "mdl")

    def test_n_plus_m_adaptation(self, registry, tmp_path, rng):
        """3 datasets x 2 models served by exactly 3 + 2 registered callbacks."""
        callbacks = CallbackRegistry()
        callbacks.register_retrieval("bios-txt", read_bios)
        callbacks.register_retrieval("json-list", read_json_list)
        callbacks.register_retrieval("csv-entities", read_csv_entities)
        callbacks.register_feature_extractor("identity", lambda d: d)
        callbacks.register_feature_extractor("token-label", token_label)
        assert callbacks.counts() == {
            "retrieval": 3,
            "cleaner": 0,
            "feature_extractor": 2,
        }

        bios_path = tmp_path / "a.txt"
        write_bios_file(bios_path, generate_bios_sentences(rng, 3))
        json_path = tmp_path / "b.jsonl"
        json_path.write_text(
            json.dumps({"text": "plain doc", "entities": []}) + "\n", encoding="utf-8"
        )
        csv_path = tmp_path / "c.csv"
        csv_path.write_text(
            "doc_id,text,start,end,type\nd1,aspirin now,0,7,DRUG\n", encoding="utf-8"
        )
        make_dataset(registry, "a", corpus_ref=str(bios_path), reader="bios-txt")
        make_dataset(registry, "b", corpus_ref=str(json_path), reader="json-list")
        make_dataset(registry, "c", corpus_ref=str(csv_path), reader="csv-entities")
        make_model(registry, "m1", feature_extractor="identity")
        make_model(registry, "m2", feature_extractor="token-label")

        for ds in ("a", "b", "c"):
            for mdl in ("m1", "m2"):
                loader = build_loader(registry, ds, mdl, callbacks=callbacks)
                batches = list(loader)
                assert sum(len(b) for b in batches) == len(loader.documents) > 0

    def test_fused_cleaners_equal_staged_cleaners(self):
        def upper(doc):
            return AnnotatedDocument(doc.doc_id, doc.text.upper(), list(doc.entities))

        doc = AnnotatedDocument("d", "a  b c", [Entity(5, 6, "X")])
        staged = apply_cleaners(doc, [normalize_whitespace, upper])
        fused = apply_cleaners(doc, [lambda d: upper(normalize_whitespace(d))])
        assert staged.text == fused.text
        assert staged.entities == fused.entities
