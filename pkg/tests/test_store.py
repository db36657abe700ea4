from __future__ import annotations

import json
import random

import pyarrow.parquet as pq
import pytest
from factories import degrade
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from clipse.corpus import Annotation, Corpus, CorpusError, Document, Gazetteer
from clipse.store import StoreError, read_corpus, write_corpus
from clipse.synth import generate_corpus


def one_doc_corpus() -> Corpus:
    return Corpus({"d1": Document("d1", "hello world", "test", "train")}, {})


def test_single_document_without_annotations(tmp_path):
    out = tmp_path / "c"
    write_corpus(one_doc_corpus(), out)
    assert pq.read_table(out / "documents.parquet").num_rows == 1
    assert not any((out / "annotations").iterdir())
    assert read_corpus(out) == one_doc_corpus()


def test_two_annotators_give_two_partitions(tmp_path):
    corpus = generate_corpus(3, 4)
    corpus = degrade(corpus, random.Random(0), "pred")
    write_corpus(corpus, tmp_path / "c")
    parts = sorted(p.name for p in (tmp_path / "c" / "annotations").iterdir())
    assert parts == ["annotator=gold", "annotator=pred"]
    table = pq.read_table(tmp_path / "c" / "annotations" / "annotator=pred" / "part-0.parquet")
    assert table.num_rows == len(corpus.annotation_sets["pred"])


def test_fifty_document_round_trip_both_formats(tmp_path):
    corpus = generate_corpus(11, 50)
    for fmt in ("parquet", "jsonl"):
        write_corpus(corpus, tmp_path / fmt, fmt)
        assert read_corpus(tmp_path / fmt) == corpus


def test_empty_annotation_set_survives_round_trip(tmp_path):
    corpus = one_doc_corpus().with_annotations("nobody", [])
    for fmt in ("parquet", "jsonl"):
        write_corpus(corpus, tmp_path / fmt, fmt)
        assert read_corpus(tmp_path / fmt).annotation_sets == {"nobody": []}


def test_annotator_names_needing_escapes(tmp_path):
    corpus = Corpus(
        {"d": Document("d", "Jane Doe")},
        {"a/b=c d": [Annotation("d", 0, 4, "Jane", "patient", annotator="a/b=c d")]},
    )
    write_corpus(corpus, tmp_path / "c")
    assert read_corpus(tmp_path / "c") == corpus


def test_read_rejects_out_of_range_annotation(tmp_path):
    out = tmp_path / "c"
    write_corpus(one_doc_corpus(), out, "jsonl")
    (out / "annotations.jsonl").write_text(
        json.dumps({"doc_id": "d1", "start": 6, "stop": 40, "literal": "world", "raw_label": "name",
                    "category": None, "annotator": "gold"}) + "\n"
    )
    (out / "annotators.jsonl").write_text(json.dumps({"annotator": "gold"}) + "\n")
    with pytest.raises(CorpusError, match="d1:6-40"):
        read_corpus(out)


def test_write_refuses_non_empty_directory(tmp_path):
    (tmp_path / "c").mkdir()
    (tmp_path / "c" / "keep.txt").write_text("x")
    with pytest.raises(StoreError):
        write_corpus(one_doc_corpus(), tmp_path / "c")


def test_read_missing_directory_is_an_error(tmp_path):
    with pytest.raises(StoreError):
        read_corpus(tmp_path / "nowhere")


def test_gazetteers_round_trip(tmp_path):
    corpus = Corpus(
        {"d": Document("d", "x")}, {}, [Gazetteer.from_strings("names", "name", ["Ann", "Bo"])]
    )
    write_corpus(corpus, tmp_path / "c")
    assert read_corpus(tmp_path / "c").gazetteers == corpus.gazetteers


@settings(max_examples=25, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(st.lists(st.text(min_size=1, max_size=30), min_size=1, max_size=4), st.sampled_from(["parquet", "jsonl"]))
def test_arbitrary_text_round_trips(tmp_path_factory, texts, fmt):
    docs = {f"doc{i}": Document(f"doc{i}", t) for i, t in enumerate(texts)}
    anns = [Annotation(d.doc_id, 0, len(d.text), d.text, "name") for d in docs.values()]
    corpus = Corpus(docs, {"gold": anns})
    out = tmp_path_factory.mktemp("rt") / "c"
    write_corpus(corpus, out, fmt)
    assert read_corpus(out) == corpus
