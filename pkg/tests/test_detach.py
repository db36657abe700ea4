from __future__ import annotations

import json

import pytest
from factories import seeded_corpus

from clipse.corpus import Annotation, Corpus, Document
from clipse.detach import DetachError, detach_corpus, evaluate_detached, read_detached, write_detached
from clipse.evaluate import evaluate_corpus
from clipse.harmonize import config_fingerprint, builtin_label_map, scenario_preset

BINARY = scenario_preset("binary")


def five_token_corpus() -> Corpus:
    doc = Document("d", "Jane Roe seen by Smith")
    return Corpus(
        {"d": doc},
        {
            "gold": [Annotation("d", 0, 8, "Jane Roe", "patient"), Annotation("d", 17, 22, "Smith", "doctor")],
            "pred": [Annotation("d", 0, 4, "Jane", "name", annotator="pred")],
        },
    ).validate()


def test_structure_of_one_document(tmp_path):
    detached = detach_corpus(five_token_corpus(), ["gold", "pred"], BINARY)
    doc = detached.documents["d"]
    assert doc.offsets == [(0, 4), (5, 8), (9, 13), (14, 16), (17, 22)]
    assert doc.labels == {"gold": ["name", "name", None, None, "name"], "pred": ["name", None, None, None, None]}
    write_detached(detached, tmp_path / "d.jsonl")
    (record,) = [json.loads(line) for line in (tmp_path / "d.jsonl").read_text().splitlines()]
    assert len(record["offsets"]) == 5 and all(len(v) == 5 for v in record["labels"].values())
    assert "Jane" not in (tmp_path / "d.jsonl").read_text()


def test_empty_corpus():
    detached = detach_corpus(Corpus({}, {"gold": []}), ["gold"], BINARY)
    assert detached.documents == {}


def test_equivalence_and_identity(tmp_path):
    corpus = seeded_corpus(9)
    for preset in ("binary", "multiclass", "hipaa-strict", "name-only"):
        cfg = scenario_preset(preset)
        detached = detach_corpus(corpus, ["gold", "pred"], cfg)
        write_detached(detached, tmp_path / f"{preset}.jsonl")
        restored = read_detached(tmp_path / f"{preset}.jsonl")
        assert evaluate_detached(restored, "gold", "pred") == evaluate_corpus(corpus, "gold", "pred", cfg)
        assert evaluate_detached(restored, "gold", "gold").micro_f1 == 1.0


def test_fingerprint_mismatch_is_an_error():
    detached = detach_corpus(five_token_corpus(), ["gold", "pred"], BINARY, "wordpunct")
    other = config_fingerprint("whitespace", BINARY, builtin_label_map())
    with pytest.raises(DetachError, match="fingerprint"):
        evaluate_detached(detached, "gold", "pred", expected_fingerprint=other)


def test_mixed_fingerprints_in_file_are_rejected(tmp_path):
    a = detach_corpus(five_token_corpus(), ["gold"], BINARY, "wordpunct")
    b = detach_corpus(five_token_corpus(), ["gold"], BINARY, "whitespace")
    write_detached(a, tmp_path / "a.jsonl")
    write_detached(b, tmp_path / "b.jsonl")
    (tmp_path / "mixed.jsonl").write_text((tmp_path / "a.jsonl").read_text() + (tmp_path / "b.jsonl").read_text())
    with pytest.raises(DetachError):
        read_detached(tmp_path / "mixed.jsonl")


def test_missing_annotator_in_detached_labels():
    detached = detach_corpus(five_token_corpus(), ["gold"], BINARY)
    with pytest.raises(DetachError, match="pred"):
        evaluate_detached(detached, "gold", "pred")
