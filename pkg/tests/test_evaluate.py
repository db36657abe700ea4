from __future__ import annotations

import random

import pytest
from factories import seeded_corpus
from hypothesis import given
from hypothesis import strategies as st

from clipse.corpus import Annotation, Corpus, Document
from clipse.evaluate import (
    ClassCounts,
    ConfusionCounts,
    EvalResult,
    EvaluationError,
    TokenLabeling,
    assign_categories,
    count_labels,
    entity_counts,
    evaluate_corpus,
    evaluate_corpus_entities,
    evaluate_entities,
    evaluate_pair,
    label_tokens,
    pool,
)
from clipse.harmonize import ScenarioConfig, scenario_preset
from clipse.synth import generate_corpus
from clipse.tokenize import Token

BINARY = ScenarioConfig()


def a(start: int, stop: int, category: str, doc_id: str = "d") -> Annotation:
    return Annotation(doc_id, start, stop, "x" * (stop - start), category, category)


def test_single_character_overlap_labels_token():
    assert assign_categories([Token(5, 10, "hello")], [a(0, 6, "name")]) == ["name"]


def test_token_without_overlap_is_unlabelled():
    assert assign_categories([Token(5, 10, "hello")], []) == [None]


def test_largest_overlap_wins():
    token = Token(0, 5, "abcde")
    assert assign_categories([token], [a(3, 5, "id"), a(0, 3, "date")]) == ["date"]


def test_overlap_tie_goes_to_earlier_start():
    token = Token(0, 4, "abcd")
    assert assign_categories([token], [a(2, 4, "name"), a(0, 2, "contact")]) == ["contact"]


def test_label_tokens_collapses_binary_and_entity():
    tokens = [Token(0, 2, "ab"), Token(3, 5, "cd")]
    anns = [a(0, 2, "date"), a(3, 5, "name")]
    assert label_tokens(tokens, anns, BINARY).labels == ["phi", "phi"]
    assert label_tokens(tokens, anns, scenario_preset("name-only")).labels == ["name", "name"]
    assert label_tokens(tokens, anns, scenario_preset("multiclass")).labels == ["date", "name"]


def ten_tokens() -> list[Token]:
    return [Token(2 * i, 2 * i + 1, "t") for i in range(10)]


def test_direct_count_example():
    gold = ["phi" if i in (2, 3) else None for i in range(10)]
    pred = ["phi" if i in (3, 4) else None for i in range(10)]
    result = evaluate_pair(TokenLabeling("d", ten_tokens(), gold), TokenLabeling("d", ten_tokens(), pred))
    assert result.counts.per_class["phi"] == ClassCounts(tp=1, fp=1, fn=1)
    assert result.micro_precision == result.micro_recall == result.micro_f1 == 0.5
    assert result.micro_fn_per_1000 == 100.0


def test_identity_and_empty_prediction():
    gold = ["phi" if i in (2, 3) else None for i in range(10)]
    same = evaluate_pair(TokenLabeling("d", ten_tokens(), gold), TokenLabeling("d", ten_tokens(), gold))
    assert (same.micro_precision, same.micro_recall, same.micro_f1, same.micro_fn_per_1000) == (1.0, 1.0, 1.0, 0.0)
    empty = evaluate_pair(TokenLabeling("d", ten_tokens(), gold), TokenLabeling("d", ten_tokens(), [None] * 10))
    assert (empty.micro_precision, empty.micro_recall, empty.micro_f1) == (0.0, 0.0, 0.0)


def test_evaluate_pair_requires_matching_tokens():
    with pytest.raises(EvaluationError):
        evaluate_pair(TokenLabeling("d", ten_tokens(), [None] * 10), TokenLabeling("e", ten_tokens(), [None] * 10))


def test_pooled_micro_average():
    docs = {
        "a": ConfusionCounts({"phi": ClassCounts(1, 0, 1)}, 10, 1),
        "b": ConfusionCounts({"phi": ClassCounts(3, 2, 0)}, 10, 1),
    }
    result = pool(docs, BINARY)
    assert result.micro_precision == pytest.approx(4 / 6, abs=1e-15)
    assert result.micro_recall == pytest.approx(4 / 5, abs=1e-15)
    assert result.counts.total_documents == 2


def test_fn_per_thousand_definition():
    result = EvalResult.from_counts(ConfusionCounts({"phi": ClassCounts(5, 0, 2)}, 1000, 1))
    assert result.fn_per_1000["phi"] == 2.0


def test_multiclass_confusion_counts_both_classes():
    counts = count_labels(["name", "date", None], ["date", "date", "id"], ["name", "date", "id"])
    assert counts.per_class == {"name": ClassCounts(0, 0, 1), "date": ClassCounts(1, 1, 0), "id": ClassCounts(0, 1, 0)}


def two_doc_corpus() -> Corpus:
    docs = {"a": Document("a", "Jane Roe seen 03/04/2020"), "b": Document("b", "Dr Smith called")}
    gold = [
        Annotation("a", 0, 8, "Jane Roe", "patient"),
        Annotation("a", 14, 24, "03/04/2020", "date"),
        Annotation("b", 3, 8, "Smith", "doctor"),
    ]
    pred = [Annotation("a", 0, 4, "Jane", "name", annotator="p"), Annotation("b", 0, 8, "Dr Smith", "name", annotator="p")]
    return Corpus(docs, {"gold": gold, "p": pred}).validate()


def test_corpus_binary_counts():
    result = evaluate_corpus(two_doc_corpus(), "gold", "p", BINARY)
    # a: Jane Roe 03 / 04 / 2020 -> gold 7 tokens, pred 1; b: Dr Smith -> gold 1, pred 2
    assert result.counts.per_class["phi"] == ClassCounts(tp=2, fp=1, fn=6)
    assert result.counts.total_tokens == 11
    assert result.counts.total_documents == 2
    assert [d["doc_id"] for d in result.to_dict()["documents"]] == ["a", "b"]


def test_name_only_ignores_other_gold_categories():
    result = evaluate_corpus(two_doc_corpus(), "gold", "p", scenario_preset("name-only"))
    assert result.counts.per_class == {"name": ClassCounts(tp=2, fp=1, fn=1)}


def test_missing_annotator_and_empty_corpus():
    with pytest.raises(Exception, match="missing"):
        evaluate_corpus(two_doc_corpus(), "gold", "missing", BINARY)
    with pytest.raises(EvaluationError):
        evaluate_corpus(Corpus({}, {"gold": [], "p": []}), "gold", "p", BINARY)


def test_entity_exact_cover_cases():
    gold = [a(0, 10, "name")]
    assert evaluate_entities(gold, [a(0, 10, "name")]) == (1.0, 1.0, 1.0)
    assert entity_counts(gold, [a(0, 5, "name")]).gold_covered == 0
    counts = entity_counts(gold, [a(0, 14, "name")])
    assert (counts.gold_covered, counts.pred_correct) == (1, 0)


def test_corpus_entity_counts():
    counts = evaluate_corpus_entities(two_doc_corpus(), "gold", "p", BINARY)
    assert (counts.gold_covered, counts.gold_total, counts.pred_correct, counts.pred_total) == (1, 3, 1, 2)


def test_parallel_evaluation_matches_serial():
    corpus = seeded_corpus(77, max_docs=20)
    for preset in ("binary", "multiclass"):
        cfg = scenario_preset(preset)
        assert evaluate_corpus(corpus, "gold", "pred", cfg, jobs=3) == evaluate_corpus(corpus, "gold", "pred", cfg)


def test_to_dict_shape():
    body = evaluate_corpus(generate_corpus(1, 3), "gold", "gold", BINARY).to_dict()
    assert set(body) == {"total_tokens", "total_documents", "classes", "micro", "documents"}
    assert body["micro"]["f1"] == 1.0


@given(st.integers(0, 10_000), st.sampled_from(["binary", "multiclass", "hipaa-strict", "name-only"]))
def test_count_invariants(seed, preset):
    corpus = seeded_corpus(seed, max_docs=3)
    cfg = scenario_preset(preset)
    result = evaluate_corpus(corpus, "gold", "pred", cfg)
    gold_vs_gold = evaluate_corpus(corpus, "gold", "gold", cfg)
    pred_vs_pred = evaluate_corpus(corpus, "pred", "pred", cfg)
    for cls, c in result.counts.per_class.items():
        # tp + fn is the gold token count of the class, tp + fp the predicted one
        assert c.tp + c.fn == gold_vs_gold.counts.per_class[cls].tp
        if preset != "name-only":
            assert c.tp + c.fp == pred_vs_pred.counts.per_class[cls].tp
        assert 0.0 <= result.precision[cls] <= 1.0 and 0.0 <= result.recall[cls] <= 1.0
    assert result.counts.total_tokens == gold_vs_gold.counts.total_tokens


def test_results_independent_of_document_order():
    corpus = seeded_corpus(5)
    docs = list(corpus.documents.values())
    random.Random(1).shuffle(docs)
    shuffled = Corpus({d.doc_id: d for d in docs}, corpus.annotation_sets)
    assert evaluate_corpus(shuffled, "gold", "pred", BINARY) == evaluate_corpus(corpus, "gold", "pred", BINARY)
