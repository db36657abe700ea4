from __future__ import annotations

from html.parser import HTMLParser

from clipse.corpus import Annotation, Corpus, Document
from clipse.harmonize import scenario_preset
from clipse.report import render_report

BINARY = scenario_preset("binary")


class Spans(HTMLParser):
    """Collects the text of every tp/fp/fn-classed element."""

    def __init__(self) -> None:
        super().__init__()
        self.spans: list[tuple[str, str]] = []
        self._open: list[list] = []

    def handle_starttag(self, tag, attrs):
        cls = dict(attrs).get("class")
        self._open.append([cls, ""])

    def handle_endtag(self, tag):
        cls, text = self._open.pop()
        if self._open:
            self._open[-1][1] += text
        if cls in ("tp", "fp", "fn"):
            self.spans.append((cls, text))

    def handle_data(self, data):
        if self._open:
            self._open[-1][1] += data


def parse(html: str) -> list[tuple[str, str]]:
    parser = Spans()
    parser.feed(html)
    return parser.spans


def corpus(pred: list[Annotation]) -> Corpus:
    doc = Document("d", "Jane Roe <3 & seen")
    gold = [Annotation("d", 0, 8, "Jane Roe", "patient")]
    return Corpus({"d": doc}, {"gold": gold, "pred": pred}).validate()


def test_perfect_prediction_has_no_errors():
    c = corpus([Annotation("d", 0, 8, "Jane Roe", "patient", annotator="pred")])
    spans = parse(render_report(c, "gold", "pred", BINARY))
    assert spans == [("tp", "Jane"), ("tp", "Roe")]


def test_one_missed_token():
    c = corpus([Annotation("d", 0, 4, "Jane", "patient", annotator="pred")])
    spans = parse(render_report(c, "gold", "pred", BINARY))
    assert [s for s in spans if s[0] == "fn"] == [("fn", "Roe")]


def test_multiclass_mismatch_nests_fp_in_fn():
    c = corpus([Annotation("d", 0, 4, "Jane", "date", annotator="pred")])
    html = render_report(c, "gold", "pred", scenario_preset("multiclass"))
    assert sorted(parse(html)) == [("fn", "Jane"), ("fn", "Roe"), ("fp", "Jane")]


def test_text_is_escaped():
    html = render_report(corpus([]), "gold", "pred", BINARY)
    assert "&lt;3 &amp; seen" in html and "<3 &" not in html


def test_empty_corpus_renders():
    html = render_report(Corpus({}, {"gold": [], "pred": []}), "gold", "pred", BINARY)
    assert html.startswith("<!DOCTYPE html>") and html.rstrip().endswith("</html>")
    assert parse(html) == []
    assert '<table class="documents"><tr><th>document</th>' in html


def test_documents_sorted_by_false_negatives():
    docs = {"a": Document("a", "fine"), "b": Document("b", "Jane Roe")}
    gold = [Annotation("b", 0, 8, "Jane Roe", "patient")]
    c = Corpus(docs, {"gold": gold, "pred": []}).validate()
    html = render_report(c, "gold", "pred", BINARY)
    assert html.index(">b <small>") < html.index(">a <small>")
