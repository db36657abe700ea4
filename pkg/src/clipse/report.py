"""Self-contained static HTML report of token-level agreement.

Every scored token outcome becomes one element whose class attribute is
exactly ``tp``, ``fp`` or ``fn``. A token that gold and prediction label
with different classes (multiclass mode) is both a false negative and a false
positive and is rendered as an ``fn`` element wrapping an ``fp`` element, so
counting classed elements reproduces the confusion counts.
"""

from __future__ import annotations

import html
from typing import Sequence

from .corpus import Corpus
from .evaluate import (
    ClassCounts,
    ConfusionCounts,
    EvalResult,
    count_labels,
    evaluate_corpus,
    project_labels,
    scenario_classes,
    scenario_labels,
)
from .harmonize import LabelMap, ScenarioConfig, builtin_label_map
from .tokenize import Token, Tokenizer, resolve_tokenizer

_STYLE = """
body { font-family: -apple-system, "Segoe UI", Helvetica, Arial, sans-serif; margin: 2em; color: #222; }
h1 { font-size: 1.4em; } h2 { font-size: 1.1em; margin-top: 2em; }
table { border-collapse: collapse; margin: 1em 0; }
th, td { border: 1px solid #ccc; padding: 4px 8px; text-align: right; }
th:first-child, td:first-child { text-align: left; }
.note { white-space: pre-wrap; font-family: Menlo, Consolas, monospace; font-size: 0.9em;
        border: 1px solid #ddd; padding: 1em; background: #fafafa; line-height: 1.6; }
.tp, .key-tp { background: #c8ecc8; }
.fp, .key-fp { background: #f9e0a0; }
.fn, .key-fn { background: #f5b5b5; outline: 1px solid #c33; }
.fn .fp { background: #f9e0a0; }
.legend span { padding: 2px 6px; margin-right: 1em; }
"""


def _span(cls: str, title: str, inner: str) -> str:
    return f'<span class="{cls}" title="{html.escape(title)}">{inner}</span>'


def _render_note(text: str, tokens: Sequence[Token], gold: Sequence[str | None], pred: Sequence[str | None]) -> str:
    out: list[str] = []
    cursor = 0
    for tok, g, p in zip(tokens, gold, pred):
        out.append(html.escape(text[cursor : tok.start]))
        body = html.escape(tok.text)
        if g is None and p is None:
            out.append(body)
        elif g == p:
            out.append(_span("tp", f"gold/pred: {g}", body))
        elif g is None:
            out.append(_span("fp", f"pred: {p}", body))
        elif p is None:
            out.append(_span("fn", f"gold: {g}", body))
        else:
            out.append(_span("fn", f"gold: {g}", _span("fp", f"pred: {p}", body)))
        cursor = tok.stop
    out.append(html.escape(text[cursor:]))
    return "".join(out)


def _fmt(x: float) -> str:
    return f"{x:.4f}"


def _metrics_table(result: EvalResult) -> str:
    rows = [
        "<tr><th>class</th><th>tp</th><th>fp</th><th>fn</th><th>precision</th>"
        "<th>recall</th><th>f1</th><th>fn/1000</th></tr>"
    ]
    for name, c in result.counts.per_class.items():
        rows.append(
            f"<tr><td>{html.escape(name)}</td><td>{c.tp}</td><td>{c.fp}</td><td>{c.fn}</td>"
            f"<td>{_fmt(result.precision[name])}</td><td>{_fmt(result.recall[name])}</td>"
            f"<td>{_fmt(result.f1[name])}</td><td>{_fmt(result.fn_per_1000[name])}</td></tr>"
        )
    pooled = result.counts.pooled
    rows.append(
        f"<tr><th>micro</th><th>{pooled.tp}</th><th>{pooled.fp}</th><th>{pooled.fn}</th>"
        f"<th>{_fmt(result.micro_precision)}</th><th>{_fmt(result.micro_recall)}</th>"
        f"<th>{_fmt(result.micro_f1)}</th><th>{_fmt(result.micro_fn_per_1000)}</th></tr>"
    )
    return '<table class="metrics">' + "".join(rows) + "</table>"


def _empty_result(cfg: ScenarioConfig) -> EvalResult:
    return EvalResult.from_counts(ConfusionCounts({c: ClassCounts() for c in scenario_classes(cfg)}))


def render_report(
    corpus: Corpus,
    gold: str,
    pred: str,
    cfg: ScenarioConfig,
    result: EvalResult | None = None,
    tokenizer: str | Tokenizer | None = None,
    *,
    label_map: LabelMap | None = None,
) -> str:
    """Render the report; ``result`` is computed when not supplied."""
    corpus.require_annotators(gold, pred)
    tok_name, tokenize = resolve_tokenizer(tokenizer)
    label_map = builtin_label_map() if label_map is None else label_map
    if result is None:
        if corpus.documents:
            result = evaluate_corpus(corpus, gold, pred, cfg, tokenize, label_map=label_map)
        else:
            result = _empty_result(cfg)

    gold_by_doc, pred_by_doc = corpus.by_document(gold), corpus.by_document(pred)
    sections = []
    for doc_id, doc in corpus.documents.items():
        tokens = tokenize(doc.text)
        g, p = project_labels(
            scenario_labels(tokens, gold_by_doc[doc_id], cfg, label_map),
            scenario_labels(tokens, pred_by_doc[doc_id], cfg, label_map),
            cfg,
        )
        counts = count_labels(g, p, scenario_classes(cfg, (*g, *p))).pooled
        sections.append((counts, doc_id, len(tokens), _render_note(doc.text, tokens, g, p)))
    sections.sort(key=lambda s: (-s[0].fn, s[1]))

    doc_rows = "".join(
        f'<tr><td><a href="#doc-{i}">{html.escape(doc_id)}</a></td><td>{n}</td>'
        f"<td>{c.tp}</td><td>{c.fp}</td><td>{c.fn}</td></tr>"
        for i, (c, doc_id, n, _) in enumerate(sections)
    )
    notes = "".join(
        f'<h2 id="doc-{i}">{html.escape(doc_id)} <small>(tp {c.tp}, fp {c.fp}, fn {c.fn})</small></h2>'
        f'<div class="note">{body}</div>'
        for i, (c, doc_id, _, body) in enumerate(sections)
    )
    mode = cfg.mode if cfg.mode != "per_entity" else f"per_entity({cfg.entity})"
    return (
        "<!DOCTYPE html>\n<html lang=\"en\"><head><meta charset=\"utf-8\">"
        f"<title>Deidentification report: {html.escape(pred)} vs {html.escape(gold)}</title>"
        f"<style>{_STYLE}</style></head><body>"
        f"<h1>{html.escape(pred)} vs {html.escape(gold)}</h1>"
        f"<p>Scenario: {html.escape(mode)}; tokenizer: {html.escape(tok_name)}; "
        f"documents: {result.counts.total_documents}; tokens: {result.counts.total_tokens}</p>"
        '<p class="legend"><span class="key-tp">true positive</span><span class="key-fp">false positive</span>'
        '<span class="key-fn">false negative</span></p>'
        f"{_metrics_table(result)}"
        "<h2>Documents by false negatives</h2>"
        '<table class="documents"><tr><th>document</th><th>tokens</th><th>tp</th><th>fp</th><th>fn</th></tr>'
        f"{doc_rows}</table>"
        f"{notes}"
        "</body></html>\n"
    )
