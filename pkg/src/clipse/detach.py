"""Text-free token labels that keep evaluations reproducible after deleting notes.

Each detached document stores token offsets and, per annotator, the token
categories left after harmonization and scenario filtering. Scoring a pair of
annotators then needs only these labels, so the detached form reproduces
:func:`clipse.evaluate.evaluate_corpus` exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .corpus import ClipseError, Corpus
from .evaluate import (
    ConfusionCounts,
    EvalResult,
    count_labels,
    pool,
    project_labels,
    scenario_classes,
    scenario_labels,
)
from .harmonize import LabelMap, ScenarioConfig, builtin_label_map, config_fingerprint
from .tokenize import Tokenizer, resolve_tokenizer


class DetachError(ClipseError, ValueError):
    pass


@dataclass(frozen=True)
class DetachedDocument:
    doc_id: str
    offsets: list[tuple[int, int]]
    labels: dict[str, list[str | None]]

    def __post_init__(self) -> None:
        for annotator, labels in self.labels.items():
            if len(labels) != len(self.offsets):
                raise DetachError(
                    f"{self.doc_id}: {annotator!r} has {len(labels)} labels for {len(self.offsets)} tokens"
                )


@dataclass(frozen=True)
class DetachedCorpus:
    tokenizer: str
    scenario: ScenarioConfig
    fingerprint: str
    documents: dict[str, DetachedDocument] = field(default_factory=dict)

    @property
    def annotators(self) -> list[str]:
        names: set[str] = set()
        for doc in self.documents.values():
            names.update(doc.labels)
        return sorted(names)


def detach_corpus(
    corpus: Corpus,
    annotators: Sequence[str],
    cfg: ScenarioConfig,
    tokenizer: str | Tokenizer | None = None,
    *,
    label_map: LabelMap | None = None,
) -> DetachedCorpus:
    corpus.require_annotators(*annotators)
    name, tokenize = resolve_tokenizer(tokenizer)
    label_map = builtin_label_map() if label_map is None else label_map
    grouped = {a: corpus.by_document(a) for a in annotators}
    documents = {}
    for doc_id, doc in corpus.documents.items():
        tokens = tokenize(doc.text)
        documents[doc_id] = DetachedDocument(
            doc_id,
            [(t.start, t.stop) for t in tokens],
            {a: scenario_labels(tokens, grouped[a][doc_id], cfg, label_map) for a in annotators},
        )
    return DetachedCorpus(name, cfg, config_fingerprint(name, cfg, label_map), documents)


def evaluate_detached(
    detached: DetachedCorpus,
    gold: str,
    pred: str,
    *,
    expected_fingerprint: str | None = None,
) -> EvalResult:
    """Score ``pred`` against ``gold`` using only detached labels.

    ``expected_fingerprint`` (see :func:`clipse.harmonize.config_fingerprint`)
    guards against comparing labels produced under another configuration.
    """
    if expected_fingerprint is not None and expected_fingerprint != detached.fingerprint:
        raise DetachError(
            f"fingerprint mismatch: detached labels were made with {detached.fingerprint[:12]}, "
            f"expected {expected_fingerprint[:12]}"
        )
    cfg = detached.scenario
    per_document: dict[str, ConfusionCounts] = {}
    for doc_id, doc in detached.documents.items():
        for annotator in (gold, pred):
            if annotator not in doc.labels:
                raise DetachError(f"annotator {annotator!r} has no detached labels for {doc_id!r}")
        g, p = project_labels(doc.labels[gold], doc.labels[pred], cfg)
        per_document[doc_id] = count_labels(g, p, scenario_classes(cfg, (*g, *p)))
    return pool(per_document, cfg)


def write_detached(detached: DetachedCorpus, path: str | Path) -> None:
    """Write one JSON object per document."""
    with open(path, "w", encoding="utf-8") as fh:
        for doc in detached.documents.values():
            record = {
                "doc_id": doc.doc_id,
                "offsets": [list(pair) for pair in doc.offsets],
                "labels": doc.labels,
                "fingerprint": detached.fingerprint,
                "tokenizer": detached.tokenizer,
                "scenario": detached.scenario.to_dict(),
            }
            fh.write(json.dumps(record, sort_keys=True))
            fh.write("\n")


def read_detached(path: str | Path) -> DetachedCorpus:
    """Read a detached JSONL file; every record must share one fingerprint."""
    documents: dict[str, DetachedDocument] = {}
    header: tuple[str, str, dict] | None = None
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                this = (rec["fingerprint"], rec["tokenizer"], rec["scenario"])
                doc = DetachedDocument(rec["doc_id"], [tuple(p) for p in rec["offsets"]], rec["labels"])
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise DetachError(f"{path}:{lineno}: malformed detached record ({exc})") from None
            if header is None:
                header = this
            elif this[0] != header[0]:
                raise DetachError(f"{path}:{lineno}: fingerprint differs from earlier records")
            documents[doc.doc_id] = doc
    if header is None:
        raise DetachError(f"{path}: no detached records")
    fingerprint, tokenizer, scenario = header
    return DetachedCorpus(tokenizer, ScenarioConfig.from_dict(scenario), fingerprint, documents)
