"""Token-level and entity-level scoring of predicted annotations against gold.

Evaluation runs in three steps per document:

1. tokenize the text;
2. harmonize both annotation sets, drop annotations excluded by the scenario,
   and give each token the category of the annotation overlapping it most
   (:func:`scenario_labels`);
3. project the category labels onto the scenario's classes
   (:func:`project_labels`) and count agreements.

Counts are pooled over documents before metrics are computed (micro-averaging).
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .corpus import CATEGORIES, Annotation, ClipseError, Corpus, Document, category_rank
from .harmonize import PHI, LabelMap, ScenarioConfig, apply_scenario, builtin_label_map, harmonize
from .parallel import parallel_map
from .tokenize import Token, Tokenizer, resolve_tokenizer


class EvaluationError(ClipseError, ValueError):
    pass


@dataclass(frozen=True)
class TokenLabeling:
    doc_id: str
    tokens: list[Token]
    labels: list[str | None]

    def __post_init__(self) -> None:
        if len(self.tokens) != len(self.labels):
            raise EvaluationError(
                f"{self.doc_id}: {len(self.tokens)} tokens but {len(self.labels)} labels"
            )


@dataclass(frozen=True)
class ClassCounts:
    tp: int = 0
    fp: int = 0
    fn: int = 0

    def __add__(self, other: ClassCounts) -> ClassCounts:
        return ClassCounts(self.tp + other.tp, self.fp + other.fp, self.fn + other.fn)


@dataclass(frozen=True)
class ConfusionCounts:
    per_class: dict[str, ClassCounts] = field(default_factory=dict)
    total_tokens: int = 0
    total_documents: int = 0

    def __add__(self, other: ConfusionCounts) -> ConfusionCounts:
        keys = sorted(set(self.per_class) | set(other.per_class), key=lambda c: (category_rank(c), c))
        return ConfusionCounts(
            {k: self.per_class.get(k, ClassCounts()) + other.per_class.get(k, ClassCounts()) for k in keys},
            self.total_tokens + other.total_tokens,
            self.total_documents + other.total_documents,
        )

    @property
    def pooled(self) -> ClassCounts:
        return sum(self.per_class.values(), ClassCounts())


def _ratio(num: int, den: int) -> float:
    return num / den if den else 0.0


def _f1(p: float, r: float) -> float:
    return 2 * p * r / (p + r) if p + r else 0.0


def _fn_rate(fn: int, total_tokens: int) -> float:
    return 1000 * fn / total_tokens if total_tokens else 0.0


@dataclass(frozen=True)
class EvalResult:
    counts: ConfusionCounts
    precision: dict[str, float]
    recall: dict[str, float]
    f1: dict[str, float]
    fn_per_1000: dict[str, float]
    micro_precision: float
    micro_recall: float
    micro_f1: float
    micro_fn_per_1000: float
    per_document: dict[str, ConfusionCounts] = field(default_factory=dict)

    @classmethod
    def from_counts(
        cls, counts: ConfusionCounts, per_document: Mapping[str, ConfusionCounts] | None = None
    ) -> EvalResult:
        precision, recall, f1, fn_rate = {}, {}, {}, {}
        for name, c in counts.per_class.items():
            precision[name] = _ratio(c.tp, c.tp + c.fp)
            recall[name] = _ratio(c.tp, c.tp + c.fn)
            f1[name] = _f1(precision[name], recall[name])
            fn_rate[name] = _fn_rate(c.fn, counts.total_tokens)
        pooled = counts.pooled
        micro_p = _ratio(pooled.tp, pooled.tp + pooled.fp)
        micro_r = _ratio(pooled.tp, pooled.tp + pooled.fn)
        return cls(
            counts=counts,
            precision=precision,
            recall=recall,
            f1=f1,
            fn_per_1000=fn_rate,
            micro_precision=micro_p,
            micro_recall=micro_r,
            micro_f1=_f1(micro_p, micro_r),
            micro_fn_per_1000=_fn_rate(pooled.fn, counts.total_tokens),
            per_document=dict(per_document or {}),
        )

    def to_dict(self) -> dict:
        """JSON-ready report body."""
        classes = {}
        for name, c in self.counts.per_class.items():
            classes[name] = {
                "tp": c.tp,
                "fp": c.fp,
                "fn": c.fn,
                "precision": self.precision[name],
                "recall": self.recall[name],
                "f1": self.f1[name],
                "fn_per_1000": self.fn_per_1000[name],
            }
        pooled = self.counts.pooled
        return {
            "total_tokens": self.counts.total_tokens,
            "total_documents": self.counts.total_documents,
            "classes": classes,
            "micro": {
                "tp": pooled.tp,
                "fp": pooled.fp,
                "fn": pooled.fn,
                "precision": self.micro_precision,
                "recall": self.micro_recall,
                "f1": self.micro_f1,
                "fn_per_1000": self.micro_fn_per_1000,
            },
            "documents": [
                {"doc_id": doc_id, "tokens": dc.total_tokens, **_counts_dict(dc.pooled)}
                for doc_id, dc in self.per_document.items()
            ],
        }


def _counts_dict(c: ClassCounts) -> dict:
    return {"tp": c.tp, "fp": c.fp, "fn": c.fn}


def assign_categories(tokens: Sequence[Token], annotations: Iterable[Annotation]) -> list[str | None]:
    """Category of the annotation overlapping each token the most.

    Ties go to the annotation starting earlier, then to the category that
    comes first in ``CATEGORIES``. Tokens without any overlap get ``None``.
    """
    stops = [t.stop for t in tokens]
    best: list[tuple | None] = [None] * len(tokens)
    for ann in annotations:
        if ann.category is None:
            raise EvaluationError(f"annotation {ann.doc_id}:{ann.start}-{ann.stop} has no category")
        i = bisect_right(stops, ann.start)
        while i < len(tokens) and tokens[i].start < ann.stop:
            tok = tokens[i]
            overlap = min(tok.stop, ann.stop) - max(tok.start, ann.start)
            key = (-overlap, ann.start, category_rank(ann.category), ann.category)
            if best[i] is None or key < best[i]:
                best[i] = key
            i += 1
    return [None if b is None else b[3] for b in best]


def _collapse(label: str | None, cfg: ScenarioConfig) -> str | None:
    if label is None or cfg.mode == "multiclass":
        return label
    if cfg.mode == "binary":
        return PHI
    return cfg.entity


def label_tokens(
    tokens: Sequence[Token],
    annotations: Iterable[Annotation],
    mode: ScenarioConfig,
    doc_id: str = "",
) -> TokenLabeling:
    """Label tokens by any-overlap with harmonized annotations.

    In binary mode every category collapses to ``"phi"``; in per-entity mode
    every category collapses to the target entity.
    """
    labels = [_collapse(label, mode) for label in assign_categories(tokens, annotations)]
    return TokenLabeling(doc_id, list(tokens), labels)


def project_labels(
    gold: Sequence[str | None], pred: Sequence[str | None], cfg: ScenarioConfig
) -> tuple[list[str | None], list[str | None]]:
    """Map per-token categories onto the scenario's scoring classes.

    Per-entity scoring keeps only gold tokens of the target category and counts
    any PHI prediction as that category; predictions on tokens that gold marks
    as some other category are ignored rather than counted as false positives.
    """
    if cfg.mode == "multiclass":
        return list(gold), list(pred)
    if cfg.mode == "binary":
        return [_collapse(g, cfg) for g in gold], [_collapse(p, cfg) for p in pred]
    target = cfg.entity
    g_out = [target if g == target else None for g in gold]
    p_out = [target if p is not None and (g is None or g == target) else None for g, p in zip(gold, pred)]
    return g_out, p_out


def scenario_classes(cfg: ScenarioConfig, labels: Iterable[str | None] = ()) -> list[str]:
    if cfg.mode == "binary":
        return [PHI]
    if cfg.mode == "per_entity":
        return [cfg.entity]  # type: ignore[list-item]
    extra = sorted({lab for lab in labels if lab is not None and lab not in CATEGORIES})
    return [*CATEGORIES, *extra]


def count_labels(
    gold: Sequence[str | None], pred: Sequence[str | None], classes: Iterable[str]
) -> ConfusionCounts:
    tallies = {c: [0, 0, 0] for c in classes}
    for g, p in zip(gold, pred):
        if g == p:
            if g is not None:
                tallies.setdefault(g, [0, 0, 0])[0] += 1
            continue
        if p is not None:
            tallies.setdefault(p, [0, 0, 0])[1] += 1
        if g is not None:
            tallies.setdefault(g, [0, 0, 0])[2] += 1
    return ConfusionCounts({c: ClassCounts(*v) for c, v in tallies.items()}, len(gold), 1)


def evaluate_pair(
    gold: TokenLabeling, pred: TokenLabeling, classes: Iterable[str] | None = None
) -> EvalResult:
    """Score one document's predicted token labels against gold."""
    if gold.doc_id != pred.doc_id:
        raise EvaluationError(f"cannot compare documents {gold.doc_id!r} and {pred.doc_id!r}")
    if [tuple(t[:2]) for t in gold.tokens] != [tuple(t[:2]) for t in pred.tokens]:
        raise EvaluationError(f"{gold.doc_id}: gold and predicted token lists differ")
    if classes is None:
        present = {lab for lab in (*gold.labels, *pred.labels) if lab is not None}
        classes = sorted(present, key=lambda c: (category_rank(c), c)) or [PHI]
    counts = count_labels(gold.labels, pred.labels, classes)
    return EvalResult.from_counts(counts, {gold.doc_id: counts})


def scenario_labels(
    tokens: Sequence[Token],
    annotations: Iterable[Annotation],
    cfg: ScenarioConfig,
    label_map: LabelMap,
) -> list[str | None]:
    """Per-token categories after harmonization and scenario filtering."""
    kept = apply_scenario(harmonize(annotations, label_map), cfg)
    return assign_categories(tokens, kept)


def _evaluate_document(
    args: tuple[Document, list[Annotation], list[Annotation], ScenarioConfig, Tokenizer, LabelMap],
) -> ConfusionCounts:
    doc, gold_anns, pred_anns, cfg, tokenizer, label_map = args
    tokens = tokenizer(doc.text)
    gold, pred = project_labels(
        scenario_labels(tokens, gold_anns, cfg, label_map),
        scenario_labels(tokens, pred_anns, cfg, label_map),
        cfg,
    )
    return count_labels(gold, pred, scenario_classes(cfg, (*gold, *pred)))


def pool(per_document: Mapping[str, ConfusionCounts], cfg: ScenarioConfig) -> EvalResult:
    if not per_document:
        raise EvaluationError("cannot evaluate an empty corpus")
    total = ConfusionCounts({c: ClassCounts() for c in scenario_classes(cfg)})
    for counts in per_document.values():
        total = total + counts
    return EvalResult.from_counts(total, per_document)


def evaluate_corpus(
    corpus: Corpus,
    gold_annotator: str,
    pred_annotator: str,
    cfg: ScenarioConfig,
    tokenizer: str | Tokenizer | None = None,
    *,
    label_map: LabelMap | None = None,
    jobs: int = 1,
) -> EvalResult:
    """Micro-averaged token-level evaluation of one annotator against another."""
    corpus.require_annotators(gold_annotator, pred_annotator)
    if not corpus.documents:
        raise EvaluationError("cannot evaluate an empty corpus")
    _, tokenize = resolve_tokenizer(tokenizer)
    label_map = builtin_label_map() if label_map is None else label_map
    gold = corpus.by_document(gold_annotator)
    pred = corpus.by_document(pred_annotator)
    jobs_args = [
        (doc, gold[doc_id], pred[doc_id], cfg, tokenize, label_map) for doc_id, doc in corpus.documents.items()
    ]
    results = parallel_map(_evaluate_document, jobs_args, jobs)
    return pool(dict(zip(corpus.documents, results)), cfg)


@dataclass(frozen=True)
class EntityCounts:
    gold_covered: int = 0
    gold_total: int = 0
    pred_correct: int = 0
    pred_total: int = 0

    def __add__(self, other: EntityCounts) -> EntityCounts:
        return EntityCounts(
            self.gold_covered + other.gold_covered,
            self.gold_total + other.gold_total,
            self.pred_correct + other.pred_correct,
            self.pred_total + other.pred_total,
        )

    def metrics(self) -> tuple[float, float, float]:
        p = _ratio(self.pred_correct, self.pred_total)
        r = _ratio(self.gold_covered, self.gold_total)
        return p, r, _f1(p, r)


def entity_counts(gold: Sequence[Annotation], pred: Sequence[Annotation]) -> EntityCounts:
    """Exact-cover entity matching for one document.

    A gold entity is found when one prediction covers its whole range; a
    prediction is correct when it lies entirely inside one gold entity.
    """
    covered = sum(any(p.start <= g.start and p.stop >= g.stop for p in pred) for g in gold)
    correct = sum(any(g.start <= p.start and p.stop <= g.stop for g in gold) for p in pred)
    return EntityCounts(covered, len(gold), correct, len(pred))


def evaluate_entities(gold: Sequence[Annotation], pred: Sequence[Annotation]) -> tuple[float, float, float]:
    """Entity-level ``(precision, recall, f1)`` for one document."""
    return entity_counts(gold, pred).metrics()


def evaluate_corpus_entities(
    corpus: Corpus,
    gold_annotator: str,
    pred_annotator: str,
    cfg: ScenarioConfig,
    *,
    label_map: LabelMap | None = None,
) -> EntityCounts:
    corpus.require_annotators(gold_annotator, pred_annotator)
    label_map = builtin_label_map() if label_map is None else label_map
    gold = corpus.by_document(gold_annotator)
    pred = corpus.by_document(pred_annotator)
    total = EntityCounts()
    for doc_id in corpus.documents:
        g = apply_scenario(harmonize(gold[doc_id], label_map), cfg)
        p = apply_scenario(harmonize(pred[doc_id], label_map), cfg)
        if cfg.mode == "per_entity":
            g = [a for a in g if a.category == cfg.entity]
        total = total + entity_counts(g, p)
    return total
