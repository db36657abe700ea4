"""Combining annotation sets from several annotators by character coverage."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

from .corpus import Annotation, ClipseError, Corpus, category_rank
from .harmonize import LabelMap, builtin_label_map, harmonize

STRATEGIES = ("union_recall_max", "intersection", "majority")
_ALIASES = {"union": "union_recall_max", "union_recall_max": "union_recall_max", "intersection": "intersection"}


class MergeError(ClipseError, ValueError):
    pass


@dataclass(frozen=True)
class MergeStrategy:
    kind: str = "union_recall_max"
    k: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in STRATEGIES:
            raise MergeError(f"unknown merge strategy {self.kind!r}")
        if self.kind == "majority" and (self.k is None or self.k < 1):
            raise MergeError("majority merge needs k >= 1")

    @classmethod
    def parse(cls, text: str) -> MergeStrategy:
        """Parse ``union``, ``intersection`` or ``majority:K``."""
        text = text.strip().lower()
        if text in _ALIASES:
            return cls(_ALIASES[text])
        if text.startswith("majority"):
            _, _, k = text.partition(":")
            try:
                return cls("majority", int(k))
            except ValueError:
                raise MergeError(f"majority strategy needs an integer k, got {text!r}") from None
        raise MergeError(f"unknown merge strategy {text!r}; expected union, intersection or majority:K")

    def threshold(self, n_sets: int) -> int:
        """Minimum number of annotation sets that must cover a character."""
        if self.kind == "union_recall_max":
            return 1
        if self.kind == "intersection":
            return n_sets
        return self.k  # type: ignore[return-value]


def coverage_intervals(spans: Iterable[tuple[int, int]], threshold: int = 1) -> list[tuple[int, int]]:
    """Maximal intervals of positions covered by at least ``threshold`` spans."""
    events: Counter[int] = Counter()
    for start, stop in spans:
        events[start] += 1
        events[stop] -= 1
    out: list[tuple[int, int]] = []
    depth, open_at = 0, None
    for pos in sorted(events):
        depth += events[pos]
        if depth >= threshold and open_at is None:
            open_at = pos
        elif depth < threshold and open_at is not None:
            out.append((open_at, pos))
            open_at = None
    return out


def plurality_category(annotations: Sequence[Annotation], start: int, stop: int) -> str | None:
    """Category covering the most characters of ``[start, stop)``.

    A character counts once per category however many annotations of that
    category cover it. Ties go to the earlier category in ``CATEGORIES``.
    """
    by_category: dict[str | None, list[tuple[int, int]]] = {}
    for ann in annotations:
        s, e = max(ann.start, start), min(ann.stop, stop)
        if s < e:
            by_category.setdefault(ann.category, []).append((s, e))
    best = None
    for category, spans in by_category.items():
        covered = sum(e - s for s, e in coverage_intervals(spans))
        key = (-covered, category_rank(category), category or "")
        if best is None or key < best[0]:
            best = (key, category)
    return None if best is None else best[1]


def merge_document(
    text: str,
    doc_id: str,
    annotation_sets: Sequence[Sequence[Annotation]],
    strategy: MergeStrategy,
    out_annotator: str,
) -> list[Annotation]:
    threshold = strategy.threshold(len(annotation_sets))
    # each set votes at most once per character
    per_set = [coverage_intervals((a.start, a.stop) for a in anns) for anns in annotation_sets]
    intervals = coverage_intervals((span for spans in per_set for span in spans), threshold)
    everything = [a for anns in annotation_sets for a in anns]
    merged = []
    for start, stop in intervals:
        category = plurality_category(everything, start, stop)
        merged.append(
            Annotation(doc_id, start, stop, text[start:stop], category or "phi", category, out_annotator)
        )
    return merged


def merge_annotations(
    corpus: Corpus,
    annotators: Sequence[str],
    strategy: MergeStrategy,
    out_annotator: str,
    *,
    label_map: LabelMap | None = None,
) -> Corpus:
    """Return ``corpus`` with a new annotation set merged from ``annotators``."""
    if len(annotators) < 2:
        raise MergeError("merging needs at least two annotators")
    if len(set(annotators)) != len(annotators):
        raise MergeError("merge annotators must be distinct")
    corpus.require_annotators(*annotators)
    if out_annotator in corpus.annotation_sets:
        raise MergeError(f"output annotator {out_annotator!r} already exists")
    if strategy.kind == "majority" and strategy.k > len(annotators):  # type: ignore[operator]
        raise MergeError(f"majority k={strategy.k} exceeds the {len(annotators)} annotators given")
    label_map = builtin_label_map() if label_map is None else label_map
    grouped = [corpus.by_document(name) for name in annotators]
    merged: list[Annotation] = []
    for doc_id, doc in corpus.documents.items():
        sets = [harmonize(g[doc_id], label_map) for g in grouped]
        merged.extend(merge_document(doc.text, doc_id, sets, strategy, out_annotator))
    return corpus.with_annotations(out_annotator, merged).validate()
