"""In-memory data model for clinical-note corpora and PHI annotations.

All offsets are counted in Unicode code points, which is what Python string
indexing already does, so ``text[start:stop]`` is the annotated literal.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping

CATEGORIES: tuple[str, ...] = (
    "name",
    "profession",
    "location",
    "age",
    "date",
    "id",
    "contact",
)
SPLITS = ("train", "test", "unsplit")
GOLD = "gold"


class ClipseError(Exception):
    """Base class for data and validation errors raised by this package."""


class CorpusError(ClipseError, ValueError):
    """A corpus, document or annotation violates an invariant."""


def category_rank(category: str | None) -> int:
    """Sort key placing canonical categories in their fixed order, others after."""
    try:
        return CATEGORIES.index(category)  # type: ignore[arg-type]
    except ValueError:
        return len(CATEGORIES)


@dataclass(frozen=True)
class Document:
    doc_id: str
    text: str
    source: str = ""
    split: str = "unsplit"

    def __post_init__(self) -> None:
        if not self.doc_id:
            raise CorpusError("document doc_id must be nonempty")
        if self.split not in SPLITS:
            raise CorpusError(f"document {self.doc_id!r}: unknown split {self.split!r}")


@dataclass(frozen=True)
class Annotation:
    doc_id: str
    start: int
    stop: int
    literal: str
    raw_label: str
    category: str | None = None
    annotator: str = GOLD

    @property
    def sort_key(self) -> tuple:
        return (
            self.doc_id,
            self.start,
            self.stop,
            self.raw_label,
            self.category or "",
            self.literal,
        )

    def with_category(self, category: str | None) -> Annotation:
        return Annotation(
            self.doc_id, self.start, self.stop, self.literal, self.raw_label, category, self.annotator
        )

    def with_annotator(self, annotator: str) -> Annotation:
        return Annotation(
            self.doc_id, self.start, self.stop, self.literal, self.raw_label, self.category, annotator
        )


@dataclass(frozen=True)
class Gazetteer:
    name: str
    category: str
    entries: frozenset[str]

    def __post_init__(self) -> None:
        object.__setattr__(self, "entries", frozenset(self.entries))
        folded: set[str] = set()
        for entry in self.entries:
            if not entry or entry != entry.strip():
                raise CorpusError(
                    f"gazetteer {self.name!r}: entry {entry!r} is empty or has surrounding whitespace"
                )
            key = entry.casefold()
            if key in folded:
                raise CorpusError(f"gazetteer {self.name!r}: duplicate entry {entry!r} under case-folding")
            folded.add(key)

    @classmethod
    def from_strings(cls, name: str, category: str, entries: Iterable[str]) -> Gazetteer:
        """Build a gazetteer from raw strings, stripping and dropping case-folded duplicates."""
        seen: dict[str, str] = {}
        for entry in entries:
            entry = entry.strip()
            if entry:
                seen.setdefault(entry.casefold(), entry)
        return cls(name, category, frozenset(seen.values()))


@dataclass(frozen=True)
class Corpus:
    """Documents, annotation sets keyed by annotator, and gazetteers.

    Construction canonicalizes ordering (documents by id, annotations by
    ``(doc_id, start, stop)``, gazetteers by name) so that equal content
    compares equal. Semantic invariants are checked by :meth:`validate`.
    """

    documents: Mapping[str, Document] = field(default_factory=dict)
    annotation_sets: Mapping[str, list[Annotation]] = field(default_factory=dict)
    gazetteers: list[Gazetteer] = field(default_factory=list)

    def __post_init__(self) -> None:
        documents = self.documents
        if not isinstance(documents, Mapping):
            documents = {doc.doc_id: doc for doc in documents}
        object.__setattr__(self, "documents", dict(sorted(documents.items())))
        object.__setattr__(
            self,
            "annotation_sets",
            {
                annotator: sorted(annotations, key=lambda a: a.sort_key)
                for annotator, annotations in sorted(self.annotation_sets.items())
            },
        )
        object.__setattr__(
            self, "gazetteers", sorted(self.gazetteers, key=lambda g: (g.name, g.category))
        )

    @property
    def annotators(self) -> list[str]:
        return list(self.annotation_sets)

    def by_document(self, annotator: str) -> dict[str, list[Annotation]]:
        """Annotations of one annotator grouped by doc_id (every document present)."""
        if annotator not in self.annotation_sets:
            raise CorpusError(f"annotator {annotator!r} not present in corpus")
        grouped: dict[str, list[Annotation]] = {doc_id: [] for doc_id in self.documents}
        for ann in self.annotation_sets[annotator]:
            grouped.setdefault(ann.doc_id, []).append(ann)
        return grouped

    def require_annotators(self, *annotators: str) -> None:
        for annotator in annotators:
            if annotator not in self.annotation_sets:
                raise CorpusError(
                    f"annotator {annotator!r} not present in corpus "
                    f"(available: {', '.join(self.annotators) or 'none'})"
                )

    def with_annotations(self, annotator: str, annotations: list[Annotation]) -> Corpus:
        sets = dict(self.annotation_sets)
        sets[annotator] = [a.with_annotator(annotator) if a.annotator != annotator else a for a in annotations]
        return Corpus(self.documents, sets, self.gazetteers)

    def validate(self) -> Corpus:
        """Check every invariant, raising :class:`CorpusError` on the first violation."""
        for doc_id, doc in self.documents.items():
            if doc_id != doc.doc_id:
                raise CorpusError(f"document keyed {doc_id!r} carries doc_id {doc.doc_id!r}")
        for annotator, annotations in self.annotation_sets.items():
            if not annotator:
                raise CorpusError("annotator name must be nonempty")
            for ann in annotations:
                if ann.annotator != annotator:
                    raise CorpusError(
                        f"annotation in set {annotator!r} names annotator {ann.annotator!r}"
                    )
                doc = self.documents.get(ann.doc_id)
                if doc is None:
                    raise CorpusError(
                        f"annotation ({ann.start}, {ann.stop}) of {annotator!r} references "
                        f"unknown doc_id {ann.doc_id!r}"
                    )
                check_annotation(ann, doc.text)
        names = [(g.name, g.category) for g in self.gazetteers]
        if len(set(names)) != len(names):
            raise CorpusError("duplicate gazetteer name")
        return self


def check_annotation(ann: Annotation, text: str) -> None:
    """Raise unless ``ann`` lies inside ``text`` and its literal equals the slice."""
    if not ann.annotator:
        raise CorpusError(f"annotation {ann.doc_id}:{ann.start}-{ann.stop} has empty annotator")
    if not (0 <= ann.start < ann.stop <= len(text)):
        raise CorpusError(
            f"annotation {ann.doc_id}:{ann.start}-{ann.stop} out of range "
            f"for text of length {len(text)}"
        )
    actual = text[ann.start : ann.stop]
    if actual != ann.literal:
        raise CorpusError(
            f"annotation {ann.doc_id}:{ann.start}-{ann.stop} literal {ann.literal!r} "
            f"does not match text slice {actual!r}"
        )


def group_by_document(annotations: Iterable[Annotation]) -> dict[str, list[Annotation]]:
    grouped: dict[str, list[Annotation]] = defaultdict(list)
    for ann in annotations:
        grouped[ann.doc_id].append(ann)
    return dict(grouped)
