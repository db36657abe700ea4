"""Conversion of external corpus formats and predictions into a :class:`Corpus`.

Supported inputs:

* i2b2-style XML: a root element holding a ``TEXT`` element (the note body,
  usually in a CDATA section) and a ``TAGS`` element of empty-element tags
  with ``id``, ``start``, ``end``, ``text`` and ``TYPE`` attributes.
* Standoff tables (TSV with header, or JSONL) with columns
  ``doc_id, start, stop, raw_label, literal``.
* Line-delimited document records ``{"doc_id", "text", "source", "split"}``.
"""

from __future__ import annotations

import csv
import json
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from .corpus import Annotation, ClipseError, Corpus, Document

STANDOFF_COLUMNS = ("doc_id", "start", "stop", "raw_label", "literal")
# offsets tried when a literal does not match its slice
RECOVERY_SHIFTS = (-1, 0, 1)
_CDATA_TEXT = re.compile(r"<TEXT>\s*<!\[CDATA\[(.*?)\]\]>\s*</TEXT>", re.DOTALL)


class IngestError(ClipseError, ValueError):
    pass


@dataclass(frozen=True)
class StandoffRow:
    doc_id: str
    start: int
    stop: int
    raw_label: str
    literal: str | None = None

    def __post_init__(self) -> None:
        if self.start >= self.stop:
            raise IngestError(f"standoff row {self.doc_id}:{self.start}-{self.stop}: start must be < stop")
        if not self.raw_label:
            raise IngestError(f"standoff row {self.doc_id}:{self.start}-{self.stop}: empty raw_label")


def _locate(text: str, start: int, stop: int, literal: str | None, what: str) -> tuple[int, int, str]:
    """Return verified ``(start, stop, literal)``, recovering off-by-one offsets."""
    if literal is None:
        if not (0 <= start < stop <= len(text)):
            raise IngestError(f"{what}: offsets {start}-{stop} out of range for text of length {len(text)}")
        return start, stop, text[start:stop]
    # the stated offsets first, then the recovery window
    for shift in (0, *RECOVERY_SHIFTS):
        s, e = start + shift, stop + shift
        if 0 <= s < e <= len(text) and text[s:e] == literal:
            return s, e, literal
    if not (0 <= start < stop <= len(text)):
        raise IngestError(f"{what}: offsets {start}-{stop} out of range for text of length {len(text)}")
    raise IngestError(
        f"{what}: literal {literal!r} does not match text {text[start:stop]!r} at {start}-{stop} "
        "or at any offset shifted by one"
    )


def parse_i2b2_xml(
    xml_text: str,
    annotator: str,
    doc_id: str,
    *,
    source: str = "i2b2",
    split: str = "unsplit",
) -> tuple[Document, list[Annotation]]:
    """Parse one i2b2-style XML note.

    The note body is taken verbatim from the ``TEXT`` CDATA section (XML
    parsers would normalize line endings). ``raw_label`` is the tag's ``TYPE``
    attribute, falling back to the element name.
    """
    try:
        root = ET.fromstring(xml_text)
    except ET.ParseError as exc:
        raise IngestError(f"{doc_id}: malformed XML ({exc})") from exc
    text_el = root.find("TEXT")
    if text_el is None:
        raise IngestError(f"{doc_id}: no TEXT element")
    match = _CDATA_TEXT.search(xml_text)
    text = match.group(1) if match else (text_el.text or "")
    doc = Document(doc_id, text, source, split)

    annotations = []
    tags = root.find("TAGS")
    for tag in tags if tags is not None else []:
        tag_id = tag.get("id", tag.tag)
        what = f"{doc_id}: tag {tag_id}"
        try:
            start, stop = int(tag.get("start", "")), int(tag.get("end", ""))
        except ValueError:
            raise IngestError(f"{what}: missing or non-integer start/end") from None
        start, stop, literal = _locate(text, start, stop, tag.get("text"), what)
        raw_label = tag.get("TYPE") or tag.tag
        annotations.append(Annotation(doc_id, start, stop, literal, raw_label, None, annotator))
    annotations.sort(key=lambda a: a.sort_key)
    return doc, annotations


def _annotations_from_rows(text: str, rows: Iterable[StandoffRow], doc_id: str, annotator: str) -> list[Annotation]:
    annotations = []
    for row in rows:
        if row.doc_id != doc_id:
            raise IngestError(f"standoff row for {row.doc_id!r} given with document {doc_id!r}")
        start, stop, literal = _locate(
            text, row.start, row.stop, row.literal, f"{doc_id}: row {row.start}-{row.stop} {row.raw_label}"
        )
        annotations.append(Annotation(doc_id, start, stop, literal, row.raw_label, None, annotator))
    annotations.sort(key=lambda a: a.sort_key)
    return annotations


def parse_standoff(
    text: str,
    rows: Iterable[StandoffRow],
    doc_id: str,
    annotator: str,
    *,
    source: str = "",
    split: str = "unsplit",
) -> tuple[Document, list[Annotation]]:
    """Build a document and its annotations from raw text and standoff rows."""
    doc = Document(doc_id, text, source, split)
    return doc, _annotations_from_rows(text, rows, doc_id, annotator)


def ingest_predictions(
    corpus: Corpus, rows: Iterable[StandoffRow], annotator: str, *, overwrite: bool = False
) -> Corpus:
    """Return a copy of ``corpus`` with ``rows`` added as annotation set ``annotator``."""
    if not annotator:
        raise IngestError("annotator name must be nonempty")
    if annotator in corpus.annotation_sets and not overwrite:
        raise IngestError(f"annotator {annotator!r} already present (use overwrite to replace)")
    annotations: list[Annotation] = []
    for doc_id, doc_rows in group_by_document_rows(rows).items():
        doc = corpus.documents.get(doc_id)
        if doc is None:
            raise IngestError(f"prediction references unknown doc_id {doc_id!r}")
        annotations.extend(_annotations_from_rows(doc.text, doc_rows, doc_id, annotator))
    sets = dict(corpus.annotation_sets)
    sets[annotator] = annotations
    return Corpus(corpus.documents, sets, corpus.gazetteers).validate()


def group_by_document_rows(rows: Iterable[StandoffRow]) -> dict[str, list[StandoffRow]]:
    grouped: dict[str, list[StandoffRow]] = {}
    for row in rows:
        grouped.setdefault(row.doc_id, []).append(row)
    return grouped


def _row_from_mapping(record: dict, where: str) -> StandoffRow:
    try:
        literal = record.get("literal")
        return StandoffRow(
            doc_id=str(record["doc_id"]),
            start=int(record["start"]),
            stop=int(record["stop"]),
            raw_label=str(record["raw_label"]),
            literal=literal if literal not in (None, "") else None,
        )
    except KeyError as exc:
        raise IngestError(f"{where}: missing field {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        raise IngestError(f"{where}: {exc}") from None


def read_standoff_tsv(path: str | Path) -> list[StandoffRow]:
    """Read a UTF-8 standoff TSV whose header names the standoff columns."""
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh, delimiter="\t")
        missing = [c for c in STANDOFF_COLUMNS[:4] if c not in (reader.fieldnames or [])]
        if missing:
            raise IngestError(f"{path}: header lacks column(s) {', '.join(missing)}")
        return [_row_from_mapping(rec, f"{path}:{i}") for i, rec in enumerate(reader, 2)]


def read_standoff_jsonl(path: str | Path) -> list[StandoffRow]:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if line.strip():
                try:
                    record = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise IngestError(f"{path}:{lineno}: invalid JSON ({exc})") from None
                rows.append(_row_from_mapping(record, f"{path}:{lineno}"))
    return rows


def read_standoff(path: str | Path) -> list[StandoffRow]:
    """Read standoff rows, choosing the parser by file extension."""
    suffix = Path(path).suffix.lower()
    if suffix in (".tsv", ".tab", ".txt"):
        return read_standoff_tsv(path)
    if suffix in (".jsonl", ".ndjson"):
        return read_standoff_jsonl(path)
    raise IngestError(f"{path}: unsupported standoff extension {suffix!r} (expected .tsv or .jsonl)")


def write_standoff_tsv(annotations: Iterable[Annotation], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, delimiter="\t", lineterminator="\n")
        writer.writerow(STANDOFF_COLUMNS)
        for ann in annotations:
            writer.writerow([ann.doc_id, ann.start, ann.stop, ann.raw_label, ann.literal])


def convert_i2b2_dir(
    directory: str | Path, annotator: str = "gold", *, source: str = "i2b2", split: str = "unsplit"
) -> Corpus:
    """Convert every ``*.xml`` file in ``directory``; the file stem is the doc_id."""
    files = sorted(Path(directory).glob("*.xml"))
    if not files:
        raise IngestError(f"no .xml files in {directory}")
    documents, annotations = {}, []
    for path in files:
        doc, anns = parse_i2b2_xml(path.read_text(encoding="utf-8"), annotator, path.stem, source=source, split=split)
        documents[doc.doc_id] = doc
        annotations.extend(anns)
    return Corpus(documents, {annotator: annotations}).validate()


def convert_standoff_dir(
    directory: str | Path,
    rows: Iterable[StandoffRow],
    annotator: str = "gold",
    *,
    source: str = "",
    split: str = "unsplit",
) -> Corpus:
    """Convert ``<doc_id>.txt`` files plus standoff rows referencing them."""
    files = sorted(Path(directory).glob("*.txt"))
    if not files:
        raise IngestError(f"no .txt files in {directory}")
    texts = {p.stem: p.read_text(encoding="utf-8") for p in files}
    grouped = group_by_document_rows(rows)
    unknown = sorted(set(grouped) - set(texts))
    if unknown:
        raise IngestError(f"standoff rows reference unknown doc_id(s): {', '.join(unknown)}")
    documents, annotations = {}, []
    for doc_id, text in texts.items():
        doc, anns = parse_standoff(text, grouped.get(doc_id, []), doc_id, annotator, source=source, split=split)
        documents[doc_id] = doc
        annotations.extend(anns)
    return Corpus(documents, {annotator: annotations}).validate()


def read_document_records(path: str | Path) -> list[Document]:
    """Read line-delimited ``{"doc_id", "text", "source"?, "split"?}`` records."""
    docs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                docs.append(
                    Document(str(rec["doc_id"]), rec["text"], rec.get("source", ""), rec.get("split", "unsplit"))
                )
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise IngestError(f"{path}:{lineno}: bad document record ({exc})") from None
    return docs


def convert_records(
    documents: Iterable[Document], rows: Iterable[StandoffRow] = (), annotator: str = "gold"
) -> Corpus:
    docs = {}
    for doc in documents:
        if doc.doc_id in docs:
            raise IngestError(f"duplicate doc_id {doc.doc_id!r}")
        docs[doc.doc_id] = doc
    corpus = Corpus(docs, {annotator: []})
    return ingest_predictions(corpus, rows, annotator, overwrite=True)
