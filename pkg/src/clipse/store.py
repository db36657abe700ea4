"""On-disk corpus layout.

A corpus directory holds three datasets::

    documents.parquet                       doc_id, text, source, split
    annotations/annotator=<name>/part-0.parquet
                                            doc_id, start, stop, literal,
                                            raw_label, category
    gazetteers.parquet                      name, category, entry

``annotator`` is a hive partition column and is not stored inside the files.
The JSONL mirror uses ``documents.jsonl``, ``annotations.jsonl`` (with an
``annotator`` field on every row) and ``gazetteers.jsonl``, plus an optional
``annotators.jsonl`` listing every annotation set so empty sets survive.
"""

from __future__ import annotations

import json
from collections import defaultdict
from pathlib import Path
from typing import Iterable, Iterator
from urllib.parse import quote, unquote

import pyarrow as pa
import pyarrow.dataset as ds
import pyarrow.parquet as pq

from .corpus import Annotation, ClipseError, Corpus, CorpusError, Document, Gazetteer

DOCUMENTS_SCHEMA = pa.schema(
    [
        ("doc_id", pa.string()),
        ("text", pa.string()),
        ("source", pa.string()),
        ("split", pa.string()),
    ]
)
ANNOTATION_FILE_SCHEMA = pa.schema(
    [
        ("doc_id", pa.string()),
        ("start", pa.int64()),
        ("stop", pa.int64()),
        ("literal", pa.string()),
        ("raw_label", pa.string()),
        pa.field("category", pa.string(), nullable=True),
    ]
)
ANNOTATIONS_SCHEMA = ANNOTATION_FILE_SCHEMA.append(pa.field("annotator", pa.string()))
GAZETTEERS_SCHEMA = pa.schema(
    [
        ("name", pa.string()),
        ("category", pa.string()),
        ("entry", pa.string()),
    ]
)
FORMATS = ("parquet", "jsonl")


class StoreError(ClipseError):
    """A corpus directory is missing, unwritable, or does not match the schema."""


def write_corpus(corpus: Corpus, path: str | Path, format: str = "parquet") -> None:
    """Validate ``corpus`` and write it under ``path``.

    ``path`` must not exist or be an empty directory; existing datasets are
    never overwritten or appended to.
    """
    if format not in FORMATS:
        raise StoreError(f"unknown corpus format {format!r}; expected one of {FORMATS}")
    corpus.validate()
    for gaz in corpus.gazetteers:
        if not gaz.entries:
            raise CorpusError(f"gazetteer {gaz.name!r} has no entries and cannot be stored")
    path = Path(path)
    if path.exists() and (not path.is_dir() or any(path.iterdir())):
        raise StoreError(f"output path {path} exists and is not an empty directory")
    try:
        path.mkdir(parents=True, exist_ok=True)
        if format == "parquet":
            _write_parquet(corpus, path)
        else:
            _write_jsonl(corpus, path)
    except OSError as exc:
        raise StoreError(f"cannot write corpus to {path}: {exc}") from exc


def read_corpus(path: str | Path) -> Corpus:
    """Read a corpus directory written by :func:`write_corpus` and validate it.

    The format is chosen by file extension: parquet datasets take precedence
    over their JSONL mirror. The gazetteer dataset is optional.
    """
    path = Path(path)
    if not path.is_dir():
        raise StoreError(f"corpus directory {path} does not exist")
    if (path / "documents.parquet").exists():
        corpus = _read_parquet(path)
    elif (path / "documents.jsonl").exists():
        corpus = _read_jsonl(path)
    else:
        raise StoreError(f"{path} has no documents dataset (documents.parquet or documents.jsonl)")
    return corpus.validate()


def _document_rows(corpus: Corpus) -> Iterator[dict]:
    for doc in corpus.documents.values():
        yield {"doc_id": doc.doc_id, "text": doc.text, "source": doc.source, "split": doc.split}


def _annotation_row(ann: Annotation) -> dict:
    return {
        "doc_id": ann.doc_id,
        "start": ann.start,
        "stop": ann.stop,
        "literal": ann.literal,
        "raw_label": ann.raw_label,
        "category": ann.category,
    }


def _gazetteer_rows(corpus: Corpus) -> Iterator[dict]:
    for gaz in corpus.gazetteers:
        for entry in sorted(gaz.entries):
            yield {"name": gaz.name, "category": gaz.category, "entry": entry}


def _write_parquet(corpus: Corpus, path: Path) -> None:
    pq.write_table(
        pa.Table.from_pylist(list(_document_rows(corpus)), schema=DOCUMENTS_SCHEMA),
        path / "documents.parquet",
    )
    root = path / "annotations"
    root.mkdir()
    for annotator, annotations in corpus.annotation_sets.items():
        part = root / f"annotator={quote(annotator, safe='')}"
        part.mkdir()
        table = pa.Table.from_pylist(
            [_annotation_row(a) for a in annotations], schema=ANNOTATION_FILE_SCHEMA
        )
        pq.write_table(table, part / "part-0.parquet")
    pq.write_table(
        pa.Table.from_pylist(list(_gazetteer_rows(corpus)), schema=GAZETTEERS_SCHEMA),
        path / "gazetteers.parquet",
    )


def _write_jsonl_file(path: Path, rows: Iterable[dict]) -> None:
    with path.open("w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False, sort_keys=True))
            fh.write("\n")


def _write_jsonl(corpus: Corpus, path: Path) -> None:
    _write_jsonl_file(path / "documents.jsonl", _document_rows(corpus))
    _write_jsonl_file(
        path / "annotations.jsonl",
        (
            {**_annotation_row(a), "annotator": annotator}
            for annotator, annotations in corpus.annotation_sets.items()
            for a in annotations
        ),
    )
    _write_jsonl_file(path / "gazetteers.jsonl", _gazetteer_rows(corpus))
    # rows alone cannot declare an annotator whose set is empty
    _write_jsonl_file(path / "annotators.jsonl", ({"annotator": name} for name in corpus.annotation_sets))


def _check_schema(actual: pa.Schema, expected: pa.Schema, what: str) -> None:
    for field in expected:
        if field.name not in actual.names:
            raise StoreError(f"{what}: missing column {field.name!r}")
        got = actual.field(field.name).type
        if got != field.type and not (pa.types.is_integer(got) and pa.types.is_integer(field.type)):
            if not (pa.types.is_null(got) and field.nullable):
                raise StoreError(f"{what}: column {field.name!r} has type {got}, expected {field.type}")


def _read_table(path: Path, expected: pa.Schema) -> list[dict]:
    try:
        table = pq.read_table(path)
    except (OSError, pa.ArrowInvalid) as exc:
        raise StoreError(f"cannot read {path}: {exc}") from exc
    _check_schema(table.schema, expected, str(path))
    return table.select(expected.names).to_pylist()


def _read_parquet(path: Path) -> Corpus:
    doc_rows = _read_table(path / "documents.parquet", DOCUMENTS_SCHEMA)
    ann_root = path / "annotations"
    if not ann_root.is_dir():
        raise StoreError(f"{path} has no annotations dataset")
    ann_rows: list[dict] = []
    if any(ann_root.rglob("*.parquet")):
        partitioning = ds.partitioning(pa.schema([("annotator", pa.string())]), flavor="hive")
        try:
            dataset = ds.dataset(ann_root, format="parquet", partitioning=partitioning)
            _check_schema(dataset.schema, ANNOTATIONS_SCHEMA, str(ann_root))
            ann_rows = dataset.to_table(columns=ANNOTATIONS_SCHEMA.names).to_pylist()
        except (OSError, pa.ArrowInvalid) as exc:
            raise StoreError(f"cannot read {ann_root}: {exc}") from exc
    # empty partitions contribute no rows but still declare an annotator
    empty_sets = [
        _partition_name(p) for p in sorted(ann_root.iterdir()) if p.is_dir() and p.name.startswith("annotator=")
    ]
    gaz_path = path / "gazetteers.parquet"
    gaz_rows = _read_table(gaz_path, GAZETTEERS_SCHEMA) if gaz_path.exists() else []
    return _build_corpus(doc_rows, ann_rows, gaz_rows, empty_sets)


def _partition_name(part: Path) -> str:
    return unquote(part.name.split("=", 1)[1])


def _read_jsonl_file(path: Path, expected: pa.Schema) -> list[dict]:
    rows = []
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                raise StoreError(f"{path}:{lineno}: invalid JSON ({exc})") from exc
            missing = [f.name for f in expected if f.name not in row and not f.nullable]
            if missing:
                raise StoreError(f"{path}:{lineno}: missing field(s) {', '.join(missing)}")
            rows.append(row)
    return rows


def _read_jsonl(path: Path) -> Corpus:
    doc_rows = _read_jsonl_file(path / "documents.jsonl", DOCUMENTS_SCHEMA)
    ann_path = path / "annotations.jsonl"
    if not ann_path.exists():
        raise StoreError(f"{path} has no annotations dataset")
    ann_rows = _read_jsonl_file(ann_path, ANNOTATIONS_SCHEMA)
    gaz_path = path / "gazetteers.jsonl"
    gaz_rows = _read_jsonl_file(gaz_path, GAZETTEERS_SCHEMA) if gaz_path.exists() else []
    manifest = path / "annotators.jsonl"
    annotators = []
    if manifest.exists():
        annotators = [row["annotator"] for row in _read_jsonl_file(manifest, pa.schema([("annotator", pa.string())]))]
    return _build_corpus(doc_rows, ann_rows, gaz_rows, annotators)


def _build_corpus(
    doc_rows: list[dict], ann_rows: list[dict], gaz_rows: list[dict], annotators: list[str]
) -> Corpus:
    documents: dict[str, Document] = {}
    for row in doc_rows:
        doc = Document(row["doc_id"], row["text"], row.get("source") or "", row.get("split") or "unsplit")
        if doc.doc_id in documents:
            raise CorpusError(f"duplicate doc_id {doc.doc_id!r}")
        documents[doc.doc_id] = doc
    sets: dict[str, list[Annotation]] = {name: [] for name in annotators}
    for row in ann_rows:
        try:
            ann = Annotation(
                doc_id=row["doc_id"],
                start=int(row["start"]),
                stop=int(row["stop"]),
                literal=row["literal"],
                raw_label=row["raw_label"],
                category=row.get("category"),
                annotator=row["annotator"],
            )
        except (TypeError, ValueError) as exc:
            raise StoreError(f"malformed annotation row {row!r}: {exc}") from exc
        sets.setdefault(ann.annotator, []).append(ann)
    entries: dict[tuple[str, str], list[str]] = defaultdict(list)
    for row in gaz_rows:
        entries[(row["name"], row["category"])].append(row["entry"])
    gazetteers = [Gazetteer(name, category, frozenset(values)) for (name, category), values in entries.items()]
    return Corpus(documents, sets, gazetteers)
