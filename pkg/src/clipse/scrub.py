"""Replace annotated PHI spans with placeholders or a length-preserving mask."""

from __future__ import annotations

from typing import NamedTuple, Sequence

from .corpus import Annotation, ClipseError, Document
from .merge import plurality_category

MASK_CHAR = "█"
STYLES = {
    "category_placeholder": "category_placeholder",
    "placeholder": "category_placeholder",
    "mask_preserving_length": "mask_preserving_length",
    "mask": "mask_preserving_length",
}


class ScrubError(ClipseError, ValueError):
    pass


class Replacement(NamedTuple):
    original_start: int
    original_stop: int
    new_start: int
    new_stop: int


def placeholder(category: str | None) -> str:
    return f"[**{(category or 'phi').upper()}**]"


def _overlap_groups(annotations: Sequence[Annotation]) -> list[tuple[int, int, list[Annotation]]]:
    groups: list[tuple[int, int, list[Annotation]]] = []
    for ann in sorted(annotations, key=lambda a: (a.start, a.stop)):
        if groups and ann.start < groups[-1][1]:
            start, stop, members = groups[-1]
            groups[-1] = (start, max(stop, ann.stop), [*members, ann])
        else:
            groups.append((ann.start, ann.stop, [ann]))
    return groups


def scrub_document(
    doc: Document, annotations: Sequence[Annotation], style: str = "category_placeholder"
) -> tuple[str, list[Replacement]]:
    """Return the scrubbed text and the offset map of every replacement.

    Overlapping annotations are merged first and the merged interval takes the
    category covering most of its characters. Text outside the intervals is
    copied unchanged.
    """
    try:
        style = STYLES[style]
    except KeyError:
        raise ScrubError(f"unknown scrub style {style!r}") from None
    text = doc.text
    for ann in annotations:
        if ann.doc_id != doc.doc_id:
            raise ScrubError(f"annotation for {ann.doc_id!r} passed with document {doc.doc_id!r}")
        if not (0 <= ann.start < ann.stop <= len(text)):
            raise ScrubError(f"annotation {ann.doc_id}:{ann.start}-{ann.stop} out of range")

    pieces: list[str] = []
    offset_map: list[Replacement] = []
    cursor = out_len = 0
    for start, stop, members in _overlap_groups(annotations):
        pieces.append(text[cursor:start])
        out_len += start - cursor
        if style == "mask_preserving_length":
            surrogate = MASK_CHAR * (stop - start)
        else:
            surrogate = placeholder(plurality_category(members, start, stop))
        pieces.append(surrogate)
        offset_map.append(Replacement(start, stop, out_len, out_len + len(surrogate)))
        out_len += len(surrogate)
        cursor = stop
    pieces.append(text[cursor:])
    return "".join(pieces), offset_map
