"""Independent reference implementations used as test oracles.

Nothing here imports the scoring, tokenizing or filtering code under test;
the oracles work character by character and favour obviousness over speed.
"""

from __future__ import annotations

CATEGORY_ORDER = ("name", "profession", "location", "age", "date", "id", "contact")

# raw subtype -> category, transcribed from the dataset breakdown table
SUBTYPES = {
    "name": "name", "doctor": "name", "patient": "name", "username": "name", "hcpname": "name",
    "relativeproxyname": "name", "ptname": "name", "ptnameinitial": "name", "misc": "name",
    "profession": "profession",
    "location": "location", "loc": "location", "department": "location", "hospital": "location",
    "organization": "location", "org": "location", "street": "location", "state": "location",
    "city": "location", "country": "location", "zip": "location", "location-other": "location",
    "age": "age",
    "date": "date", "dateyear": "date", "time": "date",
    "device": "id", "idnum": "id", "medicalrecord": "id", "id": "id", "other": "id",
    "email": "contact", "fax": "contact", "phone": "contact", "contact": "contact",
}


def char_class(c: str) -> str:
    if c.isalnum() or c == "_":
        return "word"
    if c.isspace():
        return "space"
    return "punct"


def oracle_tokens(text: str) -> list[tuple[int, int, str]]:
    """Maximal runs of word characters or of punctuation, one pass."""
    out: list[tuple[int, int, str]] = []
    start, current = 0, "space"
    for i, c in enumerate(text + " "):
        cls = char_class(c) if i < len(text) else "space"
        if cls != current:
            if current != "space":
                out.append((start, i, text[start:i]))
            start, current = i, cls
    return out


def oracle_category(raw_label: str, category: str | None) -> str:
    return category if category is not None else SUBTYPES[raw_label.casefold()]


def oracle_flags(raw_label: str, category: str, literal: str) -> set[str]:
    raw = raw_label.casefold()
    flags = set()
    if category == "profession":
        flags.add("profession")
    if category == "age" and literal.strip().isdigit() and literal.strip().isascii() and int(literal) < 90:
        flags.add("age_under_90")
    if raw in ("doctor", "hcpname", "username"):
        flags.add("nonpatient_name")
    if raw in ("country", "state"):
        flags.add("large_geo")
    if category == "date" and len(literal) == 4 and literal.isascii() and literal.isdigit():
        flags.add("lone_year")
    if raw in ("organization", "org"):
        flags.add("organization")
    return flags


def _surviving(annotations, excluded: set[str]) -> list[tuple[int, int, str]]:
    kept = []
    for a in annotations:
        cat = oracle_category(a.raw_label, a.category)
        if oracle_flags(a.raw_label, cat, a.literal) & excluded:
            continue
        kept.append((a.start, a.stop, cat))
    return kept


def oracle_token_labels(text: str, annotations, excluded: set[str]) -> list[str | None]:
    """Category per token by largest character overlap.

    Ties: earlier annotation start, then earlier category in the fixed order.
    """
    spans = _surviving(annotations, excluded)
    labels = []
    for t_start, t_stop, _ in oracle_tokens(text):
        best = None
        for a_start, a_stop, cat in spans:
            overlap = sum(1 for i in range(t_start, t_stop) if a_start <= i < a_stop)
            if overlap == 0:
                continue
            key = (-overlap, a_start, CATEGORY_ORDER.index(cat))
            if best is None or key < best[0]:
                best = (key, cat)
        labels.append(None if best is None else best[1])
    return labels


def oracle_counts(
    text: str, gold_anns, pred_anns, mode: str, excluded: set[str], entity: str | None = None
) -> tuple[dict[str, list[int]], int]:
    """Brute-force ``{class: [tp, fp, fn]}`` and the token count for one document."""
    gold = oracle_token_labels(text, gold_anns, excluded)
    pred = oracle_token_labels(text, pred_anns, excluded)
    counts: dict[str, list[int]] = {}
    for g, p in zip(gold, pred):
        if mode == "binary":
            g = None if g is None else "phi"
            p = None if p is None else "phi"
        elif mode == "per_entity":
            if g is not None and g != entity:
                # tokens gold assigns to another category are outside the task
                continue
            p = None if p is None else entity
        if g is not None and g == p:
            counts.setdefault(g, [0, 0, 0])[0] += 1
            continue
        if p is not None:
            counts.setdefault(p, [0, 0, 0])[1] += 1
        if g is not None:
            counts.setdefault(g, [0, 0, 0])[2] += 1
    return counts, len(gold)


def prf(tp: int, fp: int, fn: int) -> tuple[float, float, float]:
    p = tp / (tp + fp) if tp + fp else 0.0
    r = tp / (tp + fn) if tp + fn else 0.0
    f = 2 * p * r / (p + r) if p + r else 0.0
    return p, r, f


def oracle_union(spans_a, spans_b) -> list[tuple[int, int]]:
    """Character-set union of two span lists, as maximal runs."""
    covered = sorted({i for s, e in (*spans_a, *spans_b) for i in range(s, e)})
    return _runs(covered)


def oracle_intersection(spans_a, spans_b) -> list[tuple[int, int]]:
    a = {i for s, e in spans_a for i in range(s, e)}
    b = {i for s, e in spans_b for i in range(s, e)}
    return _runs(sorted(a & b))


def _runs(positions: list[int]) -> list[tuple[int, int]]:
    runs: list[tuple[int, int]] = []
    for i in positions:
        if runs and runs[-1][1] == i:
            runs[-1] = (runs[-1][0], i + 1)
        else:
            runs.append((i, i + 1))
    return runs
