"""Rule-based reference deidentification tagger (regular expressions + gazetteers).

Candidate spans from every rule and gazetteer are collected, then accepted
greedily: longest span first, ties broken by earliest start and then by rule
order (pattern rules before gazetteers). Accepted spans never overlap.

A pattern may contain a group named ``phi``; when present, only that group is
annotated, which allows context such as ``"Dr. "`` or ``"age "`` to anchor a
match without being labelled.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .corpus import CATEGORIES, Annotation, ClipseError, Corpus, Document, Gazetteer
from .harmonize import ScenarioConfig, apply_scenario
from .parallel import parallel_map

MIN_GAZETTEER_ENTRY = 2
PROFILE_COLUMNS = ("rule_id", "category", "pattern", "case_insensitive")
GAZETTEER_PREFIX = "gazetteer:"


class TaggerError(ClipseError, ValueError):
    pass


@dataclass(frozen=True)
class PatternRule:
    rule_id: str
    category: str
    pattern: str
    case_insensitive: bool = False
    raw_label: str | None = None

    def __post_init__(self) -> None:
        if self.category not in CATEGORIES:
            raise TaggerError(f"rule {self.rule_id!r}: unknown category {self.category!r}")
        try:
            compiled = re.compile(self.pattern, re.IGNORECASE if self.case_insensitive else 0)
        except re.error as exc:
            raise TaggerError(f"rule {self.rule_id!r}: pattern does not compile ({exc})") from None
        object.__setattr__(self, "_compiled", compiled)

    @property
    def regex(self) -> re.Pattern:
        return self._compiled  # type: ignore[attr-defined]

    @property
    def label(self) -> str:
        return self.raw_label or self.category


@dataclass(frozen=True)
class TaggerProfile:
    rules: list[PatternRule]
    gazetteers: list[Gazetteer] = field(default_factory=list)
    protected_flags: ScenarioConfig | None = None

    def __post_init__(self) -> None:
        if not self.rules:
            raise TaggerError("tagger profile needs at least one pattern rule")
        ids = [r.rule_id for r in self.rules]
        if len(set(ids)) != len(ids):
            raise TaggerError("duplicate rule_id in tagger profile")
        object.__setattr__(
            self, "_gazetteer_regexes", [(g, _gazetteer_regex(g)) for g in self.gazetteers]
        )

    def with_gazetteers(self, gazetteers: Iterable[Gazetteer]) -> TaggerProfile:
        return TaggerProfile(self.rules, [*self.gazetteers, *gazetteers], self.protected_flags)


def _gazetteer_regex(gaz: Gazetteer) -> re.Pattern | None:
    entries = sorted((e for e in gaz.entries if len(e) >= MIN_GAZETTEER_ENTRY), key=lambda e: (-len(e), e))
    if not entries:
        return None
    alternation = "|".join(re.escape(e) for e in entries)
    return re.compile(rf"(?<!\w)(?:{alternation})(?!\w)", re.IGNORECASE)


def _candidates(text: str, profile: TaggerProfile) -> list[tuple[int, int, int, str, str]]:
    """All candidate spans as ``(start, stop, priority, category, raw_label)``."""
    found = []
    for priority, rule in enumerate(profile.rules):
        for m in rule.regex.finditer(text):
            if "phi" in rule.regex.groupindex:
                start, stop = m.span("phi")
            else:
                start, stop = m.span()
            if start < stop:
                found.append((start, stop, priority, rule.category, rule.label))
    offset = len(profile.rules)
    for priority, (gaz, regex) in enumerate(profile._gazetteer_regexes, offset):  # type: ignore[attr-defined]
        if regex is None:
            continue
        # overlapping entries are found by restarting one character after each hit
        pos = 0
        while True:
            m = regex.search(text, pos)
            if m is None:
                break
            found.append((m.start(), m.end(), priority, gaz.category, gaz.category))
            pos = m.start() + 1
    return found


def tag_document(doc: Document, profile: TaggerProfile, annotator: str = "ref_tagger") -> list[Annotation]:
    """Annotate ``doc`` with non-overlapping PHI spans found by ``profile``."""
    text = doc.text
    taken = bytearray(len(text))
    accepted = []
    for start, stop, _, category, raw_label in sorted(
        _candidates(text, profile), key=lambda c: (-(c[1] - c[0]), c[0], c[2])
    ):
        if any(taken[start:stop]):
            continue
        taken[start:stop] = b"\x01" * (stop - start)
        accepted.append(Annotation(doc.doc_id, start, stop, text[start:stop], raw_label, category, annotator))
    accepted.sort(key=lambda a: a.sort_key)
    if profile.protected_flags is not None:
        accepted = apply_scenario(accepted, profile.protected_flags)
    return accepted


def tag_corpus(
    corpus: Corpus,
    profile: TaggerProfile,
    annotator: str = "ref_tagger",
    *,
    use_corpus_gazetteers: bool = True,
    jobs: int = 1,
) -> Corpus:
    """Tag every document, returning a corpus with a new annotation set."""
    if use_corpus_gazetteers and corpus.gazetteers:
        profile = profile.with_gazetteers(corpus.gazetteers)
    results = parallel_map(_tag_one, [(doc, profile, annotator) for doc in corpus.documents.values()], jobs)
    annotations = [ann for anns in results for ann in anns]
    return corpus.with_annotations(annotator, annotations).validate()


def _tag_one(args: tuple[Document, TaggerProfile, str]) -> list[Annotation]:
    return tag_document(*args)


_MONTHS = (
    r"(?:Jan(?:uary)?|Feb(?:ruary)?|Mar(?:ch)?|Apr(?:il)?|May|June?|July?|Aug(?:ust)?"
    r"|Sep(?:t(?:ember)?)?|Oct(?:ober)?|Nov(?:ember)?|Dec(?:ember)?)"
)

BUILTIN_RULES = [
    PatternRule("date-numeric", "date", r"(?<![\w/.-])\d{1,2}[/.-]\d{1,2}[/.-](?:\d{4}|\d{2})(?![\w/-])"),
    PatternRule("date-iso", "date", r"(?<![\w-])\d{4}-\d{2}-\d{2}(?![\w-])"),
    PatternRule(
        "date-month-day",
        "date",
        rf"\b{_MONTHS}\.?\s+\d{{1,2}}(?:st|nd|rd|th)?(?:,?\s+\d{{4}})?\b",
    ),
    PatternRule(
        "date-day-month",
        "date",
        rf"\b\d{{1,2}}(?:st|nd|rd|th)?\s+(?:of\s+)?{_MONTHS}\.?(?:,?\s+\d{{4}})?\b",
    ),
    PatternRule("date-month-year", "date", rf"\b{_MONTHS}\.?,?\s+\d{{4}}\b"),
    PatternRule(
        "date-year-in-context",
        "date",
        r"\b(?:in|since|during|from|until|of)\s+(?P<phi>(?:19|20)\d{2})\b",
        case_insensitive=True,
        raw_label="dateyear",
    ),
    PatternRule(
        "time",
        "date",
        r"\b(?:[01]?\d|2[0-3]):[0-5]\d(?::[0-5]\d)?(?:\s?[AaPp]\.?[Mm]\b\.?)?",
        raw_label="time",
    ),
    PatternRule(
        "phone",
        "contact",
        r"(?<![\w-])(?:\+?1[\s.-]?)?(?:\(\d{3}\)\s?|\d{3}[\s.-])\d{3}[\s.-]\d{4}(?![\w-])",
        raw_label="phone",
    ),
    PatternRule("email", "contact", r"\b[\w.+-]+@[\w-]+(?:\.[\w-]+)+\b", raw_label="email"),
    PatternRule("zip", "location", r"(?<![\w-])\d{5}(?:-\d{4})?(?![\w-])", raw_label="zip"),
    PatternRule("id-number", "id", r"(?<![\w-])\d{6,9}(?![\w-])", raw_label="idnum"),
    PatternRule(
        "age-year-old",
        "age",
        r"\b(?P<phi>\d{1,3})[\s-]*(?:years?|yrs?)[\s-]*old\b",
        case_insensitive=True,
    ),
    PatternRule("age-yo", "age", r"\b(?P<phi>\d{1,3})\s*(?:yo|y/o|y\.o\.)(?!\w)", case_insensitive=True),
    PatternRule("age-prefix", "age", r"\bage[:\s]\s*(?P<phi>\d{1,3})\b", case_insensitive=True),
    PatternRule(
        "name-doctor",
        "name",
        r"\bDr\.?\s+(?P<phi>[A-Z][a-zA-Z'-]+)",
        raw_label="doctor",
    ),
    PatternRule(
        "name-honorific",
        "name",
        r"\b(?:Mr|Mrs|Ms)\.?\s+(?P<phi>[A-Z][a-zA-Z'-]+)",
        raw_label="name",
    ),
]

_US_STATES = (
    "Alabama Alaska Arizona Arkansas California Colorado Connecticut Delaware Florida Georgia Hawaii "
    "Idaho Illinois Indiana Iowa Kansas Kentucky Louisiana Maine Maryland Massachusetts Michigan "
    "Minnesota Mississippi Missouri Montana Nebraska Nevada Ohio Oklahoma Oregon Pennsylvania "
    "Tennessee Texas Utah Vermont Virginia Washington Wisconsin Wyoming"
).split() + [
    "New Hampshire", "New Jersey", "New Mexico", "New York", "North Carolina", "North Dakota",
    "Rhode Island", "South Carolina", "South Dakota", "West Virginia",
]
_CITIES = [
    "Boston", "Chicago", "Houston", "Phoenix", "Philadelphia", "San Antonio", "San Diego", "Dallas",
    "San Jose", "Austin", "Toronto", "Montreal", "Vancouver", "Ottawa", "Hamilton", "Calgary",
    "Seattle", "Denver", "Baltimore", "Cleveland", "Pittsburgh", "Atlanta", "Miami", "Detroit",
]


def builtin_profile() -> TaggerProfile:
    return TaggerProfile(
        rules=list(BUILTIN_RULES),
        gazetteers=[
            Gazetteer.from_strings("us_states", "location", _US_STATES),
            Gazetteer.from_strings("cities", "location", _CITIES),
        ],
    )


def load_profile(path: str | Path) -> TaggerProfile:
    """Load a profile TSV.

    Columns ``rule_id, category, pattern, case_insensitive`` with a header row;
    an optional fifth column ``raw_label``. A row whose rule_id starts with
    ``gazetteer:`` names a gazetteer; its pattern column is then a path
    (relative to the profile) of a file with one entry per line.
    """
    path = Path(path)
    rules, gazetteers = [], []
    with path.open(encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh, delimiter="\t", quoting=csv.QUOTE_NONE)
        missing = [c for c in PROFILE_COLUMNS if c not in (reader.fieldnames or [])]
        if missing:
            raise TaggerError(f"{path}: header lacks column(s) {', '.join(missing)}")
        for rec in reader:
            rule_id = rec["rule_id"].strip()
            if not rule_id or rule_id.startswith("#"):
                continue
            if rule_id.startswith(GAZETTEER_PREFIX):
                entries_path = path.parent / rec["pattern"].strip()
                try:
                    lines = entries_path.read_text(encoding="utf-8").splitlines()
                except OSError as exc:
                    raise TaggerError(f"{path}: cannot read gazetteer {entries_path}: {exc}") from None
                gazetteers.append(
                    Gazetteer.from_strings(rule_id[len(GAZETTEER_PREFIX) :], rec["category"].strip(), lines)
                )
                continue
            flag = (rec["case_insensitive"] or "").strip().lower() in ("1", "true", "yes", "y")
            rules.append(
                PatternRule(
                    rule_id,
                    rec["category"].strip(),
                    rec["pattern"],
                    flag,
                    (rec.get("raw_label") or "").strip() or None,
                )
            )
    return TaggerProfile(rules, gazetteers)
