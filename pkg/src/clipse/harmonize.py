"""Raw label to canonical category mapping and evaluation-scenario filters."""

from __future__ import annotations

import csv
import hashlib
import json
import re
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

from .corpus import CATEGORIES, Annotation, ClipseError

UNKNOWN_POLICIES = ("error", "drop", "pass_as_is")
MODES = ("binary", "multiclass", "per_entity")
PHI = "phi"

# attribute flags that a scenario may exclude, keyed by ScenarioConfig field
FLAG_FIELDS = {
    "profession": "include_profession",
    "age_under_90": "include_age_under_90",
    "nonpatient_name": "include_nonpatient_names",
    "large_geo": "include_large_geo",
    "lone_year": "include_lone_year",
    "organization": "include_organization",
}

NONPATIENT_NAME_LABELS = frozenset({"doctor", "hcpname", "username"})
LARGE_GEO_LABELS = frozenset({"country", "state"})
ORGANIZATION_LABELS = frozenset({"organization", "org"})
_DIGITS = re.compile(r"\d+")
_YEAR = re.compile(r"\d{4}")


class HarmonizeError(ClipseError, ValueError):
    pass


_BUILTIN_RULES: dict[str, tuple[str, ...]] = {
    "name": (
        "name",
        "doctor",
        "patient",
        "username",
        "hcpname",
        "relativeproxyname",
        "ptname",
        "ptnameinitial",
        "misc",
    ),
    "profession": ("profession",),
    "location": (
        "location",
        "loc",
        "department",
        "hospital",
        "organization",
        "org",
        "street",
        "state",
        "city",
        "country",
        "zip",
        "location-other",
    ),
    "age": ("age",),
    "date": ("date", "dateyear", "time"),
    "id": (
        "id",
        "device",
        "idnum",
        "medicalrecord",
        "medicalrecordnumber",
        "other",
        # remaining i2b2 2014 subtypes
        "bioid",
        "healthplan",
        "account",
        "license",
        "vehicle",
    ),
    "contact": ("contact", "email", "fax", "phone", "url", "ipaddr"),
}


@dataclass(frozen=True)
class LabelMap:
    rules: Mapping[str, str] = field(default_factory=dict)
    unknown_policy: str = "error"

    def __post_init__(self) -> None:
        if self.unknown_policy not in UNKNOWN_POLICIES:
            raise HarmonizeError(f"unknown policy {self.unknown_policy!r}")
        folded: dict[str, str] = {}
        for raw, category in self.rules.items():
            key = raw.casefold()
            if key in folded and folded[key] != category:
                raise HarmonizeError(f"label {raw!r} mapped twice after case-folding")
            if category not in CATEGORIES:
                raise HarmonizeError(f"label {raw!r} maps to non-canonical category {category!r}")
            folded[key] = category
        object.__setattr__(self, "rules", dict(sorted(folded.items())))

    def updated(self, rules: Mapping[str, str]) -> LabelMap:
        return LabelMap({**self.rules, **{k.casefold(): v for k, v in rules.items()}}, self.unknown_policy)

    def fingerprint_payload(self) -> dict:
        return {"rules": dict(self.rules), "unknown_policy": self.unknown_policy}


def builtin_label_map(unknown_policy: str = "error") -> LabelMap:
    return LabelMap(
        {raw: category for category, labels in _BUILTIN_RULES.items() for raw in labels},
        unknown_policy,
    )


def load_label_map(path: str | Path, base: LabelMap | None = None) -> LabelMap:
    """Load ``raw_label<TAB>category`` rows on top of ``base`` (builtin by default).

    A leading ``raw_label``/``category`` header row is optional.
    """
    base = builtin_label_map() if base is None else base
    rules: dict[str, str] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh, delimiter="\t"), 1):
            if not row or not "".join(row).strip() or row[0].startswith("#"):
                continue
            if lineno == 1 and [c.strip().lower() for c in row[:2]] == ["raw_label", "category"]:
                continue
            if len(row) < 2:
                raise HarmonizeError(f"{path}:{lineno}: expected raw_label<TAB>category")
            rules[row[0].strip()] = row[1].strip().lower()
    return base.updated(rules)


def map_label(label_map: LabelMap, raw: str) -> str | None:
    """Map a raw label to its canonical category.

    Returns ``None`` for an unknown label under the ``drop`` policy and the
    case-folded label itself under ``pass_as_is``.
    """
    key = raw.casefold()
    if key in CATEGORIES:
        return key
    category = label_map.rules.get(key)
    if category is not None:
        return category
    if label_map.unknown_policy == "drop":
        return None
    if label_map.unknown_policy == "pass_as_is":
        return key
    raise HarmonizeError(f"unknown PHI label {raw!r}")


def harmonize(annotations: Iterable[Annotation], label_map: LabelMap) -> list[Annotation]:
    """Fill in missing categories; annotations that already carry one are kept as is."""
    out = []
    for ann in annotations:
        if ann.category is not None:
            out.append(ann)
            continue
        category = map_label(label_map, ann.raw_label)
        if category is not None:
            out.append(ann.with_category(category))
    return out


@dataclass(frozen=True)
class ScenarioConfig:
    mode: str = "binary"
    entity: str | None = None
    include_profession: bool = True
    include_age_under_90: bool = True
    include_nonpatient_names: bool = True
    include_large_geo: bool = True
    include_lone_year: bool = True
    include_organization: bool = True

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise HarmonizeError(f"unknown scenario mode {self.mode!r}")
        if self.mode == "per_entity":
            if self.entity not in CATEGORIES:
                raise HarmonizeError(f"per_entity scenario needs a canonical category, got {self.entity!r}")
        elif self.entity is not None:
            raise HarmonizeError(f"entity {self.entity!r} is only valid in per_entity mode")

    def excludes(self, flag: str) -> bool:
        return not getattr(self, FLAG_FIELDS[flag])

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Mapping) -> ScenarioConfig:
        return cls(**data)


SCENARIO_PRESETS: dict[str, ScenarioConfig] = {
    "binary": ScenarioConfig(mode="binary"),
    "multiclass": ScenarioConfig(mode="multiclass"),
    "hipaa-strict": ScenarioConfig(
        mode="binary",
        include_profession=False,
        include_age_under_90=False,
        include_nonpatient_names=False,
        include_large_geo=False,
        include_lone_year=False,
        include_organization=False,
    ),
    "name-only": ScenarioConfig(mode="per_entity", entity="name"),
}


def scenario_preset(name: str) -> ScenarioConfig:
    try:
        return SCENARIO_PRESETS[name]
    except KeyError:
        raise HarmonizeError(
            f"unknown scenario {name!r}; available: {', '.join(SCENARIO_PRESETS)}"
        ) from None


def derive_flags(ann: Annotation) -> frozenset[str]:
    """Attribute flags computable from the annotation alone; see ``FLAG_FIELDS``."""
    flags = set()
    raw = ann.raw_label.casefold()
    literal = ann.literal.strip()
    if ann.category == "profession":
        flags.add("profession")
    if ann.category == "age" and _DIGITS.fullmatch(literal) and int(literal) < 90:
        flags.add("age_under_90")
    if raw in NONPATIENT_NAME_LABELS:
        flags.add("nonpatient_name")
    if raw in LARGE_GEO_LABELS:
        flags.add("large_geo")
    if ann.category == "date" and _YEAR.fullmatch(ann.literal):
        flags.add("lone_year")
    if raw in ORGANIZATION_LABELS:
        flags.add("organization")
    return frozenset(flags)


def apply_scenario(
    annotations: Iterable[Annotation],
    cfg: ScenarioConfig,
    flags: Mapping[Annotation, Iterable[str]] | None = None,
) -> list[Annotation]:
    """Drop annotations carrying any attribute flag that ``cfg`` excludes.

    ``flags`` overrides :func:`derive_flags` for the annotations it contains.
    """
    out = []
    for ann in annotations:
        if ann.category is None:
            raise HarmonizeError(
                f"annotation {ann.doc_id}:{ann.start}-{ann.stop} ({ann.raw_label!r}) has no category"
            )
        ann_flags = flags[ann] if flags is not None and ann in flags else derive_flags(ann)
        if any(cfg.excludes(flag) for flag in ann_flags):
            continue
        out.append(ann)
    return out


def config_fingerprint(tokenizer_name: str, cfg: ScenarioConfig, label_map: LabelMap) -> str:
    """Content hash of the tokenizer, scenario and label map."""
    payload = {
        "tokenizer": tokenizer_name,
        "scenario": cfg.to_dict(),
        "label_map": label_map.fingerprint_payload(),
    }
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":")).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()
