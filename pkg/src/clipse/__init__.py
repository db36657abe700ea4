"""Storage, evaluation, merging, scrubbing and reporting for clinical-note deidentification."""

from .corpus import CATEGORIES, GOLD, Annotation, ClipseError, Corpus, CorpusError, Document, Gazetteer
from .detach import DetachedCorpus, DetachError, detach_corpus, evaluate_detached, read_detached, write_detached
from .evaluate import (
    ClassCounts,
    ConfusionCounts,
    EvalResult,
    EvaluationError,
    evaluate_corpus,
    evaluate_corpus_entities,
    evaluate_entities,
    evaluate_pair,
)
from .harmonize import (
    SCENARIO_PRESETS,
    HarmonizeError,
    LabelMap,
    ScenarioConfig,
    apply_scenario,
    builtin_label_map,
    harmonize,
    load_label_map,
    map_label,
    scenario_preset,
)
from .ingest import IngestError, StandoffRow, ingest_predictions, parse_i2b2_xml, parse_standoff
from .merge import MergeError, MergeStrategy, merge_annotations
from .report import render_report
from .scrub import ScrubError, scrub_document
from .store import StoreError, read_corpus, write_corpus
from .synth import generate_corpus
from .tagger import PatternRule, TaggerError, TaggerProfile, builtin_profile, load_profile, tag_corpus, tag_document
from .tokenize import Token, UnknownTokenizerError, get_tokenizer, tokenize_whitespace, tokenize_wordpunct

__version__ = "0.1.0"

__all__ = [
    "CATEGORIES", "GOLD", "SCENARIO_PRESETS",
    "Annotation", "ClassCounts", "ClipseError", "ConfusionCounts", "Corpus", "CorpusError",
    "DetachError", "DetachedCorpus", "Document", "EvalResult", "EvaluationError", "Gazetteer",
    "HarmonizeError", "IngestError", "LabelMap", "MergeError", "MergeStrategy", "PatternRule",
    "ScenarioConfig", "ScrubError", "StandoffRow", "StoreError", "TaggerError", "TaggerProfile",
    "Token", "UnknownTokenizerError",
    "apply_scenario", "builtin_label_map", "builtin_profile", "detach_corpus", "evaluate_corpus",
    "evaluate_corpus_entities", "evaluate_detached", "evaluate_entities", "evaluate_pair",
    "generate_corpus", "get_tokenizer", "harmonize", "ingest_predictions", "load_label_map",
    "load_profile", "map_label", "merge_annotations", "parse_i2b2_xml", "parse_standoff",
    "read_corpus", "read_detached", "render_report", "scenario_preset", "scrub_document",
    "tag_corpus", "tag_document", "tokenize_whitespace", "tokenize_wordpunct", "write_corpus",
    "write_detached",
]
