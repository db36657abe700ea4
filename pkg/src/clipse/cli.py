"""Command-line entry point.

Exit codes: 0 on success, 1 on usage errors, 2 on data or validation errors.
Every subcommand reads a canonical corpus directory and writes new output;
input directories are never modified.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from .corpus import ClipseError
from .detach import detach_corpus, evaluate_detached, read_detached, write_detached
from .evaluate import evaluate_corpus, evaluate_corpus_entities
from .harmonize import SCENARIO_PRESETS, LabelMap, builtin_label_map, config_fingerprint, load_label_map, scenario_preset
from .ingest import (
    convert_i2b2_dir,
    convert_records,
    convert_standoff_dir,
    ingest_predictions,
    read_document_records,
    read_standoff,
)
from .merge import MergeStrategy, merge_annotations
from .parallel import default_jobs
from .report import render_report
from .scrub import STYLES, scrub_document
from .store import FORMATS, read_corpus, write_corpus
from .synth import TEMPLATE_SETS, generate_corpus
from .tagger import builtin_profile, load_profile, tag_corpus
from .tokenize import DEFAULT_TOKENIZER, TOKENIZERS

USAGE_ERROR = 1
DATA_ERROR = 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        raise _UsageError(f"{self.prog}: error: {message}")


def _add_config(p: argparse.ArgumentParser, scenario_default: str | None = "binary") -> None:
    p.add_argument("--scenario", choices=sorted(SCENARIO_PRESETS), default=scenario_default)
    p.add_argument(
        "--tokenizer", choices=sorted(TOKENIZERS), default=DEFAULT_TOKENIZER if scenario_default else None
    )
    p.add_argument("--label-map", type=Path, help="TSV of raw_label, category overriding the builtin map")


def _add_jobs(p: argparse.ArgumentParser) -> None:
    p.add_argument("--jobs", type=int, default=None, help="worker processes (default: $CLIPSE_JOBS or 1)")


def _jobs(args: argparse.Namespace) -> int:
    return max(1, args.jobs) if args.jobs is not None else default_jobs()


def _label_map(args: argparse.Namespace) -> LabelMap:
    return load_label_map(args.label_map) if args.label_map else builtin_label_map()


def _output_dir(path: Path) -> Path:
    if path.exists() and (not path.is_dir() or any(path.iterdir())):
        raise ClipseError(f"output directory {path} exists and is not empty")
    return path


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="clipse", description="Clinical-note deidentification corpus toolkit")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("convert", help="build a canonical corpus from i2b2 XML, standoff or JSONL input")
    p.add_argument("--format", required=True, choices=("i2b2-xml", "standoff", "jsonl", "predictions"))
    p.add_argument("--in", dest="inp", required=True, type=Path)
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--annotator", default="gold")
    p.add_argument("--standoff", type=Path, help="standoff TSV/JSONL rows (standoff and jsonl formats)")
    p.add_argument("--corpus", type=Path, help="existing corpus to add predictions to")
    p.add_argument("--split", default="unsplit")
    p.add_argument("--output-format", choices=FORMATS, default="parquet")

    p = sub.add_parser("tag", help="run the rule-based reference tagger")
    p.add_argument("--corpus", required=True, type=Path)
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--profile", type=Path)
    p.add_argument("--annotator", default="ref_tagger")
    p.add_argument("--no-corpus-gazetteers", action="store_true")
    p.add_argument("--output-format", choices=FORMATS, default="parquet")
    _add_jobs(p)

    p = sub.add_parser("eval", help="token-level evaluation of one annotator against another")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--corpus", type=Path)
    src.add_argument("--detached", type=Path, help="detached label file instead of a corpus")
    p.add_argument("--gold", default="gold")
    p.add_argument("--pred", required=True)
    _add_config(p, scenario_default=None)
    p.add_argument("--entity-level", action="store_true", help="add exact-cover entity metrics")
    p.add_argument("--out", type=Path)
    _add_jobs(p)

    p = sub.add_parser("merge", help="merge annotation sets by character coverage")
    p.add_argument("--corpus", required=True, type=Path)
    p.add_argument("--annotators", required=True)
    p.add_argument("--strategy", default="union", help="union, intersection or majority:K")
    p.add_argument("--name", default="merged", help="name of the merged annotation set")
    p.add_argument("--label-map", type=Path)
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--output-format", choices=FORMATS, default="parquet")

    p = sub.add_parser("scrub", help="write scrubbed note text")
    p.add_argument("--corpus", required=True, type=Path)
    p.add_argument("--annotator", default="gold")
    p.add_argument("--style", choices=sorted(STYLES), default="placeholder")
    p.add_argument("--out", required=True, type=Path)

    p = sub.add_parser("detach", help="write text-free token labels")
    p.add_argument("--corpus", required=True, type=Path)
    p.add_argument("--annotators", required=True)
    _add_config(p)
    p.add_argument("--out", required=True, type=Path)

    p = sub.add_parser("report", help="write a static HTML agreement report")
    p.add_argument("--corpus", required=True, type=Path)
    p.add_argument("--gold", default="gold")
    p.add_argument("--pred", required=True)
    _add_config(p)
    p.add_argument("--out", required=True, type=Path)

    p = sub.add_parser("synth", help="generate a synthetic corpus")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--templates", choices=TEMPLATE_SETS, default="mixed")
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--output-format", choices=FORMATS, default="parquet")
    return parser


def _cmd_convert(args: argparse.Namespace) -> None:
    if args.format == "i2b2-xml":
        corpus = convert_i2b2_dir(args.inp, args.annotator, split=args.split)
    elif args.format == "standoff":
        if args.standoff is None:
            raise _UsageError("convert --format standoff needs --standoff")
        corpus = convert_standoff_dir(args.inp, read_standoff(args.standoff), args.annotator, split=args.split)
    elif args.format == "jsonl":
        rows = read_standoff(args.standoff) if args.standoff else []
        corpus = convert_records(read_document_records(args.inp), rows, args.annotator)
    else:
        if args.corpus is None:
            raise _UsageError("convert --format predictions needs --corpus")
        corpus = ingest_predictions(read_corpus(args.corpus), read_standoff(args.inp), args.annotator)
    write_corpus(corpus, _output_dir(args.out), args.output_format)


def _cmd_tag(args: argparse.Namespace) -> None:
    profile = load_profile(args.profile) if args.profile else builtin_profile()
    corpus = read_corpus(args.corpus)
    tagged = tag_corpus(
        corpus, profile, args.annotator, use_corpus_gazetteers=not args.no_corpus_gazetteers, jobs=_jobs(args)
    )
    write_corpus(tagged, _output_dir(args.out), args.output_format)


def _cmd_eval(args: argparse.Namespace) -> dict:
    label_map = _label_map(args)
    if args.detached is not None:
        if args.entity_level:
            raise _UsageError("--entity-level needs --corpus; detached labels carry no spans")
        detached = read_detached(args.detached)
        expected = None
        if args.scenario or args.tokenizer or args.label_map:
            cfg = scenario_preset(args.scenario) if args.scenario else detached.scenario
            expected = config_fingerprint(args.tokenizer or detached.tokenizer, cfg, label_map)
        result = evaluate_detached(detached, args.gold, args.pred, expected_fingerprint=expected)
        scenario, tokenizer = detached.scenario, detached.tokenizer
    else:
        scenario = scenario_preset(args.scenario or "binary")
        tokenizer = args.tokenizer or DEFAULT_TOKENIZER
        corpus = read_corpus(args.corpus)
        result = evaluate_corpus(corpus, args.gold, args.pred, scenario, tokenizer, label_map=label_map, jobs=_jobs(args))
    body = {"gold": args.gold, "pred": args.pred, "tokenizer": tokenizer, "scenario": scenario.to_dict()}
    body.update(result.to_dict())
    if args.entity_level:
        p, r, f1 = evaluate_corpus_entities(corpus, args.gold, args.pred, scenario, label_map=label_map).metrics()
        body["entity"] = {"precision": p, "recall": r, "f1": f1}
    return body


def _cmd_merge(args: argparse.Namespace) -> None:
    corpus = read_corpus(args.corpus)
    annotators = [a.strip() for a in args.annotators.split(",") if a.strip()]
    merged = merge_annotations(
        corpus, annotators, MergeStrategy.parse(args.strategy), args.name, label_map=_label_map(args)
    )
    write_corpus(merged, _output_dir(args.out), args.output_format)


def _cmd_scrub(args: argparse.Namespace) -> None:
    corpus = read_corpus(args.corpus)
    corpus.require_annotators(args.annotator)
    grouped = corpus.by_document(args.annotator)
    out = _output_dir(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "offset_map.jsonl", "w", encoding="utf-8") as fh:
        for doc_id, doc in corpus.documents.items():
            text, offset_map = scrub_document(doc, grouped[doc_id], args.style)
            (out / f"{doc_id}.txt").write_text(text, encoding="utf-8")
            for r in offset_map:
                fh.write(json.dumps({"doc_id": doc_id, **r._asdict()}) + "\n")


def _cmd_detach(args: argparse.Namespace) -> None:
    corpus = read_corpus(args.corpus)
    annotators = [a.strip() for a in args.annotators.split(",") if a.strip()]
    detached = detach_corpus(
        corpus, annotators, scenario_preset(args.scenario), args.tokenizer, label_map=_label_map(args)
    )
    write_detached(detached, args.out)


def _cmd_report(args: argparse.Namespace) -> None:
    corpus = read_corpus(args.corpus)
    html = render_report(
        corpus, args.gold, args.pred, scenario_preset(args.scenario), tokenizer=args.tokenizer, label_map=_label_map(args)
    )
    args.out.write_text(html, encoding="utf-8")


def _cmd_synth(args: argparse.Namespace) -> None:
    corpus = generate_corpus(args.seed, args.n, args.templates)
    write_corpus(corpus, _output_dir(args.out), args.output_format)


_COMMANDS = {
    "convert": _cmd_convert,
    "tag": _cmd_tag,
    "eval": _cmd_eval,
    "merge": _cmd_merge,
    "scrub": _cmd_scrub,
    "detach": _cmd_detach,
    "report": _cmd_report,
    "synth": _cmd_synth,
}


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        body = _COMMANDS[args.command](args)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return USAGE_ERROR
    except (ClipseError, OSError) as exc:
        print(f"clipse: error: {exc}", file=sys.stderr)
        return DATA_ERROR
    if body is not None:
        text = json.dumps(body, indent=2, sort_keys=True)
        if args.out is None:
            print(text)
        else:
            try:
                args.out.write_text(text + "\n", encoding="utf-8")
            except OSError as exc:
                print(f"clipse: error: {exc}", file=sys.stderr)
                return DATA_ERROR
    return 0


if __name__ == "__main__":
    sys.exit(main())
