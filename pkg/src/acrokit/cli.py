"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import json
import logging
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from pathlib import Path
from typing import Callable, Optional, Sequence

from . import ad_corpus, disambiguation, evaluation, formats, identification, synthetic
from .model import DataError, SpanKind, extract_spans, normalize_long_form

log = logging.getLogger("acrokit")

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _map(fn: Callable, items: Sequence, jobs: int, chunksize: int = 256) -> list:
    if jobs <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items, chunksize=chunksize))


def _fraction(lo_open: bool):
    def parse(text: str) -> float:
        try:
            v = float(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
        ok = (0 < v <= 1) if lo_open else (0 <= v <= 1)
        if not ok:
            raise argparse.ArgumentTypeError(f"{v} outside {'(0, 1]' if lo_open else '[0, 1]'}")
        return v

    return parse


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _load_dictionary(path: Optional[str], case_insensitive: bool = False):
    if path is None:
        return None
    return formats.load_dictionary(path, case_sensitive=not case_insensitive)


# -- commands ---------------------------------------------------------------


def cmd_identify(args) -> int:
    cfg = identification.IdentifierConfig(
        uppercase_ratio_threshold=args.threshold,
        strict=not args.inclusive,
        relaxed_mode=args.relaxed,
    )
    sentences = formats.load_ai_dataset(args.input, require_labels=False)
    labeled = _map(partial(identification.label_sentence, cfg=cfg), sentences, args.jobs)
    formats.save_ai_dataset(args.output, labeled)
    log.info("labeled %d sentence(s) -> %s", len(labeled), args.output)
    return EXIT_OK


def cmd_build_dict(args) -> int:
    sentences = formats.load_ai_dataset(args.input, require_labels=not args.auto_annotate)
    d = ad_corpus.build_dictionary(
        sentences,
        ambiguous_only=not args.all,
        auto_annotate=args.auto_annotate,
        case_sensitive=not args.case_insensitive,
    )
    formats.save_dictionary(args.output, d)
    print(f"{len(d)} acronym(s), {d.mean_senses():.2f} long forms per acronym")
    return EXIT_OK


def _generate(docs, d, direction: str, jobs: int):
    results = _map(partial(ad_corpus.generate_document, dictionary=d, direction=direction), docs, jobs, 16)
    report = ad_corpus.GenerationReport()
    instances = []
    for inst, rep in results:
        instances.extend(inst)
        report.merge(rep)
    return instances, report


def cmd_gen_ad(args) -> int:
    d = _load_dictionary(args.dict, args.case_insensitive)
    docs = formats.load_documents(args.input)
    instances, report = _generate(docs, d, args.direction, args.jobs)
    formats.save_ad_dataset(args.output, instances)
    if args.report:
        formats.write_json(args.report, report.to_dict())
    if not instances:
        log.warning("no AD instances generated")
    print(f"{len(instances)} instance(s), {len(report.conflicts)} conflict(s)")
    return EXIT_OK


def cmd_train_freq(args) -> int:
    d = _load_dictionary(args.dict, args.case_insensitive)
    train = formats.load_ad_dataset(args.input, d)
    table = disambiguation.train_frequency(train)
    formats.save_frequency(args.output, table)
    return EXIT_OK


def cmd_train_context(args) -> int:
    d = _load_dictionary(args.dict, args.case_insensitive)
    train = formats.load_ad_dataset(args.input, d)
    profile = disambiguation.train_context(train)
    formats.write_json(args.output, profile.to_json())
    return EXIT_OK


def cmd_disambiguate(args) -> int:
    d = _load_dictionary(args.dict, args.case_insensitive)
    instances = formats.load_ad_dataset(args.input, d)
    table = formats.load_frequency(args.freq)
    profile = None
    if args.context:
        profile = disambiguation.ContextProfile.from_json(
            json.loads(Path(args.context).read_text(encoding="utf-8"))
        )
    preds = disambiguation.predict_all(instances, table, profile, args.alpha)
    formats.write_json(args.output, [p.to_dict() for p in preds])
    low = sum(p.low_confidence for p in preds)
    if low:
        log.warning("%d instance(s) with acronyms unseen in training", low)
    return EXIT_OK


def load_predictions(path: str) -> dict[str, str]:
    """AD predictions as a JSON object ``id -> long form`` or records ``{id, prediction}``."""
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError:
        obj = None  # JSON lines
    if isinstance(obj, dict) and "id" not in obj:
        return {str(k): v for k, v in obj.items()}
    obj = formats.read_records(path)
    out = {}
    for i, rec in enumerate(obj):
        if not isinstance(rec, dict) or "id" not in rec or not isinstance(rec.get("prediction"), str):
            raise DataError("expected {id, prediction}", str(rec.get("id", f"#{i}")) if isinstance(rec, dict) else f"#{i}")
        out[str(rec["id"])] = rec["prediction"]
    return out


def cmd_evaluate(args) -> int:
    if args.task == "ai":
        gold = formats.load_ai_dataset(args.gold)
        pred = formats.load_ai_dataset(args.pred)
        report = evaluation.evaluate_ai(gold, pred)
    else:
        d = _load_dictionary(args.dict, args.case_insensitive)
        gold = formats.load_ad_dataset(args.gold, d)
        pred = load_predictions(args.pred)
        report = evaluation.evaluate_ad(gold, pred)
    print(report.to_table(args.name, per_class=args.per_class and args.task == "ai"))
    if args.output:
        formats.write_json(args.output, report.to_dict())
    return EXIT_OK


def _ai_stats(sentences) -> dict:
    acronyms, meanings = set(), set()
    for s in sentences:
        if s.labels is None:
            continue
        for sp in extract_spans(s):
            text = sp.text(s.tokens)
            if sp.kind is SpanKind.SHORT:
                acronyms.add(text)
            else:
                meanings.add(normalize_long_form(text))
    return {"sentences": len(sentences), "unique_acronyms": len(acronyms), "unique_long_forms": len(meanings)}


def _ad_stats(instances) -> dict:
    per_lf: dict[tuple[str, str], int] = {}
    for inst in instances:
        if inst.gold is not None:
            per_lf[(inst.acronym, inst.gold)] = per_lf.get((inst.acronym, inst.gold), 0) + 1
    return {
        "instances": len(instances),
        "sentences": len({tuple(i.sentence.tokens) for i in instances}),
        "acronyms": len({i.acronym for i in instances}),
        "long_forms": len(per_lf),
        "mean_instances_per_long_form": (sum(per_lf.values()) / len(per_lf)) if per_lf else 0.0,
    }


def cmd_stats(args) -> int:
    if args.task == "ai":
        stats = _ai_stats(formats.load_ai_dataset(args.input, require_labels=False))
    elif args.task == "ad":
        stats = _ad_stats(formats.load_ad_dataset(args.input, _load_dictionary(args.dict, args.case_insensitive)))
    else:
        stats = _corpus_stats(formats.load_documents(args.input))
    print(json.dumps(stats, indent=1, ensure_ascii=False))
    if args.output:
        formats.write_json(args.output, stats)
    return EXIT_OK


def _corpus_stats(docs) -> dict:
    sentences = [s for doc in docs for s in doc.sentences]
    out = {"documents": len(docs)}
    out.update(_ai_stats(sentences))
    return out


class StageError(Exception):
    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage {stage!r} failed: {cause}")


def run_pipeline(docs, out_dir: Path, jobs: int = 1, auto_annotate: bool = False, direction: str = "both") -> dict:
    """filter -> build-dict -> gen-ad -> train-freq, writing every artifact."""
    out_dir.mkdir(parents=True, exist_ok=True)
    stage = "filter"
    try:
        sentences = [s for doc in docs for s in doc.sentences]
        kept = identification.filter_sentences(sentences)
        formats.save_ai_dataset(out_dir / "filtered.json", kept)

        stage = "build-dict"
        d = ad_corpus.build_dictionary(kept, auto_annotate=auto_annotate)
        formats.save_dictionary(out_dir / "dictionary.json", d)

        stage = "gen-ad"
        instances, report = _generate(docs, d, direction, jobs)
        formats.save_ad_dataset(out_dir / "ad.json", instances)
        formats.write_json(out_dir / "generation_report.json", report.to_dict())
        if not instances:
            log.warning("pipeline produced no AD instances")

        stage = "train-freq"
        table = disambiguation.train_frequency(instances)
        formats.save_frequency(out_dir / "frequency.json", table)

        stage = "stats"
        stats = {
            "documents": len(docs),
            "sentences": len(sentences),
            "candidate_sentences": len(kept),
            "labeled_sentences": sum(s.labels is not None for s in kept),
            "dictionary_size": len(d),
            "mean_senses": d.mean_senses(),
            "ad_instances": len(instances),
            "instances_per_acronym": dict(sorted(report.instances_per_acronym.items())),
            "conflicts": len(report.conflicts),
        }
        stats.update({f"ad_{k}": v for k, v in _ad_stats(instances).items() if k != "instances"})
        formats.write_json(out_dir / "stats.json", stats)
    except (DataError, OSError, ValueError) as e:
        raise StageError(stage, e) from e
    return stats


def cmd_pipeline(args) -> int:
    docs = formats.load_documents(args.input)
    stats = run_pipeline(
        docs, Path(args.output), jobs=args.jobs, auto_annotate=args.auto_annotate, direction=args.direction
    )
    print(json.dumps(stats, indent=1, ensure_ascii=False))
    return EXIT_OK


def cmd_synth(args) -> int:
    rng = random.Random(args.seed)
    if args.kind == "pipeline":
        formats.save_documents(args.output, synthetic.pipeline_fixture())
    elif args.kind == "ai":
        gold, pred = synthetic.random_ai_pair(rng, args.size)
        formats.save_ai_dataset(args.output, gold)
        if args.pred_output:
            formats.save_ai_dataset(args.pred_output, pred)
    elif args.kind == "parenthetical":
        formats.save_ai_dataset(
            args.output, [synthetic.parenthetical_sentence(rng, k) for k in range(args.size)]
        )
    else:
        gold, pred = synthetic.random_ad_pair(rng, args.size)
        formats.save_ad_dataset(args.output, gold, with_candidates=True)
        if args.pred_output:
            formats.write_json(args.pred_output, [{"id": k, "prediction": v} for k, v in pred.items()])
    return EXIT_OK


# -- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="acrokit", description="Acronym identification and disambiguation toolkit.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def dict_flags(sp, required=False):
        sp.add_argument("--dict", required=required, help="dictionary JSON (acronym -> long forms)")
        sp.add_argument("--case-insensitive", action="store_true", help="match acronym keys ignoring case")

    sp = sub.add_parser("identify", help="rule-based acronym identification")
    sp.add_argument("--input", required=True)
    sp.add_argument("--output", required=True)
    sp.add_argument("--relaxed", action="store_true", help="also mark acronyms outside parenthetical patterns")
    sp.add_argument("--threshold", type=_fraction(True), default=0.6, help="uppercase ratio (default 0.6)")
    sp.add_argument("--inclusive", action="store_true", help="compare the ratio with >= instead of >")
    sp.add_argument("--jobs", type=_positive_int, default=1)
    sp.set_defaults(func=cmd_identify)

    sp = sub.add_parser("build-dict", help="induce the ambiguous-acronym dictionary")
    sp.add_argument("--input", required=True, help="labeled AI-format file")
    sp.add_argument("--output", required=True)
    sp.add_argument("--all", action="store_true", help="keep unambiguous acronyms too")
    sp.add_argument("--auto-annotate", action="store_true", help="label unlabeled sentences with the identifier")
    sp.add_argument("--case-insensitive", action="store_true")
    sp.set_defaults(func=cmd_build_dict)

    sp = sub.add_parser("gen-ad", help="generate silver AD instances from documents")
    sp.add_argument("--input", required=True, help="documents JSON")
    dict_flags(sp, required=True)
    sp.add_argument("--output", required=True)
    sp.add_argument("--report", help="write the generation report here")
    sp.add_argument("--direction", choices=("both", "forward"), default="both")
    sp.add_argument("--jobs", type=_positive_int, default=1)
    sp.set_defaults(func=cmd_gen_ad)

    sp = sub.add_parser("train-freq", help="count senses in AD training data")
    sp.add_argument("--input", required=True)
    sp.add_argument("--output", required=True)
    dict_flags(sp)
    sp.set_defaults(func=cmd_train_freq)

    sp = sub.add_parser("train-context", help="build TF-IDF sense profiles")
    sp.add_argument("--input", required=True)
    sp.add_argument("--output", required=True)
    dict_flags(sp)
    sp.set_defaults(func=cmd_train_context)

    sp = sub.add_parser("disambiguate", help="predict long forms for AD instances")
    sp.add_argument("--input", required=True)
    sp.add_argument("--output", required=True)
    sp.add_argument("--freq", required=True)
    sp.add_argument("--context", help="context profile JSON; omit for the frequency baseline")
    sp.add_argument("--alpha", type=_fraction(False), default=0.5)
    dict_flags(sp)
    sp.set_defaults(func=cmd_disambiguate)

    sp = sub.add_parser("evaluate", help="score predictions against gold")
    sp.add_argument("--gold", "--input", dest="gold", required=True)
    sp.add_argument("--pred", required=True)
    sp.add_argument("--task", choices=("ai", "ad"), required=True)
    sp.add_argument("--output", help="write the JSON report here")
    sp.add_argument("--name", default="System")
    sp.add_argument("--per-class", action="store_true")
    dict_flags(sp)
    sp.set_defaults(func=cmd_evaluate)

    sp = sub.add_parser("stats", help="dataset statistics")
    sp.add_argument("--input", required=True)
    sp.add_argument("--task", choices=("ai", "ad", "docs"), default="ai")
    sp.add_argument("--output")
    dict_flags(sp)
    sp.set_defaults(func=cmd_stats)

    sp = sub.add_parser("pipeline", help="filter, build dictionary, generate AD, train frequencies")
    sp.add_argument("--input", required=True, help="documents JSON")
    sp.add_argument("--output", required=True, help="output directory")
    sp.add_argument("--auto-annotate", action="store_true")
    sp.add_argument("--direction", choices=("both", "forward"), default="both")
    sp.add_argument("--jobs", type=_positive_int, default=1)
    sp.set_defaults(func=cmd_pipeline)

    sp = sub.add_parser("synth", help="write seeded synthetic data")
    sp.add_argument("--kind", choices=("pipeline", "ai", "ad", "parenthetical"), required=True)
    sp.add_argument("--output", required=True)
    sp.add_argument("--pred-output")
    sp.add_argument("--size", type=_positive_int, default=100)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_synth)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except StageError as e:
        print(f"error: pipeline {e}", file=sys.stderr)
        return EXIT_DATA
    except evaluation.AlignmentError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DATA
    except (DataError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DATA
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
