"""``oovcover`` command line: one subcommand per pipeline stage.

Artifacts go to the paths named by ``--out``; logs go to stderr and stdout
is reserved for ``report``.  Exit status is 0 on success, 1 on runtime or
I/O failure (one JSON line on stderr) and 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__
from . import benchmark as bench
from . import evaluation as ev
from .corpus import corpus_stats, ingest_files, list_corpus_files, load_table, save_table
from .coverage import (
    DEFAULT_MIN_FREQUENCY, CoverageVerdict, MissingBigramReport, count_consecutive_vowel_words,
    find_oov_candidates, load_vowel_set, missing_bigram_report,
)
from .errors import OOVError
from .reporting import render_report
from .scriptgen import DEFAULT_GROUP_SIZE, generate_recording_script, validate_script
from .selection import DEFAULT_BUDGET, DEFAULT_K, SelectionConfig, coverage_of_selection, select_words_greedy
from .textcore import SegmentationMode

log = logging.getLogger("oovcover")

SUBCOMMANDS = ("ingest", "coverage", "select", "script", "bench-export", "bench-import",
               "bench-build", "gap", "eval", "report")


@dataclass
class PipelineConfig:
    language: str = "hi"
    mode: str = SegmentationMode.CODEPOINT.value
    min_frequency: int = DEFAULT_MIN_FREQUENCY
    k: int = DEFAULT_K
    budget: int = DEFAULT_BUDGET
    group_size: int = DEFAULT_GROUP_SIZE
    seed: int = 0
    targets: dict = field(default_factory=lambda: dict(bench.DEFAULT_TARGETS))
    paths: dict = field(default_factory=dict)

    @classmethod
    def from_args(cls, args) -> "PipelineConfig":
        paths = {}
        for name in ("inputs", "training", "target", "exclude", "words", "benchmark", "sheet", "entries",
                     "report", "candidates", "ratings", "rates", "embeddings", "manifest", "visqol", "eval", "out"):
            value = getattr(args, name, None)
            if value:
                paths[name] = [str(v) for v in value] if isinstance(value, list) else str(value)
        return cls(
            language=bench.language_tag(args.lang),
            mode=SegmentationMode.parse(args.mode).value,
            min_frequency=args.min_freq,
            k=args.k,
            budget=args.budget,
            group_size=args.group_size,
            seed=args.seed,
            targets=bench.parse_targets(args.targets),
            paths=paths,
        )


def _meta(args, config: PipelineConfig) -> dict:
    return {"tool": "oovcover", "version": __version__, "command": args.command, "config": asdict(config)}


def _write(path, text: str):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(text)
    log.info("wrote %s", path)


def _dump(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, indent=2, sort_keys=True) + "\n"


def _read(path) -> str:
    with open(path, encoding="utf-8") as f:
        return f.read()


def _outdir(args) -> Path:
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


# --- subcommands -------------------------------------------------------------

def cmd_ingest(args, config):
    files = list_corpus_files(args.inputs)
    if not files:
        log.warning("no input files found; writing an empty table")
    table = ingest_files(files, config.mode, dedupe=args.dedupe, workers=args.workers)
    if not args.out:
        raise OOVError("ingest needs --out")
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    save_table(table, args.out, meta=json.dumps(_meta(args, config), ensure_ascii=False, sort_keys=True))
    log.info("wrote %s", args.out)
    stats = corpus_stats(table)
    if args.stats:
        _write(args.stats, _dump({"meta": _meta(args, config), "stats": stats.as_dict()}))
    log.info("%d distinct words, %d tokens, %d distinct bigrams", stats.distinct_words,
             stats.total_word_tokens, stats.distinct_bigrams)


def _report_and_candidates(args, config):
    training = load_table(args.training)
    target = load_table(args.target)
    report = missing_bigram_report(training, target, config.min_frequency)
    candidates = find_oov_candidates(training, target, report)
    return training, target, report, candidates


def cmd_coverage(args, config):
    training, target, report, candidates = _report_and_candidates(args, config)
    out = _outdir(args)
    meta = _meta(args, config)
    _write(out / "report.tsv", report.to_tsv())
    _write(out / "report.json", _dump({"meta": meta, **report.to_json()}))
    _write(out / "candidates.jsonl", "".join(json.dumps(c.to_json(), ensure_ascii=False) + "\n" for c in candidates))
    summary = {
        "meta": meta,
        "training": corpus_stats(training).as_dict(),
        "target": corpus_stats(target).as_dict(),
        "missing_bigrams": len(report),
        "candidates": len(candidates),
    }
    if args.vowels:
        vowels = load_vowel_set(args.vowels)
        summary["consecutive_vowels"] = {
            name: dict(zip(("word_types", "occurrences"), count_consecutive_vowel_words(t, vowels)))
            for name, t in (("training", training), ("target", target))
        }
    _write(out / "coverage.json", _dump(summary))
    log.info("%d missing bigrams, %d candidate words", len(report), len(candidates))


def _excluded_words(paths) -> set:
    words = set()
    for p in paths or ():
        text = _read(p)
        if str(p).endswith(".json"):
            words |= bench.benchmark_words(text)
        else:
            words |= {line.strip() for line in text.splitlines() if line.strip()}
    return words


def cmd_select(args, config):
    if args.candidates and args.report:
        report = MissingBigramReport.from_json(json.loads(_read(args.report)))
        candidates = [CoverageVerdict.from_json(json.loads(line)) for line in _read(args.candidates).splitlines() if line.strip()]
    elif args.training and args.target:
        _, _, report, candidates = _report_and_candidates(args, config)
    else:
        raise OOVError("select needs --training and --target, or --candidates and --report")
    excluded = _excluded_words(args.exclude)
    if excluded:
        before = len(candidates)
        candidates = [c for c in candidates if c.surface not in excluded]
        log.info("excluded %d benchmark words from %d candidates", before - len(candidates), before)
    sel_config = SelectionConfig(k=config.k, budget=config.budget, tie_break=args.tie_break)
    result = select_words_greedy(candidates, report, sel_config)
    metrics = coverage_of_selection(result, report)
    out = _outdir(args)
    doc = {
        "meta": _meta(args, config),
        **result.to_json(),
        "coverage": {"fraction": metrics.coverage, "mean_credited": metrics.mean_credited,
                     "uncovered": [[b[0], b[1]] for b in metrics.uncovered]},
    }
    _write(out / "selection.json", _dump(doc))
    _write(out / "words.txt", "".join(w + "\n" for w in result.words))
    log.info("selected %d words, bigram coverage %.3f", len(result.chosen), metrics.coverage)


def cmd_script(args, config):
    words = [w.strip() for w in _read(args.words).splitlines() if w.strip()]
    log.info("shuffling with seed %d", config.seed)
    script = generate_recording_script(words, config.group_size, config.seed, config.language)
    script.meta = _meta(args, config)
    out = _outdir(args)
    _write(out / "script.txt", script.render())
    _write(out / "script.json", script.sidecar_json())
    if args.benchmark:
        if not args.training:
            raise OOVError("--benchmark validation also needs --training")
        training = load_table(args.training)
        bench_words = _excluded_words([args.benchmark])
        report = validate_script(script, bench_words, training)
        _write(out / "validation.json", _dump({"meta": _meta(args, config), **report.to_json()}))
        if not report.passed:
            raise OOVError("script shares words with the benchmark: " + ", ".join(report.overlaps))


def cmd_bench_export(args, config):
    candidates = [CoverageVerdict.from_json(json.loads(line)) for line in _read(args.candidates).splitlines() if line.strip()]
    if not args.out:
        raise OOVError("bench-export needs --out")
    _write(args.out, bench.export_annotation_sheet(candidates))


def cmd_bench_import(args, config):
    training = load_table(args.training)
    entries, quota, rejects = bench.import_annotations(_read(args.sheet), training, config.language,
                                                       targets=config.targets)
    for r in rejects:
        log.warning("row %d (%s): %s", r.row, r.word, r.reason)
    if not args.out:
        raise OOVError("bench-import needs --out")
    _write(args.out, bench.entries_to_json(entries, quota, rejects, meta=_meta(args, config)))
    for cat, status, have, want in quota.shortfalls():
        log.info("quota short: %s %s %d/%d", cat, status, have, want)


def cmd_gap(args, config):
    entries, quota = bench.entries_from_json(_read(args.entries))
    quota.targets = dict(config.targets) if args.targets_given else quota.targets
    report = MissingBigramReport.from_json(json.loads(_read(args.report)))
    gaps = bench.gap_report(quota, entries, report)
    if not args.out:
        raise OOVError("gap needs --out")
    _write(args.out, bench.gap_report_tsv(gaps, report))


def cmd_bench_build(args, config):
    entries, quota = bench.entries_from_json(_read(args.entries))
    if args.targets_given:
        quota.targets = dict(config.targets)
    text = bench.build_benchmark(entries, quota, force=args.force, meta=_meta(args, config))
    if not args.out:
        raise OOVError("bench-build needs --out")
    _write(args.out, text)


def _rates_rows(text: str):
    import csv
    import io
    reader = csv.DictReader(io.StringIO(text))
    need = set(ev.CELL_FIELDS) | {"rate"}
    if not need <= set(reader.fieldnames or ()):
        raise OOVError("rates CSV needs columns: " + ",".join(ev.CELL_FIELDS + ("rate",)))
    return list(reader)


def cmd_eval(args, config):
    doc = {"meta": _meta(args, config)}
    if args.ratings:
        ratings = ev.read_ratings(_read(args.ratings))
        main = [r for r in ratings if r.train_condition in (ev.TrainCondition.I, ev.TrainCondition.I_O)]
        doc["ier"] = ev.ier_to_json(ev.compute_ier(main, majority=args.majority))
        gender = [r for r in ratings if r.system is ev.System.FP]
        if any(r.train_condition in (ev.TrainCondition.I_M1M2, ev.TrainCondition.I_F1) for r in gender):
            doc["single_gender"] = ev.single_gender_to_json(ev.single_gender_comparison(gender, majority=args.majority))
    elif args.rates:
        doc["ier"] = ev.ier_to_json(ev.IERTable.from_rates(_rates_rows(_read(args.rates))))
    ssim = {}
    if args.embeddings:
        if not args.manifest:
            raise OOVError("--embeddings needs --manifest")
        ssim = ev.pair_embeddings(ev.read_embeddings(_read(args.embeddings)), _read(args.manifest))
    visqol = ev.read_quality_scores(_read(args.visqol)) if args.visqol else {}
    if ssim or visqol:
        doc["quality"] = ev.quality_to_json(ev.quality_report(ssim, visqol))
    if not args.out:
        raise OOVError("eval needs --out")
    _write(args.out, _dump(doc))


def cmd_report(args, config):
    doc = json.loads(_read(args.eval))
    ier = ev.ier_from_json(doc["ier"]) if "ier" in doc else None
    gender = ev.single_gender_from_json(doc["single_gender"]) if "single_gender" in doc else None
    quality = ev.quality_from_json(doc["quality"]) if "quality" in doc else None
    rep = render_report(ier, gender, quality)
    sys.stdout.write(rep.text)
    if args.out:
        _write(args.out, _dump(rep.data))


HANDLERS = {
    "ingest": cmd_ingest, "coverage": cmd_coverage, "select": cmd_select, "script": cmd_script,
    "bench-export": cmd_bench_export, "bench-import": cmd_bench_import, "bench-build": cmd_bench_build,
    "gap": cmd_gap, "eval": cmd_eval, "report": cmd_report,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--lang", default="hi", help="language tag (hi, ta)")
    common.add_argument("--mode", default="codepoint", choices=["codepoint", "grapheme"])
    common.add_argument("--min-freq", type=int, default=DEFAULT_MIN_FREQUENCY,
                        help="minimum target count for a missing bigram to be reported")
    common.add_argument("--k", type=int, default=DEFAULT_K, help="per-bigram credit cap")
    common.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="maximum words to select")
    common.add_argument("--group-size", type=int, default=DEFAULT_GROUP_SIZE)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--targets", default=None, help="per-category quota, N or IV,OOV (default 50,50)")
    common.add_argument("--force", action="store_true", help="build a benchmark despite unmet quotas")
    common.add_argument("--out", help="output file or directory")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="oovcover", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"oovcover {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="{" + ",".join(SUBCOMMANDS) + "}")

    p = sub.add_parser("ingest", parents=[common], help="count words and bigrams in text files")
    p.add_argument("inputs", nargs="*", help="text files or directories of *.txt")
    p.add_argument("--stats", help="write a JSON stats summary here")
    p.add_argument("--dedupe", action="store_true", help="count repeated lines once")
    p.add_argument("--workers", type=int, default=1)

    for name, helptext in (("coverage", "missing-bigram report and OOV candidates"),
                           ("select", "capped greedy word selection")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--training", help="training corpus table")
        p.add_argument("--target", help="target corpus table")
        if name == "coverage":
            p.add_argument("--vowels", help="vowel inventory (hi, ta, en, hi+en or a JSON path)")
        else:
            p.add_argument("--candidates", help="candidates.jsonl from coverage")
            p.add_argument("--report", help="report.json from coverage")
            p.add_argument("--exclude", action="append", help="benchmark JSON or word list to keep out")
            p.add_argument("--tie-break", default="lexicographic", choices=["lexicographic", "frequency"])

    p = sub.add_parser("script", parents=[common], help="group selected words into utterances")
    p.add_argument("--words", required=True)
    p.add_argument("--benchmark", help="benchmark JSON or word list to validate against")
    p.add_argument("--training", help="training table for shared-bigram checks")

    p = sub.add_parser("bench-export", parents=[common], help="annotation sheet from candidates")
    p.add_argument("--candidates", required=True)

    p = sub.add_parser("bench-import", parents=[common], help="read an annotated sheet")
    p.add_argument("--sheet", required=True)
    p.add_argument("--training", required=True)

    p = sub.add_parser("gap", parents=[common], help="uncovered bigrams per short category")
    p.add_argument("--entries", required=True)
    p.add_argument("--report", required=True)

    p = sub.add_parser("bench-build", parents=[common], help="canonical benchmark JSON")
    p.add_argument("--entries", required=True)

    p = sub.add_parser("eval", parents=[common], help="aggregate ratings and quality scores")
    p.add_argument("--ratings", help="ratings CSV")
    p.add_argument("--rates", help="pre-aggregated per-category rates CSV")
    p.add_argument("--majority", action="store_true", help="majority vote per sample instead of pooling")
    p.add_argument("--embeddings", help="one comma-separated vector per line")
    p.add_argument("--manifest", help="embedding manifest CSV")
    p.add_argument("--visqol", help="quality score CSV (cell,score)")

    p = sub.add_parser("report", parents=[common], help="print evaluation tables")
    p.add_argument("--eval", required=True, help="eval.json")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(stream=sys.stderr, level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s", force=True)
    args.targets_given = args.targets is not None
    if args.targets is None:
        args.targets = "50,50"
    try:
        config = PipelineConfig.from_args(args)
        HANDLERS[args.command](args, config)
    except (OOVError, OSError, ValueError, KeyError) as exc:
        payload = {"error": type(exc).__name__, "message": str(exc)}
        path = getattr(exc, "filename", None)
        if path:
            payload["path"] = str(path)
        sys.stderr.write(json.dumps(payload, ensure_ascii=False) + "\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
