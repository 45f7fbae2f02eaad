"""Single entry point exposing every operation as a subcommand.

Exit codes: 0 success, 1 user error, 2 data error, 3 internal invariant
breach. With --json each invocation emits exactly one JSON object on
stdout; human-readable logs go to stderr only. --seed falls back to the
VARIAFORGE_SEED environment variable.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import os
import sys
from pathlib import Path

from variaforge import __version__, dataset_io, experiment, fixtures
from variaforge import language_card as cards
from variaforge import lexicon as lex
from variaforge import metrics, pipeline
from variaforge import transform as tf
from variaforge.errors import DataError, UserError, VariaforgeError

log = logging.getLogger("variaforge")


@dataclasses.dataclass
class Outcome:
    payload: dict
    text: str
    diagnostics: list[dict] = dataclasses.field(default_factory=list)
    exit_code: int = 0


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UserError(f"{message}\n{self.format_usage()}")


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None,
                        help="global seed (fallback: VARIAFORGE_SEED, then 0)")
    common.add_argument("--json", action="store_true", dest="json_mode",
                        help="emit one JSON object on stdout")
    common.add_argument("--quiet", action="store_true",
                        help="suppress informational logging")
    return common


def _resolve_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("VARIAFORGE_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise UserError(f"VARIAFORGE_SEED must be an integer, got {env!r}") from None
    return 0


def _plan_from_args(args, mode: str) -> tf.TransformPlan:
    return tf.TransformPlan(
        mode=mode,
        global_seed=_resolve_seed(args),
        casing_policy=args.casing,
        max_edit_distance=args.max_edit_distance,
        dataset_id=args.dataset_id if args.dataset_id is not None else Path(args.input).name)


# ---------------------------------------------------------------- handlers


def cmd_lexicon_build(args) -> Outcome:
    lexicon = lex.build_lexicon_from_file(args.log)
    lex.save_lexicon(lexicon, args.out)
    payload = {
        "entries": len(lexicon),
        "total_corrections": lexicon.total_corrections,
        "out": str(args.out),
    }
    text = f"built lexicon with {len(lexicon)} entries from {lexicon.total_corrections} corrections -> {args.out}"
    return Outcome(payload, text)


def cmd_lexicon_lookup(args) -> Outcome:
    lexicon = lex.load_lexicon(args.lexicon)
    if args.inverse:
        hits = lexicon.inverse_lookup(args.word)
        payload = {"surface": args.word, "standard_forms": [
            {"standard_form": s, "count": c} for s, c in hits]}
        text = "\n".join(f"{s}\t{c}" for s, c in hits) if hits else "(no match)"
    else:
        entry = lexicon.lookup(args.word)
        if entry is None:
            payload = {"standard_form": args.word, "entry": None}
            text = "(no entry)"
        else:
            payload = {"standard_form": args.word, "entry": [
                {"surface": s, "count": c} for s, c in entry.variants]}
            text = "\n".join(f"{s}\t{c}" for s, c in entry.variants)
    return Outcome(payload, text)


def cmd_transform(args) -> Outcome:
    lexicon = lex.load_lexicon(args.lexicon)
    plan = _plan_from_args(args, args.mode)
    in_path, out_path = Path(args.input), Path(args.output)
    if not in_path.exists():
        raise UserError(f"input file not found: {in_path}")
    lines = in_path.read_text(encoding="utf-8").splitlines()
    transformed = [
        tf.transform_line(line, lexicon, plan, index) for index, line in enumerate(lines)
    ]
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text("".join(t + "\n" for t in transformed), encoding="utf-8")
    payload = {"lines": len(lines), "mode": args.mode, "out": str(out_path)}
    return Outcome(payload, f"{args.mode}d {len(lines)} lines -> {out_path}")


def _error_rate_outcome(args, which: str) -> Outcome:
    report = metrics.corpus_error_rates(
        args.ref, args.hyp, nfc=args.nfc, macro=args.macro, drop_punct=args.drop_punct
    )
    payload = report.to_dict()
    value = payload[which]
    return Outcome(payload, f"{which} {value:.2f}")


def cmd_metrics_wer(args) -> Outcome:
    return _error_rate_outcome(args, "wer")


def cmd_metrics_cer(args) -> Outcome:
    return _error_rate_outcome(args, "cer")


def _read_labels(path) -> list[str]:
    p = Path(path)
    if not p.exists():
        raise UserError(f"label file not found: {p}")
    return [line for line in p.read_text(encoding="utf-8").splitlines() if line]


def cmd_metrics_f1(args) -> Outcome:
    gold = _read_labels(args.gold)
    pred = _read_labels(args.pred)
    score = metrics.weighted_f1(gold, pred)
    return Outcome({"weighted_f1": score, "n": len(gold)}, f"weighted_f1 {score:.2f}")


def cmd_metrics_aggregate(args) -> Outcome:
    records = metrics.read_score_records(args.input)
    if not records:
        raise DataError(f"{args.input}: no score records")
    grouped = metrics.aggregate_records(records)
    nested: dict = {}
    for (model, task, train, test), (mean, std, n) in sorted(grouped.items()):
        nested.setdefault(model, {}).setdefault(task, {}).setdefault(train, {})[test] = {
            "mean": mean, "std": std, "n": n,
        }
    out_path = Path(args.out)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    with open(out_path, "w", encoding="utf-8", newline="") as fp:
        json.dump(nested, fp, indent=2, ensure_ascii=False)
        fp.write("\n")
    lines = [
        f"{model or '(none)'} {task} {train}->{test}: {metrics.format_cell(v['mean'], v['std'])} (n={v['n']})"
        for model, tasks in nested.items()
        for task, trains in tasks.items()
        for train, tests in trains.items()
        for test, v in tests.items()
    ]
    return Outcome({"cells": nested, "out": str(out_path)}, "\n".join(lines))


def cmd_dataset_read_check(args) -> Outcome:
    ds = dataset_io.read_dataset(args.path, args.task, args.split, args.variant)
    payload = {"task": ds.task, "split": ds.split, "variant": ds.variant, "records": len(ds)}
    return Outcome(payload, f"{args.path}: {len(ds)} valid {ds.task} records")


def cmd_dataset_transform(args) -> Outcome:
    source_variant = "std" if args.mode == "destandardise" else "n-std"
    ds = dataset_io.read_dataset(args.input, args.task, args.split, source_variant)
    lexicon = lex.load_lexicon(args.lexicon)
    plan = _plan_from_args(args, args.mode)
    out = dataset_io.transform_dataset(ds, lexicon, plan, force=args.force)
    dataset_io.write_dataset(out, args.output)
    payload = {"records": len(out), "variant": out.variant, "out": str(args.output)}
    return Outcome(payload, f"{args.mode}d {len(out)} records -> {args.output}")


def cmd_dataset_combine(args) -> Outcome:
    std = dataset_io.read_dataset(args.std, args.task, args.split, "std")
    nstd = dataset_io.read_dataset(args.nstd, args.task, args.split, "n-std")
    comb = dataset_io.combine(std, nstd)
    dataset_io.write_dataset(comb, args.out)
    payload = {"records": len(comb), "out": str(args.out)}
    return Outcome(payload, f"combined {len(std)}+{len(nstd)} -> {len(comb)} records at {args.out}")


def cmd_dataset_stats(args) -> Outcome:
    counts = dataset_io.dataset_stats(args.root, args.task, args.variant)
    payload = {"task": args.task, "variant": args.variant, "splits": counts}
    text = (
        f"{args.task} ({args.variant}): "
        f"train {counts['train']} / dev {counts['dev']} / test {counts['test']}"
    )
    return Outcome(payload, text)


def cmd_experiment_build_manifest(args) -> Outcome:
    manifest = experiment.build_manifest(args.config)
    out = Path(args.out)
    experiment.save_manifest(manifest, out, relative_to=out.parent)
    cells = manifest.cells()
    payload = {
        "out": str(out),
        "models": list(manifest.models),
        "tasks": [t.task for t in manifest.tasks],
        "cells": len(cells),
        "evaluations": manifest.evaluation_count(),
    }
    text = (
        f"manifest {out}: {len(manifest.models)} model(s) x {len(manifest.tasks)} task(s) "
        f"x {len(manifest.train_variants)} train variant(s) x {len(manifest.seeds)} seed(s) "
        f"= {len(cells)} cells, {manifest.evaluation_count()} evaluations"
    )
    return Outcome(payload, text)


def cmd_experiment_collect(args) -> Outcome:
    manifest = experiment.load_manifest(args.manifest) if args.manifest else None
    report = experiment.collect_results(args.results, manifest)
    diagnostics = [
        {"severity": "warning", "location": str(args.results), "text": w}
        for w in report.warnings
    ]
    payload = {"records": len(report.records), "warnings": report.warnings}
    text = f"{len(report.records)} valid records, {len(report.warnings)} warning(s)"
    return Outcome(payload, text, diagnostics=diagnostics)


def cmd_experiment_render(args) -> Outcome:
    records = metrics.read_score_records(args.results)
    matrix = experiment.render_matrix(records, args.model, args.task)
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(matrix.text, encoding="utf-8")
    payload = matrix.to_dict()
    if args.out:
        payload["out"] = str(args.out)
    return Outcome(payload, matrix.text.rstrip("\n"))


def cmd_card_new(args) -> Outcome:
    template = cards.new_card_template(args.name)
    if args.out:
        Path(args.out).write_text(template, encoding="utf-8")
        return Outcome({"out": str(args.out)}, f"card template -> {args.out}")
    return Outcome({"template": template}, template.rstrip("\n"))


def cmd_card_validate(args) -> Outcome:
    path = Path(args.file)
    if not path.exists():
        raise UserError(f"card file not found: {path}")
    violations = cards.validate_card(path.read_text(encoding="utf-8"))
    payload = {
        "valid": not violations,
        "violations": [
            {"key": v.key, "rule": v.rule, "message": v.message} for v in violations
        ],
    }
    diagnostics = [
        {"severity": "error", "location": f"{path}:{v.key}", "text": f"[{v.rule}] {v.message}"}
        for v in violations
    ]
    text = "card is valid" if not violations else "\n".join(str(v) for v in violations)
    return Outcome(payload, text, diagnostics=diagnostics, exit_code=0 if not violations else 2)


def cmd_card_render(args) -> Outcome:
    path = Path(args.file)
    if not path.exists():
        raise UserError(f"card file not found: {path}")
    rendered = cards.render_card(path.read_text(encoding="utf-8"))
    if args.out:
        Path(args.out).write_text(rendered, encoding="utf-8")
        return Outcome({"out": str(args.out)}, f"rendered card -> {args.out}")
    return Outcome({"rendered": rendered}, rendered.rstrip("\n"))


def cmd_pipeline_run(args) -> Outcome:
    seed_override = args.seed if args.seed is not None else None
    if seed_override is None and os.environ.get("VARIAFORGE_SEED") is not None:
        seed_override = _resolve_seed(args)
    summary = pipeline.pipeline_run(args.config, seed_override)
    lines = [f"wrote {summary['datasets_written']} dataset files for {', '.join(summary['tasks'])}"]
    for row in summary["report"]:
        lines.append(
            f"  {row['direction']} {row['task']}: WER {row['wer']:.2f}% CER {row['cer']:.2f}%"
        )
    if "manifest" in summary:
        lines.append(f"manifest: {summary['manifest']}")
    lines.append(f"report: {summary['report_text']}")
    return Outcome(summary, "\n".join(lines))


def cmd_fixtures_make(args) -> Outcome:
    counts = fixtures.REFERENCE_COUNTS if args.scale == "reference" else fixtures.TOY_COUNTS
    written = fixtures.write_fixture_tree(args.out, counts, seed=args.fixture_seed)
    payload = {"files": len(written), "out": str(args.out), "scale": args.scale}
    return Outcome(payload, f"wrote {len(written)} fixture files under {args.out}")


def cmd_fixtures_pipeline(args) -> Outcome:
    config = fixtures.write_pipeline_fixture(args.out, seed=args.fixture_seed)
    payload = {"config": str(config), "out": str(args.out)}
    return Outcome(payload, f"pipeline fixture ready; config at {config}")


# ---------------------------------------------------------------- parser


def build_parser() -> _Parser:
    common = _common_flags()
    parser = _Parser(prog="variaforge", description=__doc__, parents=[common])
    parser.add_argument("--version", action="version", version=f"variaforge {__version__}")
    top = parser.add_subparsers(dest="command", required=True)

    p = top.add_parser("lexicon", help="build and query variant lexicons")
    sub = p.add_subparsers(dest="subcommand", required=True)
    q = sub.add_parser("build", parents=[common])
    q.add_argument("--log", required=True, help="correction log TSV (observed<TAB>corrected)")
    q.add_argument("--out", required=True)
    q.set_defaults(handler=cmd_lexicon_build)
    q = sub.add_parser("lookup", parents=[common])
    q.add_argument("word")
    q.add_argument("--lexicon", required=True)
    q.add_argument("--inverse", action="store_true", help="surface -> standard forms")
    q.set_defaults(handler=cmd_lexicon_lookup)

    p = top.add_parser("transform", parents=[common],
                       help="destandardise or normalise a text file line by line")
    p.add_argument("--mode", required=True, choices=tf.MODES)
    p.add_argument("--lexicon", required=True)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", dest="output", required=True)
    p.add_argument("--max-edit-distance", type=int, default=tf.DEFAULT_MAX_EDIT_DISTANCE)
    p.add_argument("--casing", choices=tf.CASING_POLICIES, default="preserve-initial")
    p.add_argument("--dataset-id", default=None,
                   help="sampling namespace (default: input file name)")
    p.set_defaults(handler=cmd_transform)

    p = top.add_parser("metrics", help="divergence and classification metrics")
    sub = p.add_subparsers(dest="subcommand", required=True)
    for which, handler in (("wer", cmd_metrics_wer), ("cer", cmd_metrics_cer)):
        q = sub.add_parser(which, parents=[common])
        q.add_argument("--ref", required=True)
        q.add_argument("--hyp", required=True)
        q.add_argument("--nfc", action="store_true", help="apply NFC before comparison")
        q.add_argument("--macro", action="store_true", help="average per-line rates")
        q.add_argument("--drop-punct", action="store_true",
                       help="ignore punctuation-only tokens")
        q.set_defaults(handler=handler)
    q = sub.add_parser("f1", parents=[common])
    q.add_argument("--gold", required=True, help="one label per line")
    q.add_argument("--pred", required=True)
    q.set_defaults(handler=cmd_metrics_f1)
    q = sub.add_parser("aggregate", parents=[common])
    q.add_argument("--in", dest="input", required=True, help="results JSONL")
    q.add_argument("--out", required=True, help="aggregated matrix JSON")
    q.set_defaults(handler=cmd_metrics_aggregate)

    p = top.add_parser("dataset", help="read, transform, and combine task datasets")
    sub = p.add_subparsers(dest="subcommand", required=True)
    q = sub.add_parser("read-check", parents=[common])
    q.add_argument("--path", required=True)
    q.add_argument("--task", required=True, choices=sorted(dataset_io.TASK_KINDS))
    q.add_argument("--split", required=True, choices=dataset_io.SPLITS)
    q.add_argument("--variant", default="std", choices=metrics.VARIANTS)
    q.set_defaults(handler=cmd_dataset_read_check)
    q = sub.add_parser("transform", parents=[common])
    q.add_argument("--in", dest="input", required=True)
    q.add_argument("--out", dest="output", required=True)
    q.add_argument("--task", required=True, choices=sorted(dataset_io.TASK_KINDS))
    q.add_argument("--split", required=True, choices=dataset_io.SPLITS)
    q.add_argument("--mode", required=True, choices=tf.MODES)
    q.add_argument("--lexicon", required=True)
    q.add_argument("--force", action="store_true",
                   help="allow a mode that goes against the task's native direction")
    q.add_argument("--max-edit-distance", type=int, default=tf.DEFAULT_MAX_EDIT_DISTANCE)
    q.add_argument("--casing", choices=tf.CASING_POLICIES, default="preserve-initial")
    q.add_argument("--dataset-id", default=None)
    q.set_defaults(handler=cmd_dataset_transform)
    q = sub.add_parser("combine", parents=[common])
    q.add_argument("--std", required=True)
    q.add_argument("--nstd", required=True)
    q.add_argument("--out", required=True)
    q.add_argument("--task", required=True, choices=sorted(dataset_io.TASK_KINDS))
    q.add_argument("--split", required=True, choices=dataset_io.SPLITS)
    q.set_defaults(handler=cmd_dataset_combine)
    q = sub.add_parser("stats", parents=[common])
    q.add_argument("--root", required=True)
    q.add_argument("--task", required=True, choices=sorted(dataset_io.TASK_KINDS))
    q.add_argument("--variant", default="std", choices=metrics.VARIANTS)
    q.set_defaults(handler=cmd_dataset_stats)

    p = top.add_parser("experiment", help="manifests, result collection, matrices")
    sub = p.add_subparsers(dest="subcommand", required=True)
    q = sub.add_parser("build-manifest", parents=[common])
    q.add_argument("--config", required=True, help="experiment TOML config")
    q.add_argument("--out", required=True, help="expanded manifest JSON")
    q.set_defaults(handler=cmd_experiment_build_manifest)
    q = sub.add_parser("collect", parents=[common])
    q.add_argument("--results", required=True)
    q.add_argument("--manifest", default=None,
                   help="manifest JSON for completeness checking")
    q.set_defaults(handler=cmd_experiment_collect)
    q = sub.add_parser("render", parents=[common])
    q.add_argument("--results", required=True)
    q.add_argument("--task", required=True)
    q.add_argument("--model", default="")
    q.add_argument("--out", default=None, help="write the text matrix here")
    q.set_defaults(handler=cmd_experiment_render)

    p = top.add_parser("card", help="sociolinguistic language cards")
    sub = p.add_subparsers(dest="subcommand", required=True)
    q = sub.add_parser("new", parents=[common])
    q.add_argument("name")
    q.add_argument("--out", default=None)
    q.set_defaults(handler=cmd_card_new)
    q = sub.add_parser("validate", parents=[common])
    q.add_argument("file")
    q.set_defaults(handler=cmd_card_validate)
    q = sub.add_parser("render", parents=[common])
    q.add_argument("file")
    q.add_argument("--out", default=None)
    q.set_defaults(handler=cmd_card_render)

    p = top.add_parser("pipeline", help="end-to-end variant production")
    sub = p.add_subparsers(dest="subcommand", required=True)
    q = sub.add_parser("run", parents=[common])
    q.add_argument("--config", required=True)
    q.set_defaults(handler=cmd_pipeline_run)

    p = top.add_parser("fixtures", help="generate synthetic fixture data")
    sub = p.add_subparsers(dest="subcommand", required=True)
    q = sub.add_parser("make", parents=[common])
    q.add_argument("--out", required=True)
    q.add_argument("--scale", choices=("reference", "toy"), default="toy")
    q.add_argument("--fixture-seed", type=int, default=fixtures.DEFAULT_SEED)
    q.set_defaults(handler=cmd_fixtures_make)
    q = sub.add_parser("pipeline", parents=[common])
    q.add_argument("--out", required=True)
    q.add_argument("--fixture-seed", type=int, default=fixtures.DEFAULT_SEED)
    q.set_defaults(handler=cmd_fixtures_pipeline)

    return parser


def _emit(outcome: Outcome, json_mode: bool) -> None:
    if json_mode:
        obj = {
            "ok": outcome.exit_code == 0,
            "data": outcome.payload,
            "diagnostics": outcome.diagnostics,
        }
        print(json.dumps(obj, ensure_ascii=False))
    else:
        if outcome.text:
            print(outcome.text)
        for diag in outcome.diagnostics:
            print(f"{diag['severity']}: {diag['text']}", file=sys.stderr)


def main(argv=None) -> int:
    args = None
    json_mode = False
    try:
        parser = build_parser()
        args = parser.parse_args(argv)
        json_mode = getattr(args, "json_mode", False)
        logging.basicConfig(
            stream=sys.stderr,
            level=logging.ERROR if getattr(args, "quiet", False) else logging.INFO,
            format="%(levelname)s %(message)s")
        outcome = args.handler(args)
        _emit(outcome, json_mode)
        return outcome.exit_code
    except (VariaforgeError, OSError) as exc:
        exit_code = exc.exit_code if isinstance(exc, VariaforgeError) else UserError.exit_code
        diag = {"severity": "error", "location": "", "text": str(exc)}
        if json_mode:
            print(json.dumps({"ok": False, "data": None, "diagnostics": [diag]},
                             ensure_ascii=False))
        print(f"error: {exc}", file=sys.stderr)
        return exit_code


if __name__ == "__main__":
    sys.exit(main())
