"""End-to-end run: all variants of all splits, a manifest, and a report.

Validation happens up front; nothing is written until every referenced
input exists, because pipeline outputs feed long training jobs. Given the
same config, lexicon, and inputs, two runs produce byte-identical trees:
all randomness is counter-based and all emitted paths are relative.
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from variaforge import dataset_io
from variaforge.dataset_io import (
    DESTANDARDISE_TASKS,
    SPLITS,
    TASK_KINDS,
    dataset_path,
)
from variaforge.errors import UserError
from variaforge.experiment import (
    ExperimentManifest,
    TaskSpec,
    default_hyperparams,
    save_manifest,
)
from variaforge.lexicon import load_lexicon
from variaforge.metrics import VARIANTS, ErrorRateReport, corpus_rates_from_pairs
from variaforge.transform import CASING_POLICIES, DEFAULT_MAX_EDIT_DISTANCE, TransformPlan


@dataclass
class PipelineConfig:
    lexicon_path: Path
    data_root: Path
    out_root: Path
    seed: int
    tasks: tuple[str, ...]
    max_edit_distance: int
    casing_policy: str
    manifest: Optional[dict]  # models, seeds, results, tasks overrides


def load_pipeline_config(path: Union[str, Path]) -> PipelineConfig:
    path = Path(path)
    if not path.exists():
        raise UserError(f"config file not found: {path}")
    try:
        with open(path, "rb") as fp:
            config = tomllib.load(fp)
    except tomllib.TOMLDecodeError as exc:
        raise UserError(f"{path}: invalid TOML ({exc})") from None
    pipe = config.get("pipeline")
    if not isinstance(pipe, dict):
        raise UserError(f"{path}: missing [pipeline] table")
    base = path.parent

    def resolve(key, default=None):
        value = pipe.get(key, default)
        if value is None:
            raise UserError(f"{path}: [pipeline].{key} is required")
        p = Path(value)
        return p if p.is_absolute() else base / p

    tasks = tuple(pipe.get("tasks", ()))
    if not tasks:
        raise UserError(f"{path}: [pipeline].tasks must list at least one task")
    for task in tasks:
        if task not in TASK_KINDS:
            raise UserError(f"{path}: unknown task {task!r}")
    casing = pipe.get("casing", "preserve-initial")
    if casing not in CASING_POLICIES:
        raise UserError(f"{path}: unknown casing policy {casing!r}")
    return PipelineConfig(
        lexicon_path=resolve("lexicon"),
        data_root=resolve("data_root"),
        out_root=resolve("out_root"),
        seed=int(pipe.get("seed", 0)),
        tasks=tasks,
        max_edit_distance=int(pipe.get("max_edit_distance", DEFAULT_MAX_EDIT_DISTANCE)),
        casing_policy=casing,
        manifest=config.get("manifest"),
    )


def native_variant(task: str) -> str:
    return "std" if task in DESTANDARDISE_TASKS else "n-std"


def _record_lines(rec) -> list[str]:
    if rec.kind == "sequence":
        return rec.text.split("\n")
    if rec.kind == "pair":
        return [rec.text_a, rec.text_b]
    return [" ".join(rec.tokens)]


def _dataset_lines(ds) -> list[str]:
    lines = []
    for rec in ds.records:
        lines.extend(_record_lines(rec))
    return lines


def _report_text(rows: list[dict]) -> str:
    lines = ["direction        task   WER%    CER%"]
    for row in rows:
        lines.append(
            f"{row['direction']:<15}  {row['task']:<5}  {row['wer']:>5.2f}  {row['cer']:>5.2f}"
        )
    return "\n".join(lines) + "\n"


def pipeline_run(
    config_path: Union[str, Path], seed_override: Optional[int] = None
) -> dict:
    """Produce every variant of every split plus manifest and report.

    Returns a summary dict: written files, divergence rows, and paths of
    the manifest and report.
    """
    cfg = load_pipeline_config(config_path)
    if seed_override is not None:
        cfg.seed = seed_override

    # fail-fast validation pass: nothing is written when this raises
    if not cfg.lexicon_path.exists():
        raise UserError(f"lexicon file not found: {cfg.lexicon_path}")
    for task in cfg.tasks:
        for split in SPLITS:
            raw = dataset_path(cfg.data_root, task, split, native_variant(task))
            if not raw.exists():
                raise UserError(f"missing input dataset: {raw}")
    if cfg.manifest is not None:
        for key in ("models", "seeds", "results"):
            if key not in cfg.manifest:
                raise UserError(f"[manifest].{key} is required when [manifest] is present")

    lexicon = load_lexicon(cfg.lexicon_path)
    written: list[Path] = []
    report_rows: list[dict] = []
    task_specs: list[TaskSpec] = []

    for task in cfg.tasks:
        source_variant = native_variant(task)
        derived_variant = "n-std" if source_variant == "std" else "std"
        mode = "destandardise" if source_variant == "std" else "normalise"
        direction = "destandardised" if mode == "destandardise" else "normalised"
        pairs: list[tuple[str, str]] = []
        produced: dict[str, dict[str, str]] = {v: {} for v in VARIANTS}
        for split in SPLITS:
            raw_path = dataset_path(cfg.data_root, task, split, source_variant)
            native = dataset_io.read_dataset(raw_path, task, split, source_variant)
            plan = TransformPlan(
                mode=mode,
                global_seed=cfg.seed,
                casing_policy=cfg.casing_policy,
                max_edit_distance=cfg.max_edit_distance,
                dataset_id=f"{task}/{split}",
            )
            derived = dataset_io.transform_dataset(native, lexicon, plan)
            std_ds, nstd_ds = (
                (native, derived) if source_variant == "std" else (derived, native)
            )
            comb = dataset_io.combine(std_ds, nstd_ds)
            for variant, ds in (("std", std_ds), ("n-std", nstd_ds), ("comb", comb)):
                out_path = dataset_path(cfg.out_root, task, split, variant)
                dataset_io.write_dataset(ds, out_path)
                written.append(out_path)
                produced[variant][split] = str(out_path)
            pairs.extend(zip(_dataset_lines(native), _dataset_lines(derived)))
        rates: ErrorRateReport = corpus_rates_from_pairs(pairs)
        report_rows.append({
            "direction": direction,
            "task": task,
            "wer": rates.wer,
            "cer": rates.cer,
            "substitutions": rates.substitutions,
            "insertions": rates.insertions,
            "deletions": rates.deletions,
            "ref_token_count": rates.ref_token_count,
            "ref_char_count": rates.ref_char_count,
        })
        batch, lr, epochs = default_hyperparams(task)
        overrides = (cfg.manifest or {}).get("tasks", {}).get(task, {})
        task_specs.append(TaskSpec(
            task=task,
            kind=TASK_KINDS[task],
            batch_size=int(overrides.get("batch_size", batch)),
            learning_rate=float(overrides.get("learning_rate", lr)),
            epochs=int(overrides.get("epochs", epochs)),
            datasets=produced,
        ))

    summary: dict = {
        "tasks": list(cfg.tasks),
        "datasets_written": len(written),
        "report": report_rows,
    }

    manifest_path = None
    if cfg.manifest is not None:
        manifest = ExperimentManifest(
            models=tuple(cfg.manifest["models"]),
            tasks=tuple(task_specs),
            train_variants=VARIANTS,
            test_variants=VARIANTS,
            seeds=tuple(int(s) for s in cfg.manifest["seeds"]),
            results_path=str(cfg.manifest["results"]),
        )
        manifest_path = cfg.out_root / "manifest.json"
        save_manifest(manifest, manifest_path, relative_to=cfg.out_root)
        summary["manifest"] = str(manifest_path)

    report_json = cfg.out_root / "divergence_report.json"
    report_text = cfg.out_root / "divergence_report.txt"
    report_json.parent.mkdir(parents=True, exist_ok=True)
    with open(report_json, "w", encoding="utf-8", newline="") as fp:
        json.dump({"rows": report_rows}, fp, indent=2, ensure_ascii=False)
        fp.write("\n")
    report_text.write_text(_report_text(report_rows), encoding="utf-8")
    summary["report_json"] = str(report_json)
    summary["report_text"] = str(report_text)
    summary["files"] = [str(p) for p in written]
    return summary
