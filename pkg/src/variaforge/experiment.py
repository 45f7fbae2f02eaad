"""Task x train-variant x seed grids: manifest, result collection, matrices.

The manifest is the durable contract between this toolkit and whatever
process runs the fine-tuning: it expands a small TOML config into every
training cell, each evaluated on all three test variants. Results come
back as append-only JSONL and are aggregated into 3x3 mean +/- std
matrices, one per (model, task).
"""

from __future__ import annotations

import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Union

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from variaforge.dataset_io import SPLITS, TASK_KINDS, dataset_path
from variaforge.errors import DataError, UserError
from variaforge.metrics import (
    VARIANTS,
    ScoreRecord,
    aggregate,
    format_cell,
    read_score_records,
)

# batch size, learning rate, epochs per task
DEFAULT_HYPERPARAMS: dict[str, tuple[int, float, int]] = {
    "IC": (16, 5e-5, 5),
    "WNLI": (16, 5e-5, 5),
    "CM": (16, 5e-5, 5),
    "SC": (16, 5e-5, 5),
    "NER": (16, 5e-5, 3),
    "POS": (16, 5e-5, 3),
    "TC": (16, 2e-5, 5),
}
DEFAULT_SEEDS = (1, 2, 3, 4, 5)


@dataclass(frozen=True)
class TaskSpec:
    task: str
    kind: str
    batch_size: int
    learning_rate: float
    epochs: int
    datasets: dict  # variant -> split -> path (str)

    def __post_init__(self):
        if self.batch_size < 1 or self.epochs < 1 or self.learning_rate <= 0:
            raise UserError(f"task {self.task}: hyperparameters must be positive")


@dataclass(frozen=True)
class CellSpec:
    cell_id: str
    model: str
    task: str
    train_variant: str
    seed: int


@dataclass(frozen=True)
class ExperimentManifest:
    models: tuple[str, ...]
    tasks: tuple[TaskSpec, ...]
    train_variants: tuple[str, ...]
    test_variants: tuple[str, ...]
    seeds: tuple[int, ...]
    results_path: str

    def cells(self) -> list[CellSpec]:
        """Deterministic, order-stable expansion of the training grid."""
        out = []
        for model in self.models:
            for spec in self.tasks:
                for train_variant in self.train_variants:
                    for seed in self.seeds:
                        out.append(CellSpec(
                            cell_id=cell_id(model, spec.task, train_variant, seed),
                            model=model,
                            task=spec.task,
                            train_variant=train_variant,
                            seed=seed,
                        ))
        return out

    def evaluation_count(self) -> int:
        return len(self.cells()) * len(self.test_variants)

    def task_spec(self, task: str) -> TaskSpec:
        for spec in self.tasks:
            if spec.task == task:
                return spec
        raise UserError(f"task {task!r} not in manifest")


def cell_id(model: str, task: str, train_variant: str, seed: int) -> str:
    return f"{model}__{task}__{train_variant}__s{seed}"


def default_hyperparams(task: str) -> tuple[int, float, int]:
    if task not in DEFAULT_HYPERPARAMS:
        raise UserError(f"unknown task {task!r}; expected one of {sorted(DEFAULT_HYPERPARAMS)}")
    return DEFAULT_HYPERPARAMS[task]


def _check_variants(values, what) -> tuple[str, ...]:
    values = tuple(values)
    for v in values:
        if v not in VARIANTS:
            raise UserError(f"{what}: unknown variant {v!r}; expected one of {VARIANTS}")
    if not values:
        raise UserError(f"{what}: empty")
    return values


def build_manifest(config_path: Union[str, Path]) -> ExperimentManifest:
    """Expand a TOML config into the full grid, with defaults filled in.

    Every referenced dataset file must already exist; the check runs
    before anything downstream can waste GPU time on a broken path.
    """
    config_path = Path(config_path)
    if not config_path.exists():
        raise UserError(f"config file not found: {config_path}")
    try:
        with open(config_path, "rb") as fp:
            config = tomllib.load(fp)
    except tomllib.TOMLDecodeError as exc:
        raise UserError(f"{config_path}: invalid TOML ({exc})") from None
    exp = config.get("experiment", {})
    if not isinstance(exp, dict):
        raise UserError(f"{config_path}: [experiment] must be a table")
    models = tuple(exp.get("models", ()))
    if not models:
        raise UserError(f"{config_path}: [experiment].models must list at least one model")
    seeds = tuple(int(s) for s in exp.get("seeds", DEFAULT_SEEDS))
    if not seeds:
        raise UserError(f"{config_path}: [experiment].seeds must not be empty")
    results = exp.get("results", "results.jsonl")
    data_root = exp.get("data_root")
    if not data_root:
        raise UserError(f"{config_path}: [experiment].data_root is required")
    data_root = (config_path.parent / data_root).resolve() if not Path(data_root).is_absolute() else Path(data_root)
    train_variants = _check_variants(exp.get("train_variants", VARIANTS), "train_variants")
    test_variants = _check_variants(exp.get("test_variants", VARIANTS), "test_variants")

    tasks_cfg = config.get("tasks", {})
    if not tasks_cfg:
        raise UserError(f"{config_path}: [tasks.<ID>] selects at least one task")
    specs = []
    for task in tasks_cfg:
        overrides = tasks_cfg[task] or {}
        batch, lr, epochs = default_hyperparams(task)
        batch = int(overrides.get("batch_size", batch))
        lr = float(overrides.get("learning_rate", lr))
        epochs = int(overrides.get("epochs", epochs))
        unknown = set(overrides) - {"batch_size", "learning_rate", "epochs"}
        if unknown:
            raise UserError(f"{config_path}: [tasks.{task}] unknown key(s) {sorted(unknown)}")
        datasets: dict[str, dict[str, str]] = {}
        needed_variants = sorted(set(train_variants) | set(test_variants))
        for variant in needed_variants:
            datasets[variant] = {}
            for split in SPLITS:
                path = dataset_path(data_root, task, split, variant)
                if not path.exists():
                    raise UserError(f"missing dataset variant: {path}")
                datasets[variant][split] = str(path)
        specs.append(TaskSpec(
            task=task,
            kind=TASK_KINDS[task],
            batch_size=batch,
            learning_rate=lr,
            epochs=epochs,
            datasets=datasets,
        ))
    return ExperimentManifest(
        models=models,
        tasks=tuple(specs),
        train_variants=train_variants,
        test_variants=test_variants,
        seeds=seeds,
        results_path=results,
    )


def manifest_to_dict(
    manifest: ExperimentManifest, relative_to: Optional[Union[str, Path]] = None
) -> dict:
    """Plain-dict form; relative_to rewrites dataset paths relative to a
    directory (usually the manifest's own), keeping output trees portable."""

    def path_text(p: str) -> str:
        if relative_to is None:
            return p
        return os.path.relpath(p, relative_to)

    return {
        "models": list(manifest.models),
        "seeds": list(manifest.seeds),
        "train_variants": list(manifest.train_variants),
        "test_variants": list(manifest.test_variants),
        "results": manifest.results_path,
        "tasks": [
            {
                "task": t.task,
                "kind": t.kind,
                "batch_size": t.batch_size,
                "learning_rate": t.learning_rate,
                "epochs": t.epochs,
                "datasets": {
                    variant: {split: path_text(p) for split, p in splits.items()}
                    for variant, splits in t.datasets.items()
                },
            }
            for t in manifest.tasks
        ],
        "cells": [
            {
                "cell_id": c.cell_id,
                "model": c.model,
                "task": c.task,
                "train_variant": c.train_variant,
                "seed": c.seed,
            }
            for c in manifest.cells()
        ],
    }


def save_manifest(
    manifest: ExperimentManifest,
    path: Union[str, Path],
    relative_to: Optional[Union[str, Path]] = None,
) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fp:
        json.dump(manifest_to_dict(manifest, relative_to), fp, indent=2, ensure_ascii=False)
        fp.write("\n")


def load_manifest(path: Union[str, Path]) -> ExperimentManifest:
    with open(path, encoding="utf-8") as fp:
        obj = json.load(fp)
    try:
        tasks = tuple(
            TaskSpec(
                task=t["task"],
                kind=t["kind"],
                batch_size=t["batch_size"],
                learning_rate=t["learning_rate"],
                epochs=t["epochs"],
                datasets=t["datasets"],
            )
            for t in obj["tasks"]
        )
        return ExperimentManifest(
            models=tuple(obj["models"]),
            tasks=tasks,
            train_variants=tuple(obj["train_variants"]),
            test_variants=tuple(obj["test_variants"]),
            seeds=tuple(obj["seeds"]),
            results_path=obj["results"],
        )
    except KeyError as exc:
        raise DataError(f"{path}: manifest missing key {exc}") from None


@dataclass
class CollectReport:
    records: list[ScoreRecord]
    warnings: list[str]


def collect_results(
    path: Union[str, Path], manifest: Optional[ExperimentManifest] = None
) -> CollectReport:
    """Validate a results file: schema, duplicate cells, missing seeds.

    Duplicates are hard errors. Missing cells are warnings, checked
    against the manifest when given, else against the union of seeds and
    test variants observed in the file.
    """
    records = read_score_records(path)
    seen: dict[tuple, str] = {}
    for rec in records:
        key = (rec.model, rec.task, rec.train_variant, rec.test_variant, rec.seed)
        if key in seen:
            raise DataError(
                f"{path}: duplicate result for model={rec.model or '(none)'} task={rec.task} "
                f"train={rec.train_variant} test={rec.test_variant} seed={rec.seed}"
            )
        seen[key] = rec.cell_id
    warnings = []
    if manifest is not None:
        expected = [
            (c.model, c.task, c.train_variant, tv, c.seed)
            for c in manifest.cells()
            for tv in manifest.test_variants
        ]
    else:
        groups = sorted({(r.model, r.task, r.train_variant) for r in records})
        seeds = sorted({r.seed for r in records})
        test_variants = sorted({r.test_variant for r in records})
        expected = [
            (m, t, tr, tv, s)
            for (m, t, tr) in groups
            for tv in test_variants
            for s in seeds
        ]
    for key in expected:
        if key not in seen:
            model, task, train, test, seed = key
            warnings.append(
                f"missing result: model={model or '(none)'} task={task} "
                f"train={train} test={test} seed={seed}"
            )
    return CollectReport(records=records, warnings=warnings)


@dataclass
class MatrixResult:
    model: str
    task: str
    train_variants: tuple[str, ...]
    test_variants: tuple[str, ...]
    cells: dict  # train -> test -> {"mean","std","n"}

    @property
    def text(self) -> str:
        header = f"{self.task} weighted F1 (mean ± std over seeds), model={self.model or '(none)'}"
        col_texts = {
            tr: [format_cell(self.cells[tr][tv]["mean"], self.cells[tr][tv]["std"])
                 for tv in self.test_variants]
            for tr in self.train_variants
        }
        label_width = max(len("train \\ test"), *(len(tr) for tr in self.train_variants))
        widths = [
            max(len(tv), *(len(col_texts[tr][k]) for tr in self.train_variants))
            for k, tv in enumerate(self.test_variants)
        ]
        lines = [header]
        head = "train \\ test".ljust(label_width)
        for k, tv in enumerate(self.test_variants):
            head += "  " + tv.rjust(widths[k])
        lines.append(head)
        for tr in self.train_variants:
            row = tr.ljust(label_width)
            for k in range(len(self.test_variants)):
                row += "  " + col_texts[tr][k].rjust(widths[k])
            lines.append(row)
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "task": self.task,
            "cells": self.cells,
        }


def render_matrix(
    records: Iterable[ScoreRecord],
    model: str,
    task: str,
    train_variants: tuple[str, ...] = VARIANTS,
    test_variants: tuple[str, ...] = VARIANTS,
) -> MatrixResult:
    """Aggregate one (model, task) block into its full matrix.

    Every (train, test) cell must have at least one record; rendering is
    invariant under record order.
    """
    groups: dict[tuple[str, str], list[float]] = {}
    for rec in records:
        if rec.model == model and rec.task == task:
            groups.setdefault((rec.train_variant, rec.test_variant), []).append(rec.weighted_f1)
    missing = [
        f"{tr}/{tv}"
        for tr in train_variants
        for tv in test_variants
        if not groups.get((tr, tv))
    ]
    if missing:
        raise DataError(
            f"incomplete grid for model={model or '(none)'} task={task}: "
            f"missing cell(s) {', '.join(missing)}"
        )
    cells: dict = {}
    for tr in train_variants:
        cells[tr] = {}
        for tv in test_variants:
            mean, std = aggregate(groups[(tr, tv)])
            cells[tr][tv] = {"mean": mean, "std": std, "n": len(groups[(tr, tv)])}
    return MatrixResult(
        model=model,
        task=task,
        train_variants=train_variants,
        test_variants=test_variants,
        cells=cells,
    )
