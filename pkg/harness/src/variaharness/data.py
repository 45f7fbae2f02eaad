"""Readers for the toolkit's manifest and dataset file formats.

The file formats are the contract between the two packages: JSONL for
sequence and pair tasks ({"id","text","label"} / {"id","text_a","text_b",
"label"}), two-column CoNLL for token tasks, and the expanded manifest
JSON with dataset paths relative to the manifest's own directory.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Union


@dataclass(frozen=True)
class Example:
    """One training/evaluation item in a shape the model code consumes."""

    text: str  # pair texts are joined with the separator sentinel
    tokens: tuple[str, ...] | None
    labels: tuple[str, ...] | None  # token tasks
    label: str | None  # sequence/pair tasks


PAIR_SEPARATOR = "␟"  # symbol for unit separator; never a real token


@dataclass(frozen=True)
class CellJob:
    cell_id: str
    model: str
    task: str
    kind: str
    train_variant: str
    seed: int
    batch_size: int
    learning_rate: float
    epochs: int
    datasets: dict  # variant -> split -> absolute path


@dataclass(frozen=True)
class Manifest:
    models: tuple[str, ...]
    seeds: tuple[int, ...]
    train_variants: tuple[str, ...]
    test_variants: tuple[str, ...]
    results_path: Path
    jobs: tuple[CellJob, ...]


def load_manifest(path: Union[str, Path]) -> Manifest:
    path = Path(path)
    base = path.parent
    with open(path, encoding="utf-8") as fp:
        obj = json.load(fp)

    def absolute(p: str) -> str:
        q = Path(p)
        return str(q if q.is_absolute() else (base / q).resolve())

    task_table = {}
    for spec in obj["tasks"]:
        task_table[spec["task"]] = {
            "kind": spec["kind"],
            "batch_size": spec["batch_size"],
            "learning_rate": spec["learning_rate"],
            "epochs": spec["epochs"],
            "datasets": {
                variant: {split: absolute(p) for split, p in splits.items()}
                for variant, splits in spec["datasets"].items()
            },
        }
    jobs = []
    for cell in obj["cells"]:
        spec = task_table[cell["task"]]
        jobs.append(CellJob(
            cell_id=cell["cell_id"],
            model=cell["model"],
            task=cell["task"],
            kind=spec["kind"],
            train_variant=cell["train_variant"],
            seed=cell["seed"],
            batch_size=spec["batch_size"],
            learning_rate=spec["learning_rate"],
            epochs=spec["epochs"],
            datasets=spec["datasets"],
        ))
    results = Path(obj["results"])
    if not results.is_absolute():
        results = (base / results).resolve()
    return Manifest(
        models=tuple(obj["models"]),
        seeds=tuple(obj["seeds"]),
        train_variants=tuple(obj["train_variants"]),
        test_variants=tuple(obj["test_variants"]),
        results_path=results,
        jobs=tuple(jobs),
    )


def read_examples(path: Union[str, Path], kind: str) -> list[Example]:
    path = Path(path)
    if kind == "token":
        return _read_conll(path)
    return _read_jsonl(path, kind)


def _read_jsonl(path: Path, kind: str) -> list[Example]:
    out = []
    with open(path, encoding="utf-8") as fp:
        for lineno, line in enumerate(fp, start=1):
            if not line.strip():
                continue
            obj = json.loads(line)
            if kind == "pair":
                text = f"{obj['text_a']} {PAIR_SEPARATOR} {obj['text_b']}"
            else:
                text = obj["text"]
            out.append(Example(text=text, tokens=None, labels=None, label=str(obj["label"])))
    if not out:
        raise ValueError(f"{path}: empty dataset")
    return out


def _read_conll(path: Path) -> list[Example]:
    out = []
    tokens: list[str] = []
    labels: list[str] = []
    with open(path, encoding="utf-8") as fp:
        for line in fp:
            line = line.rstrip("\n")
            if not line.strip():
                if tokens:
                    out.append(Example(
                        text=" ".join(tokens),
                        tokens=tuple(tokens), labels=tuple(labels), label=None,
                    ))
                    tokens, labels = [], []
                continue
            token, tag = line.split("\t")
            tokens.append(token)
            labels.append(tag)
    if tokens:
        out.append(Example(text=" ".join(tokens), tokens=tuple(tokens),
                           labels=tuple(labels), label=None))
    if not out:
        raise ValueError(f"{path}: empty dataset")
    return out
