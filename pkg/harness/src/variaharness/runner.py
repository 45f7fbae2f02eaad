"""Cell execution: train one encoder per manifest cell, score, append.

One cell = (model, task, train variant, seed). The seed is set before any
weight initialisation or shuffling; the dev split of the matching variant
is monitored (loss only), epochs are fixed by the manifest. Results are
appended under an exclusive file lock, three rows per cell at once, so a
restart can skip completed cells and a failed cell leaves no partial rows.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import torch
from filelock import FileLock
from torch import nn

from variaharness import __version__, model as modelling
from variaharness.data import PAIR_SEPARATOR, CellJob, Manifest, load_manifest, read_examples
from variaharness.model import MAX_LEN, PAD_ID, SequenceClassifier, TokenClassifier
from variaharness.scoring import score_weighted_f1

log = logging.getLogger("variaharness")

IGNORE_INDEX = -100


class CellFailure(RuntimeError):
    pass


@dataclass
class LabelSpace:
    labels: tuple[str, ...]

    @classmethod
    def from_examples(cls, examples, kind: str) -> "LabelSpace":
        if kind == "token":
            seen = {l for ex in examples for l in ex.labels}
        else:
            seen = {ex.label for ex in examples}
        return cls(labels=tuple(sorted(seen)))

    def id_of(self, label: str) -> int:
        return self.labels.index(label)


def _encode_example(ex, kind: str) -> list[int]:
    if kind == "token":
        return modelling.encode_tokens(ex.tokens)
    return modelling.encode_text(ex.text, PAIR_SEPARATOR)


def _pad(batch_ids: list[list[int]]) -> torch.Tensor:
    width = max(len(ids) for ids in batch_ids)
    return torch.tensor(
        [ids + [PAD_ID] * (width - len(ids)) for ids in batch_ids], dtype=torch.long
    )


def _targets(batch, label_space: LabelSpace, kind: str, width: int) -> torch.Tensor:
    if kind != "token":
        return torch.tensor([label_space.id_of(ex.label) for ex in batch], dtype=torch.long)
    rows = []
    for ex in batch:
        ids = [label_space.id_of(l) for l in ex.labels[:MAX_LEN]]
        rows.append(ids + [IGNORE_INDEX] * (width - len(ids)))
    return torch.tensor(rows, dtype=torch.long)


def _loss_on(model, batch, label_space, kind, criterion) -> torch.Tensor:
    ids = _pad([_encode_example(ex, kind) for ex in batch])
    logits = model(ids)
    targets = _targets(batch, label_space, kind, ids.size(1))
    if kind == "token":
        return criterion(logits.reshape(-1, logits.size(-1)), targets.reshape(-1))
    return criterion(logits, targets)


def train_cell_model(job: CellJob, train_examples, dev_examples):
    torch.manual_seed(job.seed)
    label_space = LabelSpace.from_examples(train_examples, job.kind)
    if job.kind == "token":
        model = TokenClassifier(len(label_space.labels))
    else:
        model = SequenceClassifier(len(label_space.labels))
    criterion = nn.CrossEntropyLoss(ignore_index=IGNORE_INDEX)
    optimiser = torch.optim.Adam(model.parameters(), lr=job.learning_rate)
    shuffler = torch.Generator().manual_seed(job.seed)
    model.train()
    for epoch in range(job.epochs):
        order = torch.randperm(len(train_examples), generator=shuffler).tolist()
        epoch_loss = 0.0
        for start in range(0, len(order), job.batch_size):
            batch = [train_examples[i] for i in order[start:start + job.batch_size]]
            optimiser.zero_grad()
            loss = _loss_on(model, batch, label_space, job.kind, criterion)
            if not math.isfinite(loss.item()):
                raise CellFailure(f"{job.cell_id}: loss diverged at epoch {epoch}")
            loss.backward()
            optimiser.step()
            epoch_loss += loss.item()
        with torch.no_grad():
            model.eval()
            dev_loss = _loss_on(model, dev_examples, label_space, job.kind, criterion).item()
            model.train()
        log.info("%s epoch %d: train loss %.4f, dev loss %.4f",
                 job.cell_id, epoch + 1, epoch_loss, dev_loss)
    model.eval()
    return model, label_space


def predict_labels(model, label_space: LabelSpace, examples, kind: str,
                   batch_size: int) -> tuple[list[str], list[str]]:
    gold: list[str] = []
    pred: list[str] = []
    with torch.no_grad():
        for start in range(0, len(examples), batch_size):
            batch = examples[start:start + batch_size]
            ids = _pad([_encode_example(ex, kind) for ex in batch])
            logits = model(ids)
            if kind == "token":
                choices = logits.argmax(dim=-1)
                for row, ex in enumerate(batch):
                    n = min(len(ex.tokens), MAX_LEN)
                    gold.extend(ex.labels[:n])
                    pred.extend(label_space.labels[choices[row, k]] for k in range(n))
            else:
                choices = logits.argmax(dim=-1)
                gold.extend(ex.label for ex in batch)
                pred.extend(label_space.labels[c] for c in choices.tolist())
    return gold, pred


def run_cell(job: CellJob, test_variants) -> list[dict]:
    """Train once, evaluate on every test variant; no partial results."""
    train_examples = read_examples(job.datasets[job.train_variant]["train"], job.kind)
    dev_examples = read_examples(job.datasets[job.train_variant]["dev"], job.kind)
    model, label_space = train_cell_model(job, train_examples, dev_examples)
    rows = []
    for variant in test_variants:
        test_examples = read_examples(job.datasets[variant]["test"], job.kind)
        gold, pred = predict_labels(model, label_space, test_examples, job.kind,
                                    job.batch_size)
        f1 = score_weighted_f1(gold, pred)
        rows.append({
            "task": job.task,
            "train_variant": job.train_variant,
            "test_variant": variant,
            "seed": job.seed,
            "weighted_f1": f1,
            "model": job.model,
            "cell_id": job.cell_id,
        })
    return rows


def append_rows(results_path: Path, rows: list[dict]) -> None:
    results_path.parent.mkdir(parents=True, exist_ok=True)
    lock = FileLock(str(results_path) + ".lock")
    with lock:
        with open(results_path, "a", encoding="utf-8") as fp:
            for row in rows:
                fp.write(json.dumps(row, ensure_ascii=False) + "\n")


def completed_cells(results_path: Path, expected_rows: int) -> set[str]:
    if not results_path.exists():
        return set()
    counts: dict[str, int] = {}
    with open(results_path, encoding="utf-8") as fp:
        for line in fp:
            if not line.strip():
                continue
            cell = json.loads(line).get("cell_id", "")
            counts[cell] = counts.get(cell, 0) + 1
    return {cell for cell, n in counts.items() if n >= expected_rows}


def _matches(job: CellJob, only: dict[str, str]) -> bool:
    table = {
        "model": job.model,
        "task": job.task,
        "train_variant": job.train_variant,
        "seed": str(job.seed),
    }
    return all(table.get(key) == value for key, value in only.items())


def write_run_metadata(results_path: Path, manifest: Manifest) -> None:
    """Sidecar documenting encoder settings the score rows cannot carry."""
    meta = {
        "harness_version": __version__,
        "torch_version": torch.__version__,
        "device": "cpu",
        "encoder": {
            "buckets": modelling.DEFAULT_BUCKETS,
            "dim": modelling.DEFAULT_DIM,
            "layers": modelling.DEFAULT_LAYERS,
            "heads": modelling.DEFAULT_HEADS,
            "max_tokens": MAX_LEN,
            "tokeniser": "whitespace + stable hash buckets, case kept",
            "pretrained": False,
        },
        "test_variants": list(manifest.test_variants),
    }
    meta_path = results_path.with_suffix(results_path.suffix + ".meta.json")
    with open(meta_path, "w", encoding="utf-8") as fp:
        json.dump(meta, fp, indent=2)
        fp.write("\n")


def run_manifest(
    manifest_path: Union[str, Path],
    results_path: Optional[Union[str, Path]] = None,
    only: Optional[dict[str, str]] = None,
) -> dict:
    """Execute every (filtered) cell; resumable; failures never abort."""
    manifest = load_manifest(manifest_path)
    results = Path(results_path) if results_path else manifest.results_path
    only = only or {}
    done = completed_cells(results, len(manifest.test_variants))
    failures_path = results.with_suffix(results.suffix + ".failures.jsonl")
    write_run_metadata(results, manifest)
    ran, skipped, failed = [], [], []
    for job in manifest.jobs:
        if only and not _matches(job, only):
            continue
        if job.cell_id in done:
            skipped.append(job.cell_id)
            continue
        try:
            rows = run_cell(job, manifest.test_variants)
        except Exception as exc:  # a broken cell must not sink the sweep
            log.error("cell %s failed: %s", job.cell_id, exc)
            failed.append(job.cell_id)
            failures_path.parent.mkdir(parents=True, exist_ok=True)
            with open(failures_path, "a", encoding="utf-8") as fp:
                fp.write(json.dumps({"cell_id": job.cell_id, "error": str(exc)}) + "\n")
            continue
        append_rows(results, rows)
        ran.append(job.cell_id)
        log.info("cell %s: %s", job.cell_id,
                 ", ".join(f"{r['test_variant']}={r['weighted_f1']:.2f}" for r in rows))
    return {
        "results": str(results),
        "ran": ran,
        "skipped": skipped,
        "failed": failed,
    }
