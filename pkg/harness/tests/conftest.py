import json
import subprocess
from pathlib import Path

import pytest


def toolkit(*argv) -> subprocess.CompletedProcess:
    """Invoke the variaforge CLI: the only allowed doorway to the toolkit."""
    return subprocess.run(
        ["variaforge", *argv], capture_output=True, text=True,
    )


@pytest.fixture(scope="session")
def toy_setup(tmp_path_factory):
    """Fixture data + pipeline outputs produced entirely through the CLI."""
    root = tmp_path_factory.mktemp("toy")
    made = toolkit("fixtures", "pipeline", "--out", str(root), "--json")
    assert made.returncode == 0, made.stderr
    config = json.loads(made.stdout)["data"]["config"]
    ran = toolkit("pipeline", "run", "--config", config, "--quiet", "--json")
    assert ran.returncode == 0, ran.stderr
    manifest = Path(json.loads(ran.stdout)["data"]["manifest"])
    return root, manifest


def write_micro_task(root: Path, n_train=24, n_eval=8) -> dict:
    """Tiny sequence task written straight in the interchange format."""
    words = {"aaa": "left", "bbb": "right"}
    datasets = {}
    for variant in ("std", "n-std", "comb"):
        datasets[variant] = {}
        for split, count in (("train", n_train), ("dev", n_eval), ("test", n_eval)):
            rows = []
            for i in range(count):
                keyword, label = list(words.items())[i % 2]
                surface = keyword if variant == "std" else keyword.upper()
                rows.append({"id": f"{variant}-{split}-{i}",
                             "text": f"{surface} xxx yyy {surface}", "label": label})
            if variant == "comb":
                rows = rows + [dict(r, id=r["id"] + "#n") for r in rows]
            path = root / "data" / "IC" / f"{split}.{variant}.jsonl"
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(
                "".join(json.dumps(r) + "\n" for r in rows), encoding="utf-8"
            )
            datasets[variant][split] = str(path)
    return datasets


def write_micro_manifest(root: Path, datasets: dict, seeds=(1,), epochs=2) -> Path:
    manifest = {
        "models": ["tiny"],
        "seeds": list(seeds),
        "train_variants": ["std", "n-std", "comb"],
        "test_variants": ["std", "n-std", "comb"],
        "results": "results.jsonl",
        "tasks": [{
            "task": "IC", "kind": "sequence", "batch_size": 8,
            "learning_rate": 5e-3, "epochs": epochs, "datasets": datasets,
        }],
        "cells": [
            {"cell_id": f"tiny__IC__{train}__s{seed}", "model": "tiny",
             "task": "IC", "train_variant": train, "seed": seed}
            for train in ("std", "n-std", "comb")
            for seed in seeds
        ],
    }
    path = root / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2), encoding="utf-8")
    return path
