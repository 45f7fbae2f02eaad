"""Weighted F1 via the toolkit CLI: the single scoring authority.

The harness never computes F1 itself; it exports gold/pred label files
(one label per line) and parses the JSON the CLI returns, so both
packages always agree on the metric.
"""

from __future__ import annotations

import json
import subprocess
import tempfile
from pathlib import Path

SCORER = "variaforge"


class ScoringError(RuntimeError):
    pass


def score_weighted_f1(gold: list[str], pred: list[str]) -> float:
    with tempfile.TemporaryDirectory(prefix="harness-score-") as tmp:
        gold_path = Path(tmp) / "gold.txt"
        pred_path = Path(tmp) / "pred.txt"
        gold_path.write_text("".join(f"{g}\n" for g in gold), encoding="utf-8")
        pred_path.write_text("".join(f"{p}\n" for p in pred), encoding="utf-8")
        proc = subprocess.run(
            [SCORER, "metrics", "f1", "--gold", str(gold_path),
             "--pred", str(pred_path), "--json", "--quiet"],
            capture_output=True, text=True,
        )
    if proc.returncode != 0:
        raise ScoringError(
            f"scorer exited {proc.returncode}: {proc.stderr.strip() or proc.stdout.strip()}"
        )
    try:
        payload = json.loads(proc.stdout)
    except json.JSONDecodeError:
        raise ScoringError(f"scorer emitted invalid JSON: {proc.stdout!r}") from None
    if not payload.get("ok"):
        raise ScoringError(f"scorer reported failure: {payload}")
    return float(payload["data"]["weighted_f1"])
