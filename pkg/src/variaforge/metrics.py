"""Divergence and classification metrics: WER, CER, weighted F1, seed stats.

Corpus rates are micro-averaged by default (summed edit distance over
summed reference length); a macro toggle averages per-line rates instead.
All functions are pure and safe to call from parallel workers.
"""

from __future__ import annotations

import json
import statistics
import unicodedata
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence, Union

from variaforge.errors import DataError
from variaforge.kernels import char_distance, token_edit_counts

VARIANTS = ("std", "n-std", "comb")

SCORE_FIELDS = ("task", "train_variant", "test_variant", "seed", "weighted_f1")
OPTIONAL_SCORE_FIELDS = ("model", "cell_id")


@dataclass(frozen=True)
class EditStats:
    """Word-level alignment counts for one reference/hypothesis pair."""

    distance: int
    substitutions: int
    insertions: int
    deletions: int
    reference_length: int

    @property
    def rate_percent(self) -> float:
        return 100.0 * self.distance / self.reference_length


@dataclass(frozen=True)
class ErrorRateReport:
    wer: float  # percent
    cer: float  # percent
    substitutions: int
    insertions: int
    deletions: int
    ref_token_count: int
    ref_char_count: int

    def to_dict(self) -> dict:
        return {
            "wer": self.wer,
            "cer": self.cer,
            "substitutions": self.substitutions,
            "insertions": self.insertions,
            "deletions": self.deletions,
            "ref_token_count": self.ref_token_count,
            "ref_char_count": self.ref_char_count,
        }


@dataclass(frozen=True)
class ScoreRecord:
    """One fine-tuning outcome: a (task, train, test, seed) cell score."""

    task: str
    train_variant: str
    test_variant: str
    seed: int
    weighted_f1: float
    model: str = ""
    cell_id: str = ""

    def __post_init__(self):
        if self.train_variant not in VARIANTS:
            raise DataError(f"unknown train_variant {self.train_variant!r}")
        if self.test_variant not in VARIANTS:
            raise DataError(f"unknown test_variant {self.test_variant!r}")
        if not 0.0 <= self.weighted_f1 <= 100.0:
            raise DataError(f"weighted_f1 out of [0, 100]: {self.weighted_f1}")

    def to_dict(self) -> dict:
        out = {
            "task": self.task,
            "train_variant": self.train_variant,
            "test_variant": self.test_variant,
            "seed": self.seed,
            "weighted_f1": self.weighted_f1,
        }
        if self.model:
            out["model"] = self.model
        if self.cell_id:
            out["cell_id"] = self.cell_id
        return out


def wer(reference: Sequence[str], hypothesis: Sequence[str]) -> EditStats:
    """Word-level Levenshtein stats; rate is distance over reference length."""
    if not reference:
        raise DataError("empty reference")
    distance, subs, ins, dels = token_edit_counts(reference, hypothesis)
    return EditStats(distance, subs, ins, dels, len(reference))


def cer(reference: str, hypothesis: str) -> float:
    """Character error rate in percent over the exact strings, spaces included."""
    if not reference:
        raise DataError("empty reference")
    return 100.0 * char_distance(reference, hypothesis) / len(reference)


def _is_punct_token(token: str) -> bool:
    return all(not ch.isalnum() for ch in token)


def _prepare_line(line: str, nfc: bool, drop_punct: bool) -> tuple[list[str], str]:
    if nfc:
        line = unicodedata.normalize("NFC", line)
    tokens = line.split()
    if drop_punct:
        tokens = [t for t in tokens if not _is_punct_token(t)]
        line = " ".join(tokens)
    return tokens, line


def corpus_rates_from_pairs(
    pairs: Iterable[tuple[str, str]],
    nfc: bool = False,
    macro: bool = False,
    drop_punct: bool = False,
) -> ErrorRateReport:
    """Aggregate WER/CER over aligned (reference, hypothesis) lines."""
    word_dist = subs = ins = dels = ref_tokens = 0
    char_dist = ref_chars = 0
    line_wers: list[float] = []
    line_cers: list[float] = []
    n_lines = 0
    for ref_line, hyp_line in pairs:
        n_lines += 1
        ref_toks, ref_text = _prepare_line(ref_line, nfc, drop_punct)
        hyp_toks, hyp_text = _prepare_line(hyp_line, nfc, drop_punct)
        if not ref_toks:
            raise DataError(f"empty reference on line {n_lines}")
        d, s, i, dl = token_edit_counts(ref_toks, hyp_toks)
        word_dist += d
        subs += s
        ins += i
        dels += dl
        ref_tokens += len(ref_toks)
        cd = char_distance(ref_text, hyp_text)
        char_dist += cd
        ref_chars += len(ref_text)
        if macro:
            line_wers.append(100.0 * d / len(ref_toks))
            line_cers.append(100.0 * cd / len(ref_text))
    if n_lines == 0:
        raise DataError("no line pairs to score")
    if macro:
        wer_pct = sum(line_wers) / n_lines
        cer_pct = sum(line_cers) / n_lines
    else:
        wer_pct = 100.0 * word_dist / ref_tokens
        cer_pct = 100.0 * char_dist / ref_chars
    return ErrorRateReport(wer_pct, cer_pct, subs, ins, dels, ref_tokens, ref_chars)


def corpus_error_rates(
    ref_path: Union[str, Path],
    hyp_path: Union[str, Path],
    nfc: bool = False,
    macro: bool = False,
    drop_punct: bool = False,
) -> ErrorRateReport:
    """Line-aligned file pair to corpus WER/CER."""
    ref_lines = Path(ref_path).read_text(encoding="utf-8").splitlines()
    hyp_lines = Path(hyp_path).read_text(encoding="utf-8").splitlines()
    if len(ref_lines) != len(hyp_lines):
        raise DataError(
            f"line count mismatch: {ref_path} has {len(ref_lines)}, "
            f"{hyp_path} has {len(hyp_lines)}"
        )
    return corpus_rates_from_pairs(zip(ref_lines, hyp_lines), nfc, macro, drop_punct)


def weighted_f1(gold: Sequence[str], pred: Sequence[str]) -> float:
    """Per-class F1 weighted by gold support, in percent."""
    if len(gold) != len(pred):
        raise DataError(f"label count mismatch: gold {len(gold)} vs pred {len(pred)}")
    if not gold:
        raise DataError("empty label sequences")
    tp: Counter = Counter()
    fp: Counter = Counter()
    fn: Counter = Counter()
    support = Counter(gold)
    for g, p in zip(gold, pred):
        if g == p:
            tp[g] += 1
        else:
            fp[p] += 1
            fn[g] += 1
    total = 0.0
    n = len(gold)
    for cls, sup in support.items():
        pred_pos = tp[cls] + fp[cls]
        gold_pos = tp[cls] + fn[cls]
        precision = tp[cls] / pred_pos if pred_pos else 0.0
        recall = tp[cls] / gold_pos if gold_pos else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        total += (sup / n) * f1
    return 100.0 * total


def aggregate(values: Sequence[float]) -> tuple[float, float]:
    """Mean and sample standard deviation (n-1); std is 0 for one value."""
    if not values:
        raise DataError("empty score group")
    mean = sum(values) / len(values)
    std = statistics.stdev(values) if len(values) > 1 else 0.0
    return mean, std


def format_cell(mean: float, std: float) -> str:
    return f"{mean:.2f} ± {std:.2f}"


def aggregate_records(
    records: Iterable[ScoreRecord],
) -> dict[tuple[str, str, str, str], tuple[float, float, int]]:
    """Group by (model, task, train, test) to (mean, std, n)."""
    groups: dict[tuple[str, str, str, str], list[float]] = {}
    for rec in records:
        key = (rec.model, rec.task, rec.train_variant, rec.test_variant)
        groups.setdefault(key, []).append(rec.weighted_f1)
    out = {}
    for key, values in groups.items():
        mean, std = aggregate(values)
        out[key] = (mean, std, len(values))
    return out


def parse_score_line(line: str, where: str) -> ScoreRecord:
    """One results-JSONL object to a ScoreRecord, strictly validated."""
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise DataError(f"{where}: invalid JSON ({exc.msg})") from None
    if not isinstance(obj, dict):
        raise DataError(f"{where}: expected a JSON object")
    for name in SCORE_FIELDS:
        if name not in obj:
            raise DataError(f"{where}: missing field {name!r}")
    unknown = set(obj) - set(SCORE_FIELDS) - set(OPTIONAL_SCORE_FIELDS)
    if unknown:
        raise DataError(f"{where}: unknown field(s) {sorted(unknown)}")
    if not isinstance(obj["seed"], int) or isinstance(obj["seed"], bool):
        raise DataError(f"{where}: seed must be an integer")
    if not isinstance(obj["weighted_f1"], (int, float)) or isinstance(obj["weighted_f1"], bool):
        raise DataError(f"{where}: weighted_f1 must be a number")
    for name in ("task", "train_variant", "test_variant"):
        if not isinstance(obj[name], str):
            raise DataError(f"{where}: {name} must be a string")
    try:
        return ScoreRecord(
            task=obj["task"],
            train_variant=obj["train_variant"],
            test_variant=obj["test_variant"],
            seed=obj["seed"],
            weighted_f1=float(obj["weighted_f1"]),
            model=obj.get("model", ""),
            cell_id=obj.get("cell_id", ""),
        )
    except DataError as exc:
        raise DataError(f"{where}: {exc}") from None


def read_score_records(path: Union[str, Path]) -> list[ScoreRecord]:
    records = []
    with open(path, encoding="utf-8") as fp:
        for lineno, line in enumerate(fp, start=1):
            if not line.strip():
                continue
            records.append(parse_score_line(line, f"{path}:{lineno}"))
    return records
