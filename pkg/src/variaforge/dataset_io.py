"""Read, validate, transform, and combine task datasets.

Sequence and pair tasks live in JSONL; token tasks in two-column CoNLL
(token<TAB>tag, blank line between sentences). Datasets are immutable
after read; transforms return new datasets and never touch labels.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional, Union

from variaforge import transform as tf
from variaforge.errors import DataError, InternalInvariantError, UserError
from variaforge.lexicon import VariantLexicon
from variaforge.metrics import VARIANTS

TASK_KINDS = {
    "IC": "sequence",
    "NER": "token",
    "POS": "token",
    "WNLI": "pair",
    "TC": "sequence",
    "SC": "sequence",
    "CM": "sequence",
}
SPLITS = ("train", "dev", "test")

# native direction: these tasks start standard and get destandardised ...
DESTANDARDISE_TASKS = frozenset({"IC", "NER", "POS", "WNLI", "TC"})
# ... while these start non-standard and get normalised
NORMALISE_TASKS = frozenset({"SC", "CM"})


@dataclass(frozen=True)
class Record:
    id: str
    kind: str
    text: Optional[str] = None
    text_a: Optional[str] = None
    text_b: Optional[str] = None
    tokens: Optional[tuple[str, ...]] = None
    labels: Optional[tuple[str, ...]] = None
    label: Optional[str] = None

    def __post_init__(self):
        if not self.id:
            raise DataError("record id must be non-empty")
        if self.kind == "sequence":
            if not self.text:
                raise DataError(f"record {self.id}: empty text")
            if self.label is None or self.label == "":
                raise DataError(f"record {self.id}: missing label")
        elif self.kind == "pair":
            if not self.text_a or not self.text_b:
                raise DataError(f"record {self.id}: empty text_a/text_b")
            if self.label is None or self.label == "":
                raise DataError(f"record {self.id}: missing label")
        elif self.kind == "token":
            if not self.tokens:
                raise DataError(f"record {self.id}: no tokens")
            if self.labels is None or len(self.tokens) != len(self.labels):
                raise DataError(
                    f"record {self.id}: tokens/labels misaligned "
                    f"({len(self.tokens)} vs {0 if self.labels is None else len(self.labels)})"
                )
            if any(not t for t in self.tokens) or any(not l for l in self.labels):
                raise DataError(f"record {self.id}: empty token or label")
        else:
            raise DataError(f"record {self.id}: unknown kind {self.kind!r}")


@dataclass
class Dataset:
    task: str
    split: str
    variant: str
    records: list[Record]

    def __post_init__(self):
        if self.task not in TASK_KINDS:
            raise DataError(f"unknown task {self.task!r}; expected one of {sorted(TASK_KINDS)}")
        if self.split not in SPLITS:
            raise DataError(f"unknown split {self.split!r}; expected one of {SPLITS}")
        if self.variant not in VARIANTS:
            raise DataError(f"unknown variant {self.variant!r}; expected one of {VARIANTS}")
        kind = TASK_KINDS[self.task]
        seen = set()
        for rec in self.records:
            if rec.kind != kind:
                raise DataError(
                    f"record {rec.id}: kind {rec.kind!r} does not match task {self.task} ({kind})"
                )
            if rec.id in seen:
                raise DataError(f"duplicate record id {rec.id!r}")
            seen.add(rec.id)

    def __len__(self) -> int:
        return len(self.records)


def dataset_extension(task: str) -> str:
    return "conll" if TASK_KINDS[task] == "token" else "jsonl"


def dataset_path(root: Union[str, Path], task: str, split: str, variant: str) -> Path:
    """Canonical layout: <root>/<task>/<split>.<variant>.<ext>"""
    return Path(root) / task / f"{split}.{variant}.{dataset_extension(task)}"


def _read_jsonl(path, task, split, variant, kind) -> Dataset:
    required = ("id", "text_a", "text_b", "label") if kind == "pair" else ("id", "text", "label")
    records = []
    with open(path, encoding="utf-8") as fp:
        for lineno, line in enumerate(fp, start=1):
            if not line.strip():
                continue
            where = f"{path}:{lineno}"
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"{where}: invalid JSON ({exc.msg})") from None
            if not isinstance(obj, dict):
                raise DataError(f"{where}: expected a JSON object")
            for name in required:
                if name not in obj:
                    raise DataError(f"{where}: missing field {name!r}")
            unknown = set(obj) - set(required)
            if unknown:
                raise DataError(f"{where}: unknown field(s) {sorted(unknown)}")
            for name in required:
                if not isinstance(obj[name], str):
                    raise DataError(f"{where}: field {name!r} must be a string")
            try:
                if kind == "pair":
                    rec = Record(
                        id=obj["id"], kind="pair",
                        text_a=obj["text_a"], text_b=obj["text_b"], label=obj["label"],
                    )
                else:
                    rec = Record(id=obj["id"], kind="sequence", text=obj["text"], label=obj["label"])
            except DataError as exc:
                raise DataError(f"{where}: {exc}") from None
            records.append(rec)
    return Dataset(task=task, split=split, variant=variant, records=records)


def _read_conll(path, task, split, variant) -> Dataset:
    records = []
    tokens: list[str] = []
    labels: list[str] = []

    def flush(where):
        if tokens:
            try:
                rec = Record(
                    id=str(len(records)), kind="token",
                    tokens=tuple(tokens), labels=tuple(labels),
                )
            except DataError as exc:
                raise DataError(f"{where}: {exc}") from None
            records.append(rec)
            tokens.clear()
            labels.clear()

    with open(path, encoding="utf-8") as fp:
        lineno = 0
        for lineno, line in enumerate(fp, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                flush(f"{path}:{lineno}")
                continue
            cols = line.split("\t")
            if len(cols) != 2:
                raise DataError(
                    f"{path}:{lineno}: expected token<TAB>tag, got {len(cols)} column(s)"
                )
            token, tag = cols
            if not token or not tag:
                raise DataError(f"{path}:{lineno}: empty token or tag")
            tokens.append(token)
            labels.append(tag)
        flush(f"{path}:{lineno}")
    return Dataset(task=task, split=split, variant=variant, records=records)


def read_dataset(
    path: Union[str, Path], task: str, split: str, variant: str = "std"
) -> Dataset:
    """Parse one split file in the canonical format for the task kind."""
    if task not in TASK_KINDS:
        raise UserError(f"unknown task {task!r}; expected one of {sorted(TASK_KINDS)}")
    path = Path(path)
    if not path.exists():
        raise DataError(f"dataset file not found: {path}")
    kind = TASK_KINDS[task]
    if kind == "token":
        return _read_conll(path, task, split, variant)
    return _read_jsonl(path, task, split, variant, kind)


def write_dataset(ds: Dataset, path: Union[str, Path]) -> None:
    """Deterministic inverse of read_dataset (CoNLL ids are positional)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    kind = TASK_KINDS[ds.task]
    with open(path, "w", encoding="utf-8", newline="") as fp:
        if kind == "token":
            for rec in ds.records:
                for token, tag in zip(rec.tokens, rec.labels):
                    fp.write(f"{token}\t{tag}\n")
                fp.write("\n")
        elif kind == "pair":
            for rec in ds.records:
                fp.write(json.dumps(
                    {"id": rec.id, "text_a": rec.text_a, "text_b": rec.text_b, "label": rec.label},
                    ensure_ascii=False,
                ) + "\n")
        else:
            for rec in ds.records:
                fp.write(json.dumps(
                    {"id": rec.id, "text": rec.text, "label": rec.label},
                    ensure_ascii=False,
                ) + "\n")


def _transform_text(text: str, lexicon, plan, line_index: int, stream: int) -> str:
    # multi-line text keeps per-line sites distinct via the stream component
    if "\n" in text:
        return "\n".join(
            tf.transform_line(part, lexicon, plan, line_index, stream * 1000 + k)
            for k, part in enumerate(text.split("\n"))
        )
    return tf.transform_line(text, lexicon, plan, line_index, stream)


def transform_dataset(
    ds: Dataset,
    lexicon: VariantLexicon,
    plan: tf.TransformPlan,
    force: bool = False,
) -> Dataset:
    """Apply the plan to every record; labels and ids never change.

    Tasks have a native direction (standard sources are destandardised,
    non-standard sources normalised); a mismatched mode is refused unless
    force is set.
    """
    if not force:
        allowed = DESTANDARDISE_TASKS if plan.mode == "destandardise" else NORMALISE_TASKS
        if ds.task not in allowed:
            raise UserError(
                f"task {ds.task} is not {plan.mode}d in the standard flow "
                f"(expected one of {sorted(allowed)}); use force to override"
            )
    new_variant = "n-std" if plan.mode == "destandardise" else "std"
    out = []
    for index, rec in enumerate(ds.records):
        if rec.kind == "sequence":
            out.append(replace(rec, text=_transform_text(rec.text, lexicon, plan, index, 0)))
        elif rec.kind == "pair":
            out.append(replace(
                rec,
                text_a=_transform_text(rec.text_a, lexicon, plan, index, 0),
                text_b=_transform_text(rec.text_b, lexicon, plan, index, 1),
            ))
        else:
            # punctuation and number tokens pass through untransformed
            if plan.mode == "destandardise":
                new_tokens = tuple(
                    tf.destandardise_token(tok, lexicon, plan, tf.site_seed(plan, index, t))
                    if tf.is_word_token(tok) else tok
                    for t, tok in enumerate(rec.tokens)
                )
            else:
                new_tokens = tuple(
                    tf.normalise_token(tok, lexicon, plan) if tf.is_word_token(tok) else tok
                    for tok in rec.tokens
                )
            if len(new_tokens) != len(rec.labels):
                raise InternalInvariantError(
                    f"record {rec.id}: token count changed under transform"
                )
            out.append(replace(rec, tokens=new_tokens))
    return Dataset(task=ds.task, split=ds.split, variant=new_variant, records=out)


def combine(std: Dataset, nstd: Dataset) -> Dataset:
    """Concatenate the standard block then the non-standard block.

    Non-standard ids get a '#nstd' suffix; no shuffling (that belongs to
    the training harness).
    """
    if std.task != nstd.task:
        raise DataError(f"task mismatch: {std.task} vs {nstd.task}")
    if std.split != nstd.split:
        raise DataError(f"split mismatch: {std.split} vs {nstd.split}")
    if len(std.records) != len(nstd.records):
        raise DataError(
            f"record count mismatch: {len(std.records)} vs {len(nstd.records)}"
        )
    for a, b in zip(std.records, nstd.records):
        if a.id != b.id:
            raise DataError(f"record id mismatch: {a.id!r} vs {b.id!r}")
    records = list(std.records) + [replace(r, id=f"{r.id}#nstd") for r in nstd.records]
    return Dataset(task=std.task, split=std.split, variant="comb", records=records)


def dataset_stats(root: Union[str, Path], task: str, variant: str = "std") -> dict[str, int]:
    """Record counts per split under the canonical layout."""
    counts = {}
    for split in SPLITS:
        path = dataset_path(root, task, split, variant)
        counts[split] = len(read_dataset(path, task, split, variant))
    return counts
