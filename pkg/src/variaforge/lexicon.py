"""Frequency-weighted spelling-variant lexicon and its inverse index.

One entry maps a standard form to every observed spelling of it, weighted
by correction counts. The standard form is always present among its own
variants (identity floor of 1), so sampling can leave a token unchanged.
The lexicon is immutable after build and safe to share across workers.
"""

from __future__ import annotations

import datetime
import hashlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Optional, Union

from variaforge.errors import DataError

FORMAT_TAG = "#varlex v1"


def _check_token(s: str) -> bool:
    return bool(s) and not any(ch.isspace() for ch in s)


def canonical_variants(pairs: Iterable[tuple[str, int]]) -> tuple[tuple[str, int], ...]:
    """Descending count, ties broken lexicographically ascending."""
    return tuple(sorted(pairs, key=lambda p: (-p[1], p[0])))


@dataclass(frozen=True)
class VariantEntry:
    standard_form: str
    variants: tuple[tuple[str, int], ...]

    def __post_init__(self):
        if not _check_token(self.standard_form):
            raise DataError(f"invalid standard form: {self.standard_form!r}")
        if not self.variants:
            raise DataError(f"entry {self.standard_form!r} has no variants")
        surfaces = [s for s, _ in self.variants]
        if len(set(surfaces)) != len(surfaces):
            raise DataError(f"duplicate variant surfaces in entry {self.standard_form!r}")
        for surface, count in self.variants:
            if not _check_token(surface):
                raise DataError(f"invalid variant surface {surface!r} in entry {self.standard_form!r}")
            if count < 1:
                raise DataError(f"variant count must be >= 1: {surface!r} in {self.standard_form!r}")
        if self.variants != canonical_variants(self.variants):
            raise DataError(f"variants of {self.standard_form!r} not in canonical order")

    @property
    def total(self) -> int:
        return sum(count for _, count in self.variants)


def build_inverse(
    entries: dict[str, VariantEntry],
) -> dict[str, tuple[tuple[str, int], ...]]:
    """Transpose entries into surface -> [(standard_form, count)]."""
    raw: dict[str, list[tuple[str, int]]] = {}
    for standard_form, entry in entries.items():
        for surface, count in entry.variants:
            raw.setdefault(surface, []).append((standard_form, count))
    return {
        surface: tuple(sorted(hits, key=lambda h: (-h[1], h[0])))
        for surface, hits in raw.items()
    }


@dataclass(eq=False)
class VariantLexicon:
    entries: dict[str, VariantEntry]
    inverse: dict[str, tuple[tuple[str, int], ...]] = field(default_factory=dict)
    source: str = ""
    built_at: str = ""
    total_corrections: int = 0

    def __post_init__(self):
        if not self.inverse:
            self.inverse = build_inverse(self.entries)

    def __eq__(self, other) -> bool:
        # data identity only; source and timestamp are provenance, not content
        if not isinstance(other, VariantLexicon):
            return NotImplemented
        return (
            self.entries == other.entries
            and self.total_corrections == other.total_corrections
        )

    def __len__(self) -> int:
        return len(self.entries)

    def lookup(self, standard_form: str) -> Optional[VariantEntry]:
        """Exact, case-sensitive; None when absent."""
        return self.entries.get(standard_form)

    def inverse_lookup(self, surface: str) -> list[tuple[str, int]]:
        """Standard forms this surface was corrected to, best first."""
        return list(self.inverse.get(surface, ()))


def read_correction_log(path: Union[str, Path]) -> Iterator[tuple[str, str]]:
    """Yield (observed, corrected) rows from a two-column TSV log.

    Lines starting with '#' and blank lines are skipped. Any other line
    must contain exactly one tab; both fields must be single tokens.
    """
    with open(path, encoding="utf-8") as fp:
        for lineno, raw in enumerate(fp, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) != 2:
                raise DataError(
                    f"{path}:{lineno}: expected 2 tab-separated columns, got {len(cols)}"
                )
            observed, corrected = cols
            if not _check_token(observed) or not _check_token(corrected):
                raise DataError(f"{path}:{lineno}: fields must be non-empty single tokens")
            yield observed, corrected


def build_lexicon(rows: Iterable[tuple[str, str]], source: str = "") -> VariantLexicon:
    """Aggregate correction rows into a lexicon.

    Each row is one correction event (observed -> corrected). Every entry
    carries its own standard form as a variant: identity corrections count
    normally, plus a floor of 1 so identity is always sampleable.
    """
    counts: dict[str, dict[str, int]] = {}
    total = 0
    for observed, corrected in rows:
        per_entry = counts.setdefault(corrected, {})
        per_entry[observed] = per_entry.get(observed, 0) + 1
        total += 1
    if total == 0:
        raise DataError("empty correction log")
    entries = {}
    for standard_form, observed_counts in counts.items():
        observed_counts[standard_form] = observed_counts.get(standard_form, 0) + 1
        entries[standard_form] = VariantEntry(
            standard_form=standard_form,
            variants=canonical_variants(observed_counts.items()),
        )
    return VariantLexicon(
        entries=entries,
        source=source,
        built_at=datetime.datetime.now(datetime.timezone.utc).isoformat(),
        total_corrections=total,
    )


def build_lexicon_from_file(path: Union[str, Path]) -> VariantLexicon:
    return build_lexicon(read_correction_log(path), source=str(path))


def _body_lines(lexicon: VariantLexicon) -> Iterator[str]:
    for standard_form in sorted(lexicon.entries):
        for surface, count in lexicon.entries[standard_form].variants:
            yield f"{standard_form}\t{surface}\t{count}\n"


def save_lexicon(lexicon: VariantLexicon, path: Union[str, Path]) -> None:
    """Write the versioned TSV: header, canonical body, sha256 trailer."""
    body = "".join(_body_lines(lexicon))
    digest = hashlib.sha256(body.encode("utf-8")).hexdigest()
    with open(path, "w", encoding="utf-8", newline="") as fp:
        fp.write(f"{FORMAT_TAG} {lexicon.total_corrections}\n")
        fp.write(body)
        fp.write(f"#sha256 {digest}\n")


def load_lexicon(path: Union[str, Path]) -> VariantLexicon:
    """Read a lexicon file, verifying version tag and checksum."""
    with open(path, encoding="utf-8", newline="") as fp:
        lines = fp.readlines()
    if not lines:
        raise DataError(f"{path}: empty lexicon file")
    header = lines[0].rstrip("\n")
    parts = header.split(" ")
    if len(parts) != 3 or f"{parts[0]} {parts[1]}" != FORMAT_TAG:
        raise DataError(f"{path}: unsupported lexicon format tag {header!r}")
    try:
        total = int(parts[2])
    except ValueError:
        raise DataError(f"{path}: malformed total count in header {header!r}") from None
    if not lines[-1].startswith("#sha256 "):
        raise DataError(f"{path}: missing checksum trailer (file truncated?)")
    stated = lines[-1].rstrip("\n").split(" ", 1)[1]
    body = "".join(lines[1:-1])
    digest = hashlib.sha256(body.encode("utf-8")).hexdigest()
    if digest != stated:
        raise DataError(f"{path}: checksum mismatch (file corrupted or truncated)")
    grouped: dict[str, list[tuple[str, int]]] = {}
    for offset, line in enumerate(lines[1:-1], start=2):
        cols = line.rstrip("\n").split("\t")
        if len(cols) != 3:
            raise DataError(f"{path}:{offset}: expected 3 columns, got {len(cols)}")
        standard_form, surface, count_text = cols
        try:
            count = int(count_text)
        except ValueError:
            raise DataError(f"{path}:{offset}: malformed count {count_text!r}") from None
        grouped.setdefault(standard_form, []).append((surface, count))
    entries = {
        standard_form: VariantEntry(standard_form, canonical_variants(pairs))
        for standard_form, pairs in grouped.items()
    }
    return VariantLexicon(entries=entries, source=str(path), total_corrections=total)
