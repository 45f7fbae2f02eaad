"""Edit-distance primitives, backed by the compiled extension when built.

The compiled module and the pure-Python fallback implement identical
semantics; which one loaded is reported in BACKEND and never changes any
result, only throughput. ``benchmarks/bench_kernels.py`` compares the two.
"""

from typing import Sequence

try:
    from variaforge import _kernels as _impl

    BACKEND = "cython"
except ImportError:  # extension not built; pure Python mirror
    from variaforge import _kernels_py as _impl

    BACKEND = "python"

from variaforge import _kernels_py as _pure


def _as_ids(a: Sequence[str], b: Sequence[str]) -> tuple[list[int], list[int]]:
    table: dict[str, int] = {}
    ids_a = [table.setdefault(t, len(table)) for t in a]
    ids_b = [table.setdefault(t, len(table)) for t in b]
    return ids_a, ids_b


def char_distance(a: str, b: str) -> int:
    """Unit-cost Levenshtein distance over Unicode scalar values."""
    return _impl.distance_str(a, b)


def char_bounded_distance(a: str, b: str, limit: int) -> int:
    """char_distance capped at limit; returns limit + 1 when exceeded."""
    return _impl.bounded_distance_str(a, b, limit)


def token_distance(a: Sequence[str], b: Sequence[str]) -> int:
    """Unit-cost Levenshtein distance over whole tokens."""
    ids_a, ids_b = _as_ids(a, b)
    return _impl.distance_ids(ids_a, ids_b)


def token_edit_counts(a: Sequence[str], b: Sequence[str]) -> tuple[int, int, int, int]:
    """(distance, substitutions, insertions, deletions), a as reference."""
    ids_a, ids_b = _as_ids(a, b)
    return tuple(_impl.edit_counts_ids(ids_a, ids_b))


def pure_python_module():
    """The fallback backend, importable regardless of the active one."""
    return _pure


def active_module():
    """The backend selected at import time."""
    return _impl
