"""Destandardise and normalise text deterministically under a seeded plan.

Destandardisation swaps each covered word for one of its recorded spelling
variants, drawn proportionally to correction frequency; per-token rates are
therefore a property of the lexicon, not a knob. Normalisation maps known
variant surfaces back to their best standard form, with a bounded
edit-distance fallback for unseen spellings. Outputs are a pure function
of (input, lexicon, plan): every word occurrence gets its own counter-based
seed, so lines can be processed in any order on any number of workers.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from functools import cached_property, lru_cache

from variaforge import rng
from variaforge.errors import UserError
from variaforge.kernels import char_bounded_distance
from variaforge.lexicon import VariantLexicon

MODES = ("destandardise", "normalise")
CASING_POLICIES = ("preserve-initial", "literal")
DEFAULT_MAX_EDIT_DISTANCE = 2

_WORD_APOSTROPHES = frozenset("'’")


@dataclass(frozen=True)
class TransformPlan:
    mode: str
    global_seed: int = 0
    casing_policy: str = "preserve-initial"
    max_edit_distance: int = DEFAULT_MAX_EDIT_DISTANCE
    dataset_id: str = ""

    def __post_init__(self):
        if self.mode not in MODES:
            raise UserError(f"unknown transform mode {self.mode!r}; expected one of {MODES}")
        if self.casing_policy not in CASING_POLICIES:
            raise UserError(
                f"unknown casing policy {self.casing_policy!r}; expected one of {CASING_POLICIES}"
            )
        if not 0 <= self.global_seed < 2**64:
            raise UserError("global_seed must be an unsigned 64-bit integer")
        if self.max_edit_distance < 0:
            raise UserError("max_edit_distance must be >= 0")

    @cached_property
    def dataset_seed(self) -> int:
        return rng.string_seed(self.dataset_id)


@dataclass(frozen=True)
class TokenSpan:
    surface: str
    is_word: bool
    leading_ws: str = ""


@lru_cache(maxsize=4096)
def _is_word_char(ch: str) -> bool:
    if ch in _WORD_APOSTROPHES:
        return True
    cat = unicodedata.category(ch)
    return cat[0] in ("L", "M")


def tokenize_line(line: str) -> list[TokenSpan]:
    """Lossless split into word and non-word spans.

    Word tokens are maximal runs of letters, apostrophes, and combining
    marks; every other non-space run is one non-word span. Whitespace is
    carried as leading_ws (a trailing run gets an empty terminal span), so
    detokenize(tokenize_line(s)) == s.
    """
    if "\n" in line or "\r" in line:
        raise UserError("tokenize_line expects a single line without newlines")
    spans = []
    i, n = 0, len(line)
    while i < n:
        ws_start = i
        while i < n and line[i].isspace():
            i += 1
        ws = line[ws_start:i]
        if i == n:
            spans.append(TokenSpan("", False, ws))
            break
        start = i
        word = _is_word_char(line[i])
        while i < n and not line[i].isspace() and _is_word_char(line[i]) == word:
            i += 1
        spans.append(TokenSpan(line[start:i], word, ws))
    return spans


def detokenize(spans: list[TokenSpan]) -> str:
    return "".join(span.leading_ws + span.surface for span in spans)


def is_word_token(token: str) -> bool:
    """True when every character is word material (letters, marks, apostrophes)."""
    return bool(token) and all(_is_word_char(ch) for ch in token)


def _entry_form(lexicon: VariantLexicon, token: str) -> str | None:
    """The lexicon key the token maps to, folding only sentence casing."""
    if lexicon.lookup(token) is not None:
        return token
    folded = token.lower()
    if folded != token and lexicon.lookup(folded) is not None:
        return folded
    return None


def _apply_casing(original: str, replacement: str, policy: str) -> str:
    if policy == "literal" or not replacement:
        return replacement
    if original[:1].isupper():
        return replacement[0].upper() + replacement[1:]
    return replacement


def destandardise_token(
    token: str, lexicon: VariantLexicon, plan: TransformPlan, site_seed: int
) -> str:
    """Swap a word for one of its variants, frequency-proportionally.

    The draw u in [0, 1) is keyed by (global_seed, site_seed); the variant
    whose cumulative-frequency interval (in canonical entry order)
    contains u is selected. Tokens without an entry pass through.
    """
    form = _entry_form(lexicon, token)
    if form is None:
        return token
    entry = lexicon.entries[form]
    u = rng.unit_draw(plan.global_seed, site_seed)
    threshold = u * entry.total
    acc = 0
    chosen = entry.variants[-1][0]
    for surface, count in entry.variants:
        acc += count
        if threshold < acc:
            chosen = surface
            break
    return _apply_casing(token, chosen, plan.casing_policy)


def site_seed(plan: TransformPlan, line_index: int, token_index: int, stream: int = 0) -> int:
    """Per-occurrence seed; stream namespaces parallel text fields."""
    return rng.mix64(plan.dataset_seed, stream, line_index, token_index)


def destandardise_line(
    line: str,
    lexicon: VariantLexicon,
    plan: TransformPlan,
    line_index: int,
    stream: int = 0,
) -> str:
    """Destandardise every word span; non-word spans pass through."""
    spans = tokenize_line(line)
    out = []
    word_index = 0
    for span in spans:
        if span.is_word:
            seed = site_seed(plan, line_index, word_index, stream)
            word_index += 1
            surface = destandardise_token(span.surface, lexicon, plan, seed)
            out.append(TokenSpan(surface, True, span.leading_ws))
        else:
            out.append(span)
    return detokenize(out)


def normalise_token(token: str, lexicon: VariantLexicon, plan: TransformPlan) -> str:
    """Map a word to its best standard form.

    Ranking: (1) recorded variant surfaces win by correction count, then
    lexicographically; (2) otherwise standard forms within
    plan.max_edit_distance, ranked by distance, then entry total count
    descending, then lexicographically; (3) otherwise unchanged.
    """
    hits = lexicon.inverse_lookup(token)
    if not hits:
        folded = token.lower()
        if folded != token:
            hits = lexicon.inverse_lookup(folded)
    if hits:
        return _apply_casing(token, hits[0][0], plan.casing_policy)
    limit = plan.max_edit_distance
    if limit > 0:
        probe = token.lower() if plan.casing_policy == "preserve-initial" else token
        best_form = None
        best_key = None
        for standard_form in lexicon.entries:
            dist = char_bounded_distance(probe, standard_form, limit)
            if dist > limit:
                continue
            key = (dist, -lexicon.entries[standard_form].total, standard_form)
            if best_key is None or key < best_key:
                best_key = key
                best_form = standard_form
        if best_form is not None:
            return _apply_casing(token, best_form, plan.casing_policy)
    return token


def normalise_line(line: str, lexicon: VariantLexicon, plan: TransformPlan) -> str:
    """Normalise every word span; deterministic, no randomness involved."""
    spans = tokenize_line(line)
    out = []
    for span in spans:
        if span.is_word:
            out.append(TokenSpan(normalise_token(span.surface, lexicon, plan), True, span.leading_ws))
        else:
            out.append(span)
    return detokenize(out)


def transform_line(
    line: str,
    lexicon: VariantLexicon,
    plan: TransformPlan,
    line_index: int,
    stream: int = 0,
) -> str:
    """Dispatch on plan.mode; the seeded path only exists for destandardise."""
    if plan.mode == "destandardise":
        return destandardise_line(line, lexicon, plan, line_index, stream)
    return normalise_line(line, lexicon, plan)
