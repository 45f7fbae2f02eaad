"""Counter-based deterministic randomness for per-site variant sampling.

Every sampling site (one word occurrence in one line of one dataset) gets
its own 64-bit seed mixed from stable components, so results do not depend
on processing order and any line can be re-derived in isolation.
"""

import hashlib

_MASK64 = (1 << 64) - 1
_MIX_INIT = 0x6A09E667F3BCC909  # non-zero start so mix64() of all zeros is mixed too


def splitmix64(x: int) -> int:
    """One splitmix64 finalisation round over a 64-bit value."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (x ^ (x >> 31)) & _MASK64


def mix64(*parts: int) -> int:
    """Fold integers into one well-mixed 64-bit value; order-sensitive."""
    h = _MIX_INIT
    for p in parts:
        h = splitmix64(h ^ (p & _MASK64))
    return h


def string_seed(s: str) -> int:
    """Stable 64-bit seed for a string; process-independent, unlike hash()."""
    digest = hashlib.sha256(s.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def unit_draw(global_seed: int, site_seed: int) -> float:
    """Deterministic draw in [0, 1) for one sampling site."""
    bits = mix64(global_seed, site_seed)
    return (bits >> 11) * 2.0**-53
