"""Seeded random number plumbing.

All randomness in the package flows through Philox4x64 (a counter-based
generator) keyed by a 64-bit seed, so a run is reproducible bit-for-bit from
its seed alone. Named substreams are derived with `derive_seed`, which mixes
the parent seed with a list of tokens through the SplitMix64 finalizer:

    child = mix64((mix64(seed + GOLDEN) ^ token_hash(t1)) + GOLDEN) ...

Integer tokens hash through mix64; string tokens hash with 64-bit FNV-1a.
The rule is part of the output contract: changing it changes every golden
file. Per-scout substreams, if an implementation ever steps scouts in
parallel, must use derive_seed(run_seed, "scout", scout_index).
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


def mix64(z: int) -> int:
    """SplitMix64 finalizer: a fixed 64-bit bijective mixing function."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def _token_hash(token: int | str) -> int:
    if isinstance(token, bool):
        raise TypeError("bool token is ambiguous; use int or str")
    if isinstance(token, int):
        return mix64(token & _MASK64)
    if isinstance(token, str):
        h = _FNV_OFFSET
        for b in token.encode("utf-8"):
            h = ((h ^ b) * _FNV_PRIME) & _MASK64
        return h
    raise TypeError(f"unsupported token type: {type(token).__name__}")


def derive_seed(seed: int, *tokens: int | str) -> int:
    """Derive a 64-bit child seed from a parent seed and named tokens."""
    s = mix64((seed + _GOLDEN) & _MASK64)
    for t in tokens:
        s = mix64(((s ^ _token_hash(t)) + _GOLDEN) & _MASK64)
    return s


def generator(seed: int, *tokens: int | str) -> np.random.Generator:
    """Philox4x64 generator keyed by derive_seed(seed, *tokens)."""
    key = derive_seed(seed, *tokens) if tokens else (seed & _MASK64)
    return np.random.Generator(np.random.Philox(key=key))
