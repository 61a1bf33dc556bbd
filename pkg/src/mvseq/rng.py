"""Pinned pseudo-random primitives.

All stochastic behavior in this package (random importance scores, k-means++
seeding) flows through the SplitMix64 finalizer below, keyed by explicit
integers.  This keeps results bit-reproducible across runs, platforms, and
any future port, without depending on a particular library's RNG stream.
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    """SplitMix64 finalizer: a bijective avalanche mix on 64-bit ints."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def fnv1a64(data: bytes) -> int:
    """FNV-1a 64-bit hash, used to fold strings (doc ids) into RNG keys."""
    h = 0xCBF29CE484222325
    for b in data:
        h = ((h ^ b) * 0x100000001B3) & _MASK64
    return h


def stream_key(seed: int, *parts: int | str) -> int:
    """Derive a stream key from a seed plus arbitrary int/str context parts."""
    key = mix64(seed)
    for part in parts:
        if isinstance(part, str):
            key = mix64(key ^ fnv1a64(part.encode("utf-8")))
        else:
            key = mix64(key ^ (part & _MASK64))
    return key


class SplitMix64:
    """Deterministic counter-based generator over a fixed 64-bit key."""

    def __init__(self, key: int):
        self._state = key & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK64
        return mix64(self._state)

    def next_float(self) -> float:
        # 53 mantissa bits -> uniform in [0, 1)
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def next_below(self, n: int) -> int:
        """Uniform int in [0, n). Slight modulo bias is irrelevant at our n."""
        if n <= 0:
            raise ValueError("n must be positive")
        return self.next_u64() % n


def unit_float(key: int) -> float:
    """Stateless uniform [0, 1) draw for a fully-specified key."""
    return (mix64(key) >> 11) * (1.0 / (1 << 53))
