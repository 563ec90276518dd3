"""SplitMix64 random streams.

All randomness in the package comes from here so that fold assignments and
simulation outputs stay reproducible for the lifetime of the repository,
independent of numpy's generator policies.

SplitMix64 (Steele, Lea & Flood, 2014) is counter based: output ``i`` of the
stream with state ``s`` is ``mix64(s + (i + 1) * GOLDEN)``.  That lets any
element of a stream be computed directly from ``(key, index)``, which is what
makes the simulation results independent of how work is split across threads.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_TWO_M53 = 2.0**-53


def mix64(x: int) -> int:
    x &= MASK64
    x = ((x ^ (x >> 30)) * _M1) & MASK64
    x = ((x ^ (x >> 27)) * _M2) & MASK64
    return x ^ (x >> 31)


def derive_key(*parts: int) -> int:
    """Hash a tuple of nonnegative integers into one 64-bit stream key."""
    h = GOLDEN
    for part in parts:
        if part < 0:
            raise ValueError("key parts must be nonnegative")
        h = mix64(h ^ mix64(part + GOLDEN))
    return h


class SplitMix64:
    """Sequential SplitMix64 generator with a few sampling helpers."""

    def __init__(self, seed: int):
        if seed < 0:
            raise ValueError("seed must be nonnegative")
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN) & MASK64
        return mix64(self.state)

    def below(self, bound: int) -> int:
        """Uniform integer in [0, bound) by rejection (no modulo bias)."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        limit = (1 << 64) - ((1 << 64) % bound)
        while True:
            x = self.next_u64()
            if x < limit:
                return x % bound

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]


def stream_u64(key: int, index) -> np.ndarray:
    """Elements ``index`` of the SplitMix64 stream seeded with ``mix64(key)``."""
    idx = np.asarray(index, dtype=np.uint64)
    state0 = np.uint64(mix64(key))
    # uint64 arithmetic wraps modulo 2**64 by design
    with np.errstate(over="ignore"):
        x = state0 + (idx + np.uint64(1)) * np.uint64(GOLDEN)
        x = (x ^ (x >> np.uint64(30))) * np.uint64(_M1)
        x = (x ^ (x >> np.uint64(27))) * np.uint64(_M2)
    return x ^ (x >> np.uint64(31))


def stream_uniform(key: int, index) -> np.ndarray:
    """Uniform doubles strictly inside (0, 1), 53 bits each."""
    u = stream_u64(key, index) >> np.uint64(11)
    return (u.astype(np.float64) + 0.5) * _TWO_M53
