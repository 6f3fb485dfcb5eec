"""Counter-based SplitMix64 stream.

Draw ``k`` of the stream seeded with ``seed`` is the ``k``-th SplitMix64
output, i.e. the finalizer applied to ``seed + (k + 1) * 0x9E3779B97F4A7C15``
modulo 2**64. A uniform in [0, 1) keeps the top 53 bits. Because every draw is
a pure function of ``(seed, k)`` the stream is identical on every platform and
the compiled simulation kernel can evaluate it inline.
"""

from __future__ import annotations

import numpy as np
from numba import njit

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB
INV_2_53 = 1.0 / (1 << 53)

DRAWS_PER_SLOT = 3
ARRIVAL, CHANNEL, POLICY = 0, 1, 2


def splitmix64(seed: int, k: int) -> int:
    z = (seed + (k + 1) * GOLDEN_GAMMA) & MASK64
    z = ((z ^ (z >> 30)) * MIX1) & MASK64
    z = ((z ^ (z >> 27)) * MIX2) & MASK64
    return z ^ (z >> 31)


def uniform(seed: int, k: int) -> float:
    return (splitmix64(seed, k) >> 11) * INV_2_53


def slot_draws(seed: int, slot: int) -> tuple[float, float, float]:
    """(arrival, channel, policy) uniforms for 1-based ``slot``."""
    base = DRAWS_PER_SLOT * (slot - 1)
    return uniform(seed, base + ARRIVAL), uniform(seed, base + CHANNEL), uniform(seed, base + POLICY)


def derive_seed(base_seed: int, index: int) -> int:
    """Seed for sweep cell ``index``; independent of worker scheduling."""
    return splitmix64(base_seed & MASK64, index)


class SplitMix64:
    """Sequential view of the stream, for callers that just want numbers."""

    def __init__(self, seed: int) -> None:
        self.seed = seed & MASK64
        self.counter = 0

    def next_u64(self) -> int:
        out = splitmix64(self.seed, self.counter)
        self.counter += 1
        return out

    def random(self) -> float:
        return (self.next_u64() >> 11) * INV_2_53


_GAMMA = np.uint64(GOLDEN_GAMMA)
_MIX1 = np.uint64(MIX1)
_MIX2 = np.uint64(MIX2)


@njit(cache=True, nogil=True)
def uniform_nb(seed, k):
    z = seed + (k + np.uint64(1)) * _GAMMA
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    z = z ^ (z >> np.uint64(31))
    return float(z >> np.uint64(11)) * INV_2_53
