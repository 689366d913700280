"""Portable seeded randomness for sampling.

The whole point of pinning this down is that a (population, seed) pair must
give the same sample on every platform and in any reimplementation, so the
generator and the selection procedures are spelled out here instead of relying
on a runtime's unspecified shuffling internals:

* generator: splitmix64 (Steele, Lea & Flood 2014), 64-bit output;
* bounded draws: rejection sampling on the top of the 64-bit range (unbiased);
* subsampling: sparse partial Fisher-Yates over population positions;
* named substreams: 64-bit seeds derived with keyed BLAKE2b, so per-stratum
  work can run in any order (or in parallel) without changing the result.
"""

from __future__ import annotations

import hashlib

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


class SplitMix64:
    """splitmix64 stream seeded with a 64-bit integer."""

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def randbelow(self, bound: int) -> int:
        """Uniform integer in [0, bound), unbiased via rejection."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        # Reject draws from the incomplete final block of size 2**64 % bound.
        threshold = (1 << 64) - ((1 << 64) % bound)
        while True:
            r = self.next_u64()
            if r < threshold:
                return r % bound


def stream_seed(seed: int, label: str) -> int:
    """Derive the 64-bit seed of the substream named ``label``."""
    key = (seed & _MASK64).to_bytes(8, "big")
    digest = hashlib.blake2b(label.encode("utf-8"), key=key, digest_size=8).digest()
    return int.from_bytes(digest, "big")


def sample_positions(population_size: int, k: int, rng: SplitMix64) -> list[int]:
    """Draw ``k`` distinct positions out of ``population_size`` without replacement.

    Partial Fisher-Yates with a sparse overlay (memory O(k), draws exactly k).
    Positions are returned in ascending order so emitted records keep their
    source order regardless of how the selection proceeded.
    """
    if k < 0 or k > population_size:
        raise ValueError(f"cannot draw {k} from a population of {population_size}")
    displaced: dict[int, int] = {}
    chosen: list[int] = []
    for i in range(k):
        j = i + rng.randbelow(population_size - i)
        vi = displaced.get(i, i)
        vj = displaced.get(j, j)
        chosen.append(vj)
        displaced[j] = vi
        displaced[i] = vj
    chosen.sort()
    return chosen
