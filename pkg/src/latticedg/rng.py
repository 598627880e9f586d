"""Seeded random streams.

Every run is driven by a 64-bit seed. Element ``e`` of the ground set draws
from its own child stream, ``PCG64(SeedSequence(seed, spawn_key=(e,)))``, so
the randomness used for one coordinate never depends on how many draws an
earlier coordinate consumed.
"""

from __future__ import annotations

import hashlib

import numpy as np

SEED_MASK = (1 << 64) - 1


def check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed <= SEED_MASK:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def element_stream(seed: int, e: int) -> np.random.Generator:
    """Child generator for ground-set element ``e``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(e,))))


def run_stream(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


class ElementStreams:
    """Lazily created per-element generators for one run.

    Deterministic branches never touch the RNG, so children are only built on
    first use.
    """

    def __init__(self, seed: int):
        self.seed = check_seed(seed)
        self._streams = {}

    def __getitem__(self, e: int) -> np.random.Generator:
        g = self._streams.get(e)
        if g is None:
            g = self._streams[e] = element_stream(self.seed, e)
        return g


def derive_seed(base_seed: int, *labels) -> int:
    """``base_seed XOR blake2b(labels)`` truncated to 64 bits; stable across processes."""
    digest = hashlib.blake2b(repr(labels).encode(), digest_size=8).digest()
    return check_seed(base_seed) ^ int.from_bytes(digest, "little")
