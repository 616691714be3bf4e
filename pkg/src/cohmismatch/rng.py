"""Seeded counter-based random streams.

Every random object in the library is a deterministic function of a 64-bit
seed and an optional tuple of integer stream keys, so ensemble samples can be
generated in any order (or in parallel) and still agree bit for bit.
"""

from __future__ import annotations

import numpy as np

SeedLike = "int | np.random.Generator"


def make_rng(seed, *keys: int) -> np.random.Generator:
    """Philox generator for ``seed`` and substream ``keys``.

    A ``Generator`` passed as ``seed`` is returned unchanged (keys must then
    be empty), which lets callers thread one stream through several draws.
    """
    if isinstance(seed, np.random.Generator):
        if keys:
            raise ValueError("stream keys require an integer seed")
        return seed
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    ss = np.random.SeedSequence(entropy=seed, spawn_key=tuple(int(k) for k in keys))
    return np.random.Generator(np.random.Philox(ss))


def derive_seed(seed: int, *keys: int) -> int:
    """Deterministic 64-bit child seed, used when a sub-object records its own seed."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in keys))
    return int(ss.generate_state(1, dtype=np.uint64)[0])
