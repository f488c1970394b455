"""Deterministic seed derivation.

All randomness in the toolkit flows from explicit 64-bit seeds through
numpy's PCG64 generator. Independent streams for repeats, grid cells and
restarts are derived with ``SeedSequence`` spawn keys, so results never
depend on execution order or thread scheduling.
"""

from __future__ import annotations

import numpy as np


def seed_sequence(seed: int, *path: int) -> np.random.SeedSequence:
    """Seed sequence for stream ``path`` (e.g. (cell_i, cell_j, repeat))."""
    return np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(p) for p in path))


def derive_rng(seed: int, *path: int) -> np.random.Generator:
    return np.random.default_rng(seed_sequence(seed, *path))


def derive_seed(seed: int, *path: int) -> int:
    """Collapse a stream identity back into a single 64-bit seed."""
    return int(seed_sequence(seed, *path).generate_state(1, np.uint64)[0])
