"""Counter-based random substreams.

Every random quantity is addressed by a 128-bit Philox key derived from the
64-bit master seed plus integer tags, and a counter whose high words carry
the trial index and a stream tag. Output never depends on scheduling.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1

# stream tags
CHANNEL = 0
PROFILES = 1
HARDENING = 2


def derive_seed(master_seed: int, *tags: int) -> int:
    """Mix ``master_seed`` and non-negative integer tags into a 128-bit key."""
    if not 0 <= master_seed <= MASK64:
        raise ValueError(f"master seed must be an unsigned 64-bit value, got {master_seed}")
    words = np.random.SeedSequence(master_seed, spawn_key=tuple(int(t) for t in tags)).generate_state(
        2, np.uint64)
    return int(words[0]) | (int(words[1]) << 64)


def trial_generator(key: int, trial: int, stream: int = 0) -> np.random.Generator:
    """Generator for one trial; disjoint from every other (trial, stream)."""
    return np.random.Generator(np.random.Philox(key=key, counter=[0, 0, trial, stream]))


def generator(master_seed: int, *tags: int) -> np.random.Generator:
    return trial_generator(derive_seed(master_seed, *tags), 0)
