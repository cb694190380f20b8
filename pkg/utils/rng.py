"""
Seeded random streams.

One root seed drives a run. Every consumer (a trial, a drift path, a chain)
gets its own generator from ``derive_stream(seed, *key)``. The derivation
feeds the key into numpy's SeedSequence spawn key, so a given
(seed, key) always yields the same PCG64 stream, independent of how many
other streams exist or in which order they are created.
"""

from typing import Union

import numpy as np

# Spawn-key namespaces; the first key element says what a stream is for.
TRIAL_STREAM = 0
DRIFT_STREAM = 1
CHAIN_STREAM = 2
SAMPLER_STREAM = 3
PHASE_STREAM = 4

SeedLike = Union[int, np.integer]


def check_seed(seed: SeedLike) -> int:
    """Return ``seed`` as a Python int in [0, 2**64)."""
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def derive_stream(seed: SeedLike, *key: int) -> np.random.Generator:
    """
    Build the generator for one consumer of a run.

    Args:
        seed: Root seed of the run.
        *key: Non-negative integers naming the consumer, e.g.
            ``(TRIAL_STREAM, batch, trial_index)``.

    Returns:
        An independent PCG64 generator.
    """
    sequence = np.random.SeedSequence(check_seed(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(sequence))


def trial_stream(seed: SeedLike, trial_index: int, batch: int = 0) -> np.random.Generator:
    """Stream for trial ``trial_index`` of batch ``batch``."""
    return derive_stream(seed, TRIAL_STREAM, batch, trial_index)
