# src/molentangle/utils/rng.py

"""Reproducible random streams.

Every random draw in a run comes from a generator keyed by
``(seed, stream, index)``. Trials never share a generator, so a trial's
outcome does not depend on evaluation order or on the worker it ran in.
"""

from enum import IntEnum

import numpy as np


class Stream(IntEnum):
    TRIAL = 0  # per-trial noise and measurements
    HERALD = 1  # per-herald-round molecule draws and pump detections
    CAMPAIGN = 2  # phase re-draws in the campaign loop
    BOOTSTRAP = 3  # per-resample bootstrap draws
    SCAN = 4  # comb lineshape shots


def trial_rng(
    seed: int, index: int, stream: Stream = Stream.TRIAL
) -> np.random.Generator:
    """Generator for one (stream, index) pair of a seeded run."""
    if seed < 0 or index < 0:
        msg = f"seed and index must be non-negative, got seed={seed} index={index}"
        raise ValueError(msg)
    sequence = np.random.SeedSequence(entropy=seed, spawn_key=(int(stream), index))
    return np.random.default_rng(sequence)
