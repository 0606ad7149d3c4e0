"""Utilities package for molentangle.

Provides reproducible random streams and an order-preserving parallel map.
"""

from molentangle.utils.parallel import ordered_map
from molentangle.utils.rng import Stream, trial_rng


__all__ = [
    "Stream",
    "ordered_map",
    "trial_rng",
]
