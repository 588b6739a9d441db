"""Finite-window engine for localization relations between sets of naturals
and block families, largeness transfer, witness constructions, creatures
with nice norms, and exact measure arithmetic for a random name."""

from .errors import FinlocError
from .finsets import BlockFamily, IntervalPartition, WSet, in_P_k, intervals_of, mu

__version__ = "0.1.0"

__all__ = [
    "BlockFamily",
    "FinlocError",
    "IntervalPartition",
    "WSet",
    "in_P_k",
    "intervals_of",
    "mu",
    "__version__",
]
