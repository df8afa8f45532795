"""Majority-surviving policy proposals for binary approval profiles."""

from anscombe.core import (
    NormalizationRecord,
    Policy,
    Profile,
    Tally,
    denormalize_policy,
    hamming,
    iwm,
    normalize,
    tally,
    voter_balance,
)
from anscombe.solvers import brute_force, derandomized_solve, randomized_solve

__all__ = [
    "NormalizationRecord",
    "Policy",
    "Profile",
    "Tally",
    "brute_force",
    "denormalize_policy",
    "derandomized_solve",
    "hamming",
    "iwm",
    "normalize",
    "randomized_solve",
    "tally",
    "voter_balance",
]

__version__ = "0.1.0"
