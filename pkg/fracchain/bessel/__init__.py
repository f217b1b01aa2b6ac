"""Bessel-type vertical walks: kernel, first-return law and simulators."""

from .first_return import decay_exponent, first_return_law, return_probability_profile
from .kernel import BesselKernel, kernel
from .simulator import WalkSummary, simulate_walk

__all__ = [
    'BesselKernel',
    'kernel',
    'first_return_law',
    'return_probability_profile',
    'decay_exponent',
    'simulate_walk',
    'WalkSummary',
]
