"""Finite lattice domains, conductances and conditioning sets."""

from .conditioning import ConditioningSet, fractal_set, line_set, strip_set
from .conductances import conductance_field
from .domains import LatticeDomain, build_domain

__all__ = [
    'LatticeDomain',
    'build_domain',
    'conductance_field',
    'ConditioningSet',
    'line_set',
    'strip_set',
    'fractal_set',
]
