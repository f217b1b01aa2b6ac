"""Long-range coupling sequences and their tail fits."""

from .constructions import fourier_couplings, power_law_couplings, spitzer_couplings
from .tail_fit import tail_exponent_fit
from .walk_derived import (
    bessel_couplings,
    grid_bessel_couplings,
    negative_binomial_weights,
    time_split_weights,
)

__all__ = [
    'spitzer_couplings',
    'power_law_couplings',
    'fourier_couplings',
    'bessel_couplings',
    'grid_bessel_couplings',
    'time_split_weights',
    'negative_binomial_weights',
    'tail_exponent_fit',
]
