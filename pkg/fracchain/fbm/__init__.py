"""Fractional Brownian motion targets and rescaling of chain fields."""

from .covariance import (
    blumenthal_integral,
    dirichlet_covariance_matrix,
    fbm_cov_dirichlet,
    fbm_cov_free,
    log_covariance_matrix,
)
from .rescale import RescaledField, rescale_chain_field, shape_fit

__all__ = [
    'fbm_cov_free',
    'fbm_cov_dirichlet',
    'blumenthal_integral',
    'dirichlet_covariance_matrix',
    'log_covariance_matrix',
    'RescaledField',
    'rescale_chain_field',
    'shape_fit',
]
