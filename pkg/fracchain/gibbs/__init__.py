"""Constrained Gibbs measures: heat-bath sampling, exact enumeration and effective temperatures."""

from .enumeration import EnumerationResult, exact_enumeration, ginibre_sandwich, regev_monotonicity
from .experiment import effective_beta, gaussian_pairing_variance, run_experiment
from .heat_bath import SamplerState, heat_bath_sweep, sample_discrete_gaussian
from .model import GibbsModel, ObservableSpec

__all__ = [
    'GibbsModel',
    'ObservableSpec',
    'SamplerState',
    'heat_bath_sweep',
    'sample_discrete_gaussian',
    'exact_enumeration',
    'EnumerationResult',
    'ginibre_sandwich',
    'regev_monotonicity',
    'run_experiment',
    'effective_beta',
    'gaussian_pairing_variance',
]
