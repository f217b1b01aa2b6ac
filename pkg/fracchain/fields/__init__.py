"""Gaussian fields: precision operators, Green functions and shift functions."""

from .conformal import conformal_radius, log_green_prediction, slit_log_covariance
from .diagnostics import boundary_exponent, quadratic_form_band, variance_profile, variance_scaling
from .green import (
    GreenSolver,
    GreenTable,
    boundary_profile,
    green_solve,
    green_solve_many,
    smoothed_vs_slit_ratio,
    trace_identity_check,
)
from .precision import (
    PrecisionOperator,
    chain_covariance,
    chain_precision,
    long_range_2d_precision,
    nearest_neighbour_precision,
    sample_gaussian,
)
from .shift import ShiftFunction, gradient_decay, shift_and_line_energy

__all__ = [
    'PrecisionOperator',
    'chain_precision',
    'chain_covariance',
    'nearest_neighbour_precision',
    'long_range_2d_precision',
    'sample_gaussian',
    'GreenSolver',
    'GreenTable',
    'green_solve',
    'green_solve_many',
    'trace_identity_check',
    'boundary_profile',
    'smoothed_vs_slit_ratio',
    'ShiftFunction',
    'shift_and_line_energy',
    'gradient_decay',
    'conformal_radius',
    'log_green_prediction',
    'slit_log_covariance',
    'variance_profile',
    'variance_scaling',
    'boundary_exponent',
    'quadratic_form_band',
]
