"""Closed-form and quadrature coupling sequences."""

import logging
import math

import numpy as np
from scipy.special import gammaln, zeta

from ..config import Config
from ..exceptions import QuadratureError
from ..models import CouplingSequence, CouplingSource

logger = logging.getLogger(__name__)


def spitzer_couplings(R: int) -> CouplingSequence:
    """
    Return-site law of the simple random walk on the diamond graph.

    J(k) = 2 / (π(4k² − 1)) for k != 0 and J(0) = 1 − 2/π. The omitted mass
    telescopes: 2 Σ_{r>R} J(r) = 2 / (π(2R + 1)).
    """
    if R < 1:
        raise ValueError(f"Radius must be >= 1, got {R}")
    r = np.arange(1, R + 1, dtype=float)
    values = 2.0 / (np.pi * (4.0 * r ** 2 - 1.0))
    return CouplingSequence(
        alpha=2.0,
        values=values,
        source=CouplingSource.SPITZER,
        one_sided_mass=1.0 / np.pi,
        truncation_error=2.0 / (np.pi * (2 * R + 1)),
        mass_at_zero=1.0 - 2.0 / np.pi,
    )


def power_law_couplings(alpha: float, R: int) -> CouplingSequence:
    """J(r) = r^(−alpha), with Hurwitz-zeta tail sums."""
    if alpha <= 1:
        raise ValueError(f"Power-law couplings need alpha > 1, got {alpha}")
    if R < 1:
        raise ValueError(f"Radius must be >= 1, got {R}")
    r = np.arange(1, R + 1, dtype=float)
    return CouplingSequence(
        alpha=alpha,
        values=r ** (-alpha),
        source=CouplingSource.POWER_LAW,
        one_sided_mass=float(zeta(alpha)),
        truncation_error=2.0 * float(zeta(alpha, R + 1)),
    )


def fourier_zero_mode(u: float) -> float:
    """(1/2π) ∫ (1 − cos θ)^u dθ = 2^u Γ(u + 1/2) / (√π Γ(u + 1))."""
    return math.exp(u * math.log(2.0) + gammaln(u + 0.5) - 0.5 * math.log(math.pi) - gammaln(u + 1.0))


def fourier_couplings(
    u: float,
    R: int,
    quadrature_points: int = Config.FOURIER_QUADRATURE_POINTS,
    tolerance: float = 1e-10,
) -> CouplingSequence:
    """
    Couplings of the Fourier fractional Laplacian with symbol (1 − cos θ)^u.

    J(r) = −(1/2π) ∫_{−π}^{π} (1 − cos θ)^u cos(rθ) dθ, evaluated with the
    periodic trapezoid rule on ``quadrature_points`` nodes through a real FFT.
    The cusp of the symbol at θ = 0 limits the rule to an aliasing error of
    order N^(−(2u+1)), reported as ``pointwise_error``.

    Args:
        u: Fractional power in (0, 1]
        R: Number of couplings to keep
        quadrature_points: Trapezoid nodes (>= 2^12)
        tolerance: Largest negative value tolerated before declaring failure

    Returns:
        CouplingSequence with alpha = 2u + 1
    """
    if not 0 < u <= 1:
        raise ValueError(f"Fourier couplings need u in (0, 1], got {u}")
    if quadrature_points < Config.MIN_QUADRATURE_POINTS:
        raise ValueError(
            f"quadrature_points must be >= {Config.MIN_QUADRATURE_POINTS}, got {quadrature_points}"
        )
    if R < 1 or R >= quadrature_points // 2:
        raise ValueError(f"Radius must be in [1, {quadrature_points // 2}), got {R}")

    theta = 2.0 * np.pi * np.arange(quadrature_points) / quadrature_points
    symbol = (1.0 - np.cos(theta)) ** u
    coefficients = np.fft.rfft(symbol).real / quadrature_points
    values = -coefficients[1: R + 1]

    worst = float(values.min())
    if worst < -tolerance:
        raise QuadratureError(
            f"Negative Fourier coupling {worst:.3e} (u={u}, N={quadrature_points})"
        )
    values = np.maximum(values, 0.0)

    c0 = fourier_zero_mode(u)
    aliasing = 2.0 * abs(coefficients[quadrature_points // 2])
    truncation = max(c0 - 2.0 * float(np.sum(values)), 0.0)
    logger.debug(f"Fourier couplings u={u}: zero mode {c0:.12f}, aliasing {aliasing:.2e}")

    return CouplingSequence(
        alpha=2.0 * u + 1.0,
        values=values,
        source=CouplingSource.FOURIER,
        one_sided_mass=c0 / 2.0,
        truncation_error=truncation,
        pointwise_error=aliasing,
        metadata={"u": u, "quadrature_points": quadrature_points, "zero_mode": c0},
    )
