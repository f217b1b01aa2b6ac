"""
Reference covariances of fractional Brownian motion.

The Dirichlet-interval covariance on (−1, 1) is known up to a constant
k(H), which is left at 1 here; comparisons with chains fit it away.
"""

import logging
import math
from typing import Optional

import numpy as np
from scipy.integrate import quad
from scipy.special import hyp2f1

from ..exceptions import QuadratureError
from ..fields.conformal import slit_log_covariance

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-12
METHODS = ("quad", "hypergeometric")


def _check_hurst(H: float, upper: float = 1.0):
    if not 0.0 < H < upper:
        raise ValueError(f"H must lie in (0, {upper:g}), got {H}")


def fbm_cov_free(H: float, s, t):
    """
    Cov(B_s, B_t) = ½(|s|^{2H} + |t|^{2H} − |s−t|^{2H}) for fBm pinned at 0.

    Works elementwise on arrays.
    """
    _check_hurst(H)
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    h2 = 2.0 * H
    out = 0.5 * (np.abs(s) ** h2 + np.abs(t) ** h2 - np.abs(s - t) ** h2)
    return out if out.ndim else float(out)


def _integrate(f, a: float, b: float, tol: float) -> float:
    out = quad(f, a, b, epsabs=tol, epsrel=tol, limit=200, full_output=1)
    if len(out) > 3:
        raise QuadratureError(f"quad did not converge on [{a:g}, {b:g}]: {out[3]}")
    return float(out[0])


def blumenthal_integral(H: float, U: float, tol: float = DEFAULT_TOLERANCE) -> float:
    """
    ∫_0^U (v+1)^{−½} v^{H−½} dv by adaptive quadrature.

    On [0, min(U, 1)] the substitution w = v^{H+½} turns the endpoint
    singularity into a smooth integrand. On [1, U] the integrand is
    v^{H−1} plus a remainder of order v^{H−2}; the first part is exact and the
    remainder is integrated in z = v^{−(1−H)}.
    """
    if U < 0:
        raise ValueError(f"Upper limit must be >= 0, got {U}")
    if U == 0:
        return 0.0
    p = H + 0.5

    def near(w):
        return (1.0 + w ** (1.0 / p)) ** -0.5 / p

    total = _integrate(near, 0.0, min(U, 1.0) ** p, tol)
    if U <= 1.0:
        return total

    q = 1.0 - H

    def remainder(z):
        y = z ** (1.0 / q)
        root = math.sqrt(1.0 + y)
        return -1.0 / (q * root * (1.0 + root))

    total += (U ** H - 1.0) / H
    total += _integrate(remainder, U ** (-q), 1.0, tol)
    return total


def _upper_limit(x, y):
    return (1.0 - x ** 2) * (1.0 - y ** 2) / (x - y) ** 2


def fbm_cov_dirichlet(H: float, beta: float, x: float, y: float, tol: float = DEFAULT_TOLERANCE) -> float:
    """
    Covariance shape of fBm on (−1, 1) with Dirichlet boundary values.

    (1/β)|x−y|^{2H} ∫_0^U (v+1)^{−½} v^{H−½} dv with
    U = (1−x²)(1−y²)/|x−y|², and k(H) = 1. At x = y the value is the limit
    (1−x²)^{2H}/(Hβ).

    Args:
        H: Hurst index in (0, ½)
        beta: Inverse temperature
        x, y: Points of (−1, 1)
        tol: Absolute and relative quadrature tolerance

    Raises:
        QuadratureError: quad reports non-convergence
    """
    _check_hurst(H, 0.5)
    if beta <= 0:
        raise ValueError(f"beta must be > 0, got {beta}")
    if not (-1.0 < x < 1.0 and -1.0 < y < 1.0):
        raise ValueError(f"Points must lie in (-1, 1), got ({x}, {y})")
    if x == y:
        return (1.0 - x * x) ** (2.0 * H) / (H * beta)
    gap = abs(x - y)
    return gap ** (2.0 * H) * blumenthal_integral(H, _upper_limit(x, y), tol) / beta


def _hypergeometric_integral(H: float, U: np.ndarray) -> np.ndarray:
    p = H + 0.5
    return U ** p / p * hyp2f1(0.5, p, p + 1.0, -U)


def dirichlet_covariance_matrix(
    H: float,
    t_grid: np.ndarray,
    beta: float = 1.0,
    method: str = "hypergeometric",
    tol: float = DEFAULT_TOLERANCE,
) -> np.ndarray:
    """
    Dirichlet-fBm covariance shape on a grid of (−1, 1).

    Args:
        H: Hurst index in (0, ½)
        t_grid: Grid points
        beta: Inverse temperature
        method: 'hypergeometric' (vectorised closed form) or 'quad'
        tol: Quadrature tolerance for method='quad'

    Returns:
        Symmetric matrix of shape (len(t_grid), len(t_grid))
    """
    if method not in METHODS:
        raise ValueError(f"Unknown method: {method}. Use 'hypergeometric' or 'quad'")
    _check_hurst(H, 0.5)
    if beta <= 0:
        raise ValueError(f"beta must be > 0, got {beta}")
    t = np.asarray(t_grid, dtype=float)
    if np.any(np.abs(t) >= 1.0):
        raise ValueError("Grid points must lie in (-1, 1)")

    size = t.size
    out = np.empty((size, size))
    diagonal = (1.0 - t ** 2) ** (2.0 * H) / (H * beta)
    if method == "quad":
        for i in range(size):
            out[i, i] = diagonal[i]
            for j in range(i + 1, size):
                out[i, j] = out[j, i] = fbm_cov_dirichlet(H, beta, t[i], t[j], tol)
        return out

    i, j = np.triu_indices(size, k=1)
    U = _upper_limit(t[i], t[j])
    values = np.abs(t[i] - t[j]) ** (2.0 * H) * _hypergeometric_integral(H, U) / beta
    if not np.all(np.isfinite(values)):
        raise QuadratureError("Hypergeometric evaluation returned non-finite values")
    out[i, j] = values
    out[j, i] = values
    out[np.diag_indices(size)] = diagonal
    return out


def log_covariance_matrix(t_grid: np.ndarray, beta: float = 1.0, diagonal: Optional[float] = None) -> np.ndarray:
    """
    H = 0 target: the slit-plane Green function restricted to (−1, 1).

    The diagonal is infinite in the continuum; it is set to ``diagonal`` (NaN
    by default), so fits should exclude it.
    """
    t = np.asarray(t_grid, dtype=float)
    x, y = np.meshgrid(t, t, indexing="ij")
    off = x != y
    out = np.full(x.shape, np.nan if diagonal is None else diagonal)
    out[off] = slit_log_covariance(x[off], y[off]) / beta
    return out
