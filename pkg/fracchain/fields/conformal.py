"""Continuum reference values: conformal radii and logarithmic covariances."""

import logging
import math
from typing import Tuple

import numpy as np
from scipy import sparse
from scipy.interpolate import RectBivariateSpline
from scipy.sparse.linalg import spsolve

logger = logging.getLogger(__name__)

EULER_GAMMA = 0.5772156649015329


def conformal_radius(w: Tuple[float, float], resolution: int = 128) -> float:
    """
    Conformal radius of the square (−1, 1)² seen from ``w``.

    log r_D(w) = H(w), where H is harmonic in the square with boundary values
    log|z − w|. H is computed with the five-point scheme on a grid of spacing
    1/resolution and interpolated bicubically when ``w`` is off the grid.

    Args:
        w: Interior point
        resolution: Grid points per unit length

    Returns:
        r_D(w)
    """
    wx, wy = float(w[0]), float(w[1])
    if not (abs(wx) < 1 and abs(wy) < 1):
        raise ValueError(f"w must lie inside (−1, 1)², got {w}")
    if resolution < 4:
        raise ValueError(f"resolution must be >= 4, got {resolution}")

    m = int(resolution)
    grid = np.linspace(-1.0, 1.0, 2 * m + 1)
    inner = grid[1:-1]
    k = inner.size

    def boundary(x, y):
        return 0.5 * np.log((x - wx) ** 2 + (y - wy) ** 2)

    # 5-point Laplacian on the interior, Dirichlet data moved to the right-hand side
    T = sparse.diags([-np.ones(k - 1), 2.0 * np.ones(k), -np.ones(k - 1)], [-1, 0, 1])
    I = sparse.identity(k)
    L = (sparse.kron(T, I) + sparse.kron(I, T)).tocsc()

    rhs = np.zeros((k, k))
    rhs[0, :] += boundary(-1.0, inner)
    rhs[-1, :] += boundary(1.0, inner)
    rhs[:, 0] += boundary(inner, -1.0)
    rhs[:, -1] += boundary(inner, 1.0)

    H = spsolve(L, rhs.ravel()).reshape(k, k)
    full = np.zeros((2 * m + 1, 2 * m + 1))
    full[1:-1, 1:-1] = H
    full[0, :] = boundary(-1.0, grid)
    full[-1, :] = boundary(1.0, grid)
    full[:, 0] = boundary(grid, -1.0)
    full[:, -1] = boundary(grid, 1.0)

    spline = RectBivariateSpline(grid, grid, full, kx=3, ky=3)
    log_radius = float(spline(wx, wy)[0, 0])
    logger.debug(f"Conformal radius at {w}: {math.exp(log_radius):.6f} (m={m})")
    return math.exp(log_radius)


def square_centre_conformal_radius() -> float:
    """Exact conformal radius of (−1, 1)² at the origin, 8√π / Γ(1/4)²."""
    return 8.0 * math.sqrt(math.pi) / math.gamma(0.25) ** 2


def log_green_prediction(n: int, r_D: float) -> float:
    """
    Asymptotic G(x, x) of simple random walk killed outside n·D at x = n·w.

    (2/π)(log(n·r_D(w)) + γ_EM + ½ log 8).
    """
    if n < 1 or r_D <= 0:
        raise ValueError(f"Need n >= 1 and r_D > 0, got n={n}, r_D={r_D}")
    return (2.0 / math.pi) * (math.log(n * r_D) + EULER_GAMMA + 0.5 * math.log(8.0))


def slit_log_covariance(x, y) -> np.ndarray:
    """
    Green function of the plane slit along ℝ \\ (−1, 1), restricted to (−1, 1).

    (1/2π) log((a + b)/|a − b|) with a = √((1+x)/(1−x)), b likewise for y.
    The diagonal is infinite.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(np.abs(x) >= 1) or np.any(np.abs(y) >= 1):
        raise ValueError("Points must lie in (−1, 1)")
    a = np.sqrt((1.0 + x) / (1.0 - x))
    b = np.sqrt((1.0 + y) / (1.0 - y))
    with np.errstate(divide="ignore"):
        return np.log((a + b) / np.abs(a - b)) / (2.0 * math.pi)
