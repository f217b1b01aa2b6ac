"""Least-squares fits shared by the exponent and scaling diagnostics."""

from dataclasses import dataclass

import numpy as np
from sklearn.linear_model import LinearRegression


@dataclass(frozen=True)
class LineFit:
    """Result of an ordinary least-squares line fit."""

    slope: float
    intercept: float
    residual: float
    n_points: int


def affine_fit(x: np.ndarray, y: np.ndarray) -> LineFit:
    """
    Fit ``y ≈ slope * x + intercept``.

    The residual is the largest relative deviation ``|y - ŷ| / |ŷ|``.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("x and y must be 1-D arrays of equal length")
    if x.size < 2:
        raise ValueError(f"Need at least 2 points for a line fit, got {x.size}")

    model = LinearRegression().fit(x.reshape(-1, 1), y)
    predicted = model.predict(x.reshape(-1, 1))
    residual = float(np.max(np.abs(y - predicted) / np.abs(predicted)))
    return LineFit(
        slope=float(model.coef_[0]),
        intercept=float(model.intercept_),
        residual=residual,
        n_points=int(x.size),
    )


def loglog_fit(x: np.ndarray, y: np.ndarray) -> LineFit:
    """
    Fit ``log y ≈ slope * log x + intercept``.

    The residual is measured on the original scale: the largest relative
    deviation of ``y`` from ``exp(intercept) * x**slope``.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x <= 0) or np.any(y <= 0):
        raise ValueError("log-log fit needs strictly positive data")

    log_x = np.log(x)
    log_y = np.log(y)
    model = LinearRegression().fit(log_x.reshape(-1, 1), log_y)
    predicted = np.exp(model.predict(log_x.reshape(-1, 1)))
    residual = float(np.max(np.abs(y - predicted) / predicted))
    return LineFit(
        slope=float(model.coef_[0]),
        intercept=float(model.intercept_),
        residual=residual,
        n_points=int(x.size),
    )


def geometric_points(r_min: int, r_max: int, per_octave: int = 8) -> np.ndarray:
    """Distinct integers spaced geometrically between ``r_min`` and ``r_max``."""
    if r_min < 1 or r_max <= r_min:
        raise ValueError(f"Invalid window [{r_min}, {r_max}]")
    octaves = np.log2(r_max / r_min)
    count = max(2, int(np.ceil(octaves * per_octave)) + 1)
    points = np.unique(np.rint(np.geomspace(r_min, r_max, count)).astype(np.int64))
    return points
