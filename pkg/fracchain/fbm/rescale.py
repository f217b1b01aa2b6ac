"""Rescaling of chain fields to (−1, 1) and one-scalar shape fits."""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from ..models import ShapeFit

logger = logging.getLogger(__name__)

TestFunction = Union[Callable[[np.ndarray], np.ndarray], np.ndarray]


@dataclass
class RescaledField:
    """
    A chain sample or covariance on the grid t = i/n, |i| < n.

    ``values`` is 1-D for a sample and square for a covariance.
    """

    t: np.ndarray
    values: np.ndarray
    n: int
    H: float

    @property
    def is_covariance(self) -> bool:
        return self.values.ndim == 2

    def _weights(self, f: TestFunction) -> np.ndarray:
        weights = f(self.t) if callable(f) else np.asarray(f, dtype=float)
        if weights.shape != self.t.shape:
            raise ValueError(f"Test function must have {self.t.size} values, got {weights.shape}")
        return weights / self.n

    def pairing(self, f: TestFunction) -> float:
        """Riemann sum Σ φ̄(t) f(t) / n."""
        if self.is_covariance:
            raise ValueError("pairing needs a sample; use pairing_variance for covariances")
        return float(self.values @ self._weights(f))

    def pairing_variance(self, f: TestFunction) -> float:
        """Var of the Riemann-sum pairing under the rescaled covariance."""
        if not self.is_covariance:
            raise ValueError("pairing_variance needs a covariance")
        w = self._weights(f)
        return float(w @ self.values @ w)


def rescale_chain_field(obj: np.ndarray, n: int, H: float) -> RescaledField:
    """
    φ̄(t) = n^{−H} φ(nt) on the sites |i| < n of a chain on {−n..n}.

    Args:
        obj: Sample of length 2n+1 or covariance of shape (2n+1, 2n+1)
        n: Chain half-width (>= 2)
        H: Hurst index (0 leaves amplitudes unchanged)

    Returns:
        RescaledField on t = i/n
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    values = np.asarray(obj, dtype=float)
    size = 2 * n + 1
    keep = slice(1, size - 1)
    t = np.arange(-(n - 1), n) / n
    if values.shape == (size,):
        return RescaledField(t=t, values=values[keep] * n ** (-H), n=n, H=H)
    if values.shape == (size, size):
        return RescaledField(t=t, values=values[keep, keep] * n ** (-2.0 * H), n=n, H=H)
    raise ValueError(f"Expected a chain object on {size} sites, got shape {values.shape}")


def bulk_mask(t_grid: np.ndarray, bulk: float = 0.8, include_diagonal: bool = True) -> np.ndarray:
    t = np.asarray(t_grid, dtype=float)
    inside = np.abs(t) <= bulk
    mask = inside[:, None] & inside[None, :]
    if not include_diagonal:
        mask &= ~np.eye(t.size, dtype=bool)
    return mask


def shape_fit(
    empirical: np.ndarray,
    target: np.ndarray,
    t_grid: np.ndarray,
    beta: float = 1.0,
    bulk: float = 0.8,
    include_diagonal: bool = True,
) -> ShapeFit:
    """
    Fit empirical ≈ (K²/β)·target on bulk entries.

    The scale c = ⟨E, T⟩ / ⟨T, T⟩ is the least-squares optimum, K = √(c·β),
    and the residual is max |E − cT| / |cT| over the bulk.

    Args:
        empirical: Covariance on ``t_grid``
        target: Unit-temperature target shape on ``t_grid``
        t_grid: Grid points
        beta: Inverse temperature of the empirical field
        bulk: Entries with |x|, |y| <= bulk are used
        include_diagonal: Whether diagonal entries enter the fit

    Raises:
        ValueError: shapes differ, or the target is zero or non-finite on the bulk
    """
    empirical = np.asarray(empirical, dtype=float)
    target = np.asarray(target, dtype=float)
    if empirical.shape != target.shape:
        raise ValueError(f"Shape mismatch: {empirical.shape} vs {target.shape}")
    if empirical.shape != (len(t_grid), len(t_grid)):
        raise ValueError("Covariances must be square on t_grid")

    mask = bulk_mask(t_grid, bulk, include_diagonal)
    E = empirical[mask]
    T = target[mask]
    if T.size == 0:
        raise ValueError(f"No grid entries inside the bulk |t| <= {bulk}")
    if not np.all(np.isfinite(T)) or np.any(T == 0):
        raise ValueError("Degenerate target: zero or non-finite entries in the bulk")
    norm = float(T @ T)
    c = float(E @ T) / norm
    if c <= 0:
        raise ValueError(f"Fitted scale is not positive ({c:.3e})")
    fitted = c * T
    residual = float(np.max(np.abs(E - fitted) / np.abs(fitted)))
    logger.debug(f"Shape fit: c={c:.4e}, residual={residual:.3%} over {T.size} entries")
    return ShapeFit(K=math.sqrt(c * beta), scale=c, residual=residual, n_entries=int(T.size))
