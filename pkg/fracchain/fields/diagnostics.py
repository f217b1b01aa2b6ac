"""Scaling diagnostics of Gaussian chains."""

import logging
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np
from tqdm import tqdm

from ..models import CouplingSequence
from ..utils.fitting import LineFit, affine_fit, geometric_points, loglog_fit
from ..utils.rng import make_generator
from .precision import chain_covariance, chain_precision, nearest_neighbour_chain_precision

logger = logging.getLogger(__name__)


def variance_profile(cov: np.ndarray) -> np.ndarray:
    """Site variances, the diagonal of a covariance matrix."""
    cov = np.asarray(cov)
    if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
        raise ValueError(f"Covariance must be square, got shape {cov.shape}")
    return np.diag(cov).copy()


def boundary_exponent(
    variances: np.ndarray,
    window: Optional[Tuple[int, int]] = None,
    per_octave: int = 8,
) -> LineFit:
    """
    Exponent of the near-boundary variance profile of a chain on {−n..n}.

    Var(φ(i)) is fitted against 1 − t² with t = i/(n+1), over sites at
    distance d = n + 1 − i from the right edge with d in ``window``.
    Var ∝ (1 − t²)^(2H) gives slope 2H.
    """
    variances = np.asarray(variances, dtype=float)
    n = (variances.size - 1) // 2
    window = window or (max(2, n // 64), max(4, n // 4))
    d = geometric_points(window[0], window[1], per_octave)
    d = d[d <= n]
    i = n + 1 - d
    t = i / float(n + 1)
    return loglog_fit(1.0 - t ** 2, variances[i + n])


@dataclass
class VarianceScaling:
    """Var(φ_n(0)) over a range of chain sizes, with a log or power fit."""

    n_values: np.ndarray
    variances: np.ndarray
    fit: LineFit
    model: str

    def as_rows(self):
        return [{"n": int(n), "variance": float(v)} for n, v in zip(self.n_values, self.variances)]


def variance_scaling(
    J_factory: Callable[[int], CouplingSequence],
    n_values: Sequence[int],
    beta: float = 1.0,
    model: str = "power",
    show_progress: bool = False,
) -> VarianceScaling:
    """
    Centre variance of the Gaussian chain for each n.

    Args:
        J_factory: Maps n to a coupling sequence with radius >= 2n
        n_values: Chain half-widths
        beta: Inverse temperature
        model: 'log' fits Var ≈ a·log n + b; 'power' fits log Var against log n
        show_progress: Show a progress bar over n

    Returns:
        VarianceScaling
    """
    if model not in ("log", "power"):
        raise ValueError(f"Unknown model: {model}. Use 'log' or 'power'")
    n_values = np.asarray(sorted(n_values), dtype=np.int64)
    iterator = tqdm(n_values, desc="Chain sizes", unit="n") if show_progress else n_values
    variances = []
    for n in iterator:
        cov = chain_covariance(chain_precision(J_factory(int(n)), int(n), beta))
        variances.append(cov[n, n])
    variances = np.asarray(variances)

    if model == "log":
        fit = affine_fit(np.log(n_values), variances)
    else:
        fit = loglog_fit(n_values, variances)
    logger.info(f"📊 Variance scaling ({model}): slope {fit.slope:.4f}, residual {fit.residual:.3e}")
    return VarianceScaling(n_values=n_values, variances=variances, fit=fit, model=model)


def quadratic_form_band(J: CouplingSequence, n: int, n_vectors: int = 100, seed: int = 0) -> Dict[str, float]:
    """
    Rayleigh quotients vᵀQ_J v / vᵀQ_nn v over random vectors.

    Q_nn is the nearest-neighbour chain precision on the same sites. For
    couplings with a finite second moment both forms are comparable; the
    band constant C = max(max ratio, 1 / min ratio) is returned.
    """
    Q = chain_precision(J, n).dense()
    Q_nn = nearest_neighbour_chain_precision(n).dense()
    rng = make_generator(seed)
    vectors = rng.standard_normal((n_vectors, 2 * n + 1))
    # Smooth half of the vectors so low frequencies are probed too
    vectors[n_vectors // 2:] = np.cumsum(vectors[n_vectors // 2:], axis=1)
    ratios = np.einsum("ki,ij,kj->k", vectors, Q, vectors) / np.einsum("ki,ij,kj->k", vectors, Q_nn, vectors)
    low, high = float(ratios.min()), float(ratios.max())
    return {"min_ratio": low, "max_ratio": high, "band_constant": max(high, 1.0 / low)}
