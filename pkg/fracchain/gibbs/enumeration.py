"""
Brute-force oracle for small constrained Gaussian models.

Unconstrained sites are integrated out through the Schur complement; the
constrained marginal is summed exactly over a window of lattice points
(integer models) or of Fourier modes (sine-Gordon models).
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy import linalg
from scipy.special import ive, logsumexp

from ..config import Config
from ..exceptions import WindowTooSmallError
from ..fields.precision import PrecisionOperator
from .model import GibbsModel

logger = logging.getLogger(__name__)

MAX_SITES = 8
MAX_WINDOW = 6


@dataclass
class EnumerationResult:
    """Exact moments of a small model."""

    covariance: np.ndarray
    laplace: Dict[str, float] = field(default_factory=dict)
    log_partition: float = 0.0
    tail_bound: float = 0.0
    n_configurations: int = 0

    def variance(self, i: int) -> float:
        return float(self.covariance[i, i])

    def pairing_variance(self, g: np.ndarray) -> float:
        g = np.asarray(g, dtype=float)
        return float(g @ self.covariance @ g)


def _configurations(m: int, K: int, chunk: int):
    """Chunks of [−K, K]^m, one configuration per row."""
    side = 2 * K + 1
    total = side ** m
    for start in range(0, total, chunk):
        flat = np.arange(start, min(start + chunk, total))
        yield np.stack(np.unravel_index(flat, (side,) * m), axis=1) - K


def _blocks(Q: np.ndarray, S: np.ndarray):
    G = np.setdiff1d(np.arange(Q.shape[0]), S)
    Q_SS = Q[np.ix_(S, S)]
    if G.size == 0:
        return G, Q_SS, None, np.zeros((0, S.size))
    Q_GG = Q[np.ix_(G, G)]
    Q_GS = Q[np.ix_(G, S)]
    Q_GG_inv = linalg.inv(Q_GG)
    B = -Q_GG_inv @ Q_GS
    schur = Q_SS + Q_GS.T @ B
    return G, 0.5 * (schur + schur.T), Q_GG_inv, B


def _integer_moments(schur: np.ndarray, spacing: float, K: int, directions: np.ndarray):
    """log Z, E[ψψᵀ] and log E[e^{⟨d, ψ⟩}] for each direction d, on ψ ∈ v·[−K, K]^m."""
    m = schur.shape[0]
    log_terms: List[float] = []
    log_laplace: List[List[float]] = [[] for _ in range(len(directions))]
    second = np.zeros((m, m))
    # second is accumulated relative to exp(ref)
    ref = -np.inf
    for block in _configurations(m, K, Config.ENUMERATION_CHUNK):
        psi = block * spacing
        log_w = -0.5 * np.einsum("ki,ij,kj->k", psi, schur, psi)
        log_terms.append(float(logsumexp(log_w)))
        for d, direction in enumerate(directions):
            log_laplace[d].append(float(logsumexp(log_w + psi @ direction)))
        top = float(log_w.max())
        if top > ref:
            second *= math.exp(ref - top) if np.isfinite(ref) else 0.0
            ref = top
        weights = np.exp(log_w - ref)
        second += (psi * weights[:, None]).T @ psi

    log_Z = float(logsumexp(log_terms))
    second /= math.exp(log_Z - ref)
    laplace = [float(logsumexp(terms) - log_Z) for terms in log_laplace]
    return log_Z, second, laplace


def _sine_gordon_moments(schur: np.ndarray, spacing: float, lam: float, K: int, directions: np.ndarray):
    """Moments of exp(−½ψᵀQ̃ψ + λΣcos(κψ)) through its Fourier expansion in modes [−K, K]^m."""
    C = linalg.inv(schur)
    kappa = 2.0 * math.pi / spacing
    m = schur.shape[0]
    S0 = 0.0
    weighted_outer = np.zeros((m, m))
    laplace_sums = np.zeros(len(directions))
    Cd = directions @ C if len(directions) else np.zeros((0, m))
    for block in _configurations(m, K, Config.ENUMERATION_CHUNK):
        Cq = block @ C
        w = np.prod(ive(np.abs(block), lam), axis=1) * np.exp(-0.5 * kappa ** 2 * np.einsum("ki,ki->k", block, Cq))
        S0 += float(w.sum())
        weighted_outer += (Cq * w[:, None]).T @ Cq
        if len(directions):
            laplace_sums += (np.cos(kappa * block @ Cd.T) * w[:, None]).sum(axis=0)

    second = C - kappa ** 2 * weighted_outer / S0
    laplace = [
        0.5 * float(d @ C @ d) + math.log(max(laplace_sums[i] / S0, np.finfo(float).tiny))
        for i, d in enumerate(directions)
    ]
    return math.log(S0), second, laplace


def exact_enumeration(
    model: GibbsModel,
    K: int,
    laplace_vectors: Optional[Dict[str, np.ndarray]] = None,
    tolerance: Optional[float] = None,
) -> EnumerationResult:
    """
    Exact covariance and Laplace transforms of a small model.

    Args:
        model: Gibbs model with at most 8 constrained sites (dense precision)
        K: Window half-width in lattice points (or Fourier modes), at most 6
        laplace_vectors: Named vectors a over all sites; E[e^{⟨a, φ⟩}] is returned
        tolerance: Largest accepted window-tail bound (default: Config.ENUMERATION_TAIL_TOL)

    Returns:
        EnumerationResult

    Raises:
        WindowTooSmallError: the Gaussian-domination tail bound exceeds tolerance
    """
    laplace_vectors = laplace_vectors or {}
    S = model.conditioned_indices if model.kind != "gaussian" else np.empty(0, dtype=np.int64)
    m = int(S.size)
    if m > MAX_SITES:
        raise ValueError(f"Enumeration supports at most {MAX_SITES} constrained sites, got {m}")
    if not 0 <= K <= MAX_WINDOW:
        raise ValueError(f"Window half-width must be in [0, {MAX_WINDOW}], got {K}")
    Q = model.precision.dense()
    names = list(laplace_vectors)
    vectors = [np.asarray(laplace_vectors[k], dtype=float) for k in names]

    if m == 0:
        cov = linalg.inv(Q)
        laplace = {k: math.exp(0.5 * float(a @ cov @ a)) for k, a in zip(names, vectors)}
        return EnumerationResult(covariance=0.5 * (cov + cov.T), laplace=laplace)

    G, schur, Q_GG_inv, B = _blocks(Q, S)
    C = linalg.inv(schur)
    if model.kind == "integer":
        tail = 2.0 * m * math.exp(-(((K + 1) * model.spacing) ** 2) / (2.0 * float(np.max(np.diag(C)))))
    else:
        kappa = 2.0 * math.pi / model.spacing
        stiffness = float(np.linalg.eigvalsh(schur).max())
        tail = (2.0 * m * float(ive(K + 1, model.lam) / ive(0, model.lam))
                * math.exp(-0.5 * kappa ** 2 * (K + 1) ** 2 / stiffness))
    limit = Config.ENUMERATION_TAIL_TOL if tolerance is None else tolerance
    if tail > limit:
        raise WindowTooSmallError(f"Window K={K} leaves tail bound {tail:.2e} > {limit:.0e}")

    # Laplace directions seen by the constrained sites, and the Gaussian prefactors
    directions, prefactors = [], []
    for a in vectors:
        a_S, a_G = a[S], a[G]
        if G.size:
            directions.append(a_S + B.T @ a_G)
            prefactors.append(0.5 * float(a_G @ Q_GG_inv @ a_G))
        else:
            directions.append(a_S)
            prefactors.append(0.0)
    directions = np.asarray(directions).reshape(len(vectors), m)

    if model.kind == "integer":
        log_Z, second, log_laplace = _integer_moments(schur, model.spacing, K, directions)
    else:
        log_Z, second, log_laplace = _sine_gordon_moments(schur, model.spacing, model.lam, K, directions)

    cov = np.zeros_like(Q)
    cov[np.ix_(S, S)] = second
    if G.size:
        cross = B @ second
        cov[np.ix_(G, S)] = cross
        cov[np.ix_(S, G)] = cross.T
        cov[np.ix_(G, G)] = Q_GG_inv + B @ second @ B.T
    laplace = {k: math.exp(p + l) for k, p, l in zip(names, prefactors, log_laplace)}

    logger.debug(f"Enumerated {model}: K={K}, tail bound {tail:.2e}")
    return EnumerationResult(
        covariance=0.5 * (cov + cov.T),
        laplace=laplace,
        log_partition=log_Z,
        tail_bound=tail,
        n_configurations=(2 * K + 1) ** m,
    )


def ginibre_sandwich(
    model: GibbsModel,
    vectors: Dict[str, np.ndarray],
    K: int = 5,
    lam: float = 1.0,
) -> List[Dict[str, float]]:
    """
    Laplace transforms of the integer, sine-Gordon and Gaussian versions of ``model``.

    The integer transform is expected below the sine-Gordon one, which is
    expected below the Gaussian one; both gaps are reported as slacks.
    """
    integer = exact_enumeration(model.with_lambda(None), K, vectors)
    sine_gordon = exact_enumeration(model.with_lambda(lam), K, vectors)
    gaussian = exact_enumeration(model.with_lambda(0.0), K, vectors)
    rows = []
    for name in vectors:
        rows.append({
            "vector": name,
            "integer": integer.laplace[name],
            "sine_gordon": sine_gordon.laplace[name],
            "gaussian": gaussian.laplace[name],
            "lower_slack": sine_gordon.laplace[name] - integer.laplace[name],
            "upper_slack": gaussian.laplace[name] - sine_gordon.laplace[name],
        })
    return rows


def regev_monotonicity(
    A: np.ndarray,
    B: np.ndarray,
    vectors: Sequence[np.ndarray],
    K: int = 6,
    spacing: float = 1.0,
) -> List[float]:
    """
    Slacks E_A[⟨v, ψ⟩²] − E_B[⟨v, ψ⟩²] for integer Gaussians with precisions A ≤ B.
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.shape != B.shape or A.shape[0] != A.shape[1]:
        raise ValueError("A and B must be square matrices of the same size")
    if np.linalg.eigvalsh(B - A).min() < -1e-12:
        raise ValueError("B − A must be positive semi-definite")
    sites = np.arange(A.shape[0])
    results = []
    for matrix in (A, B):
        precision = PrecisionOperator(structure="long_range_1d", matrix=matrix, beta=1.0)
        model = GibbsModel(precision, sites, spacing=spacing, lam=None)
        results.append(exact_enumeration(model, K))
    return [results[0].pairing_variance(v) - results[1].pairing_variance(v) for v in vectors]
