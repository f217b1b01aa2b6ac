"""
Couplings read off as return-site laws of Bessel walks.

The diamond walk started on the baseline returns to it at a random site; the
law of that site, symmetrised, is the coupling sequence J(r). The grid walk
gives a second construction with the same tail exponent.
"""

import logging
import math
from typing import Optional

import numpy as np
from scipy.special import gammainc, gammaln, zeta
from scipy.stats import binom, nbinom
from tqdm import tqdm

from ..bessel.first_return import first_return_law
from ..bessel.simulator import simulate_walk
from ..config import Config
from ..exceptions import HorizonTooSmallError
from ..models import CouplingSequence, CouplingSource, WalkSpec

logger = logging.getLogger(__name__)

_CHUNK = 2048
# Negative-binomial mass further than this many standard deviations is dropped
_NB_SIGMAS = 10.0


def time_split_weights(n: int) -> np.ndarray:
    """
    Binomial weights C(2n, j) 4^(−n), j = 0..2n.

    Probability that j of 2n fair-coin steps are horizontal.
    """
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    return binom.pmf(np.arange(2 * n + 1), 2 * n, 0.5)


def negative_binomial_weights(v: int, h_max: int) -> np.ndarray:
    """
    Probabilities of h = 0..h_max horizontal moves made before the v-th vertical move.

    The last step is the vertical one, so the count is NB(v, 1/2).
    """
    if v < 1:
        raise ValueError(f"v must be >= 1, got {v}")
    if h_max < 0:
        raise ValueError(f"h_max must be >= 0, got {h_max}")
    return nbinom.pmf(np.arange(h_max + 1), v, 0.5)


def _check_s(s: float):
    if not 0 <= s < 1:
        raise ValueError(f"Walk-derived couplings need s in [0, 1), got {s}")


def _check_horizon(horizon: int):
    if horizon < 4 or horizon % 2:
        raise ValueError(f"Horizon must be even and >= 4, got {horizon}")


def _finalize(
    J0: float,
    J: np.ndarray,
    tail0: float,
    tail: np.ndarray,
    tail_mass: float,
    pointwise: float,
    s: float,
    source: CouplingSource,
    horizon: int,
    tolerance: float,
    metadata: dict,
) -> CouplingSequence:
    """Add the extrapolated tail, cap it at the known missing mass and package."""
    if pointwise > tolerance:
        raise HorizonTooSmallError(
            f"Horizon {horizon} leaves pointwise error {pointwise:.2e} > {tolerance:.2e} (s={s})"
        )

    window_tail = tail0 + 2.0 * float(np.sum(tail))
    if window_tail > tail_mass > 0:
        factor = tail_mass / window_tail
        tail0 *= factor
        tail = tail * factor
    elif tail_mass <= 0:
        tail0, tail = 0.0, np.zeros_like(tail)

    values = J + tail
    mass_at_zero = J0 + tail0
    in_window = mass_at_zero + 2.0 * math.fsum(values)
    truncation = max(1.0 - in_window, 0.0)
    if in_window > 1.0 + Config.NORMALIZATION_EPS:
        logger.warning(f"⚠️  Return-site mass {in_window:.12f} exceeds 1 (s={s})")

    logger.info(
        f"✅ {source.value} couplings s={s}, R={values.size}: "
        f"truncation {truncation:.3e}, pointwise {pointwise:.3e}"
    )
    return CouplingSequence(
        alpha=2.0 + s,
        values=values,
        source=source,
        one_sided_mass=(1.0 - mass_at_zero) / 2.0,
        truncation_error=truncation,
        pointwise_error=pointwise,
        mass_at_zero=mass_at_zero,
        horizon=horizon,
        metadata=metadata,
    )


def _diamond_dp(s: float, R: int, horizon: int, tolerance: float, show_progress: bool) -> CouplingSequence:
    law = first_return_law(s, horizon, show_progress=show_progress)
    N = horizon // 2
    gamma = law.exponent
    k = np.arange(R + 1)

    # J(k) = Σ_n g(2n) P[2n fair ±1 steps end at 2k]
    acc = np.zeros(R + 1)
    n_all = np.arange(1, N + 1)
    chunks = range(0, N, _CHUNK)
    if show_progress:
        chunks = tqdm(chunks, desc=f"Return sites s={s}", unit="chunks")
    for start in chunks:
        n = n_all[start: start + _CHUNK]
        weights = law.g[2 * n]
        kernel = binom.pmf(n[:, None] + k[None, :], 2 * n[:, None], 0.5)
        acc += weights @ kernel

    # Beyond the horizon g(2n) ~ C (2n)^(−γ), with C matched to the missing mass
    S_T = law.tail_mass
    a = N + 0.5
    if S_T > 0:
        C = S_T / (2.0 ** (-gamma) * float(zeta(gamma, N + 1)))
        prefactor = C * 2.0 ** (-gamma) / math.sqrt(math.pi)
        kf = k[1:].astype(float)
        tail = prefactor * math.exp(gammaln(gamma - 0.5)) * gammainc(gamma - 0.5, kf ** 2 / a) * kf ** (1.0 - 2.0 * gamma)
        tail0 = prefactor * a ** (0.5 - gamma) / (gamma - 0.5)
        plateau = C
    else:
        tail, tail0, plateau = np.zeros(R), 0.0, 0.0
    pointwise = S_T / math.sqrt(math.pi * N)

    return _finalize(
        float(acc[0]), acc[1:], float(tail0), tail, S_T, pointwise,
        s, CouplingSource.BESSEL_DIAMOND, horizon, tolerance,
        {"method": "dp", "tail_mass": S_T, "plateau_constant": plateau},
    )


def _monte_carlo(
    s: float,
    R: int,
    horizon: int,
    geometry: str,
    dimension: int,
    n_walks: int,
    seed: int,
    show_progress: bool,
) -> CouplingSequence:
    spec = WalkSpec(
        geometry=geometry, dimension=dimension, s=s,
        max_steps=horizon, seed=seed, n_walks=n_walks,
    )
    summary = simulate_walk(spec, show_progress=show_progress)
    N = summary.n_walks
    counts = summary.signed_histogram(R).astype(float)
    returned = int(np.sum(~summary.censored))
    beyond = returned - int(counts.sum())

    zero = counts[R]
    both = counts[R + 1:] + counts[R - 1:: -1][:R]
    p2 = both / N
    values = p2 / 2.0
    stderr = np.sqrt(p2 * (1.0 - p2) / N) / 2.0
    mass_at_zero = zero / N
    truncation = (summary.n_censored + beyond) / N

    source = CouplingSource.BESSEL_DIAMOND if geometry == "diamond" else CouplingSource.BESSEL_GRID
    logger.info(
        f"✅ {source.value} Monte Carlo couplings s={s}: {N} walks, "
        f"{summary.n_censored} censored, {beyond} beyond R={R}"
    )
    return CouplingSequence(
        alpha=2.0 + s,
        values=values,
        source=source,
        one_sided_mass=(1.0 - mass_at_zero) / 2.0,
        truncation_error=truncation,
        pointwise_error=float(stderr.max()),
        mass_at_zero=mass_at_zero,
        stderr=stderr,
        horizon=horizon,
        metadata={"method": "monte_carlo", "n_walks": N, "seed": seed, "dimension": dimension},
    )


def bessel_couplings(
    s: float,
    R: int,
    horizon: int = Config.DEFAULT_HORIZON,
    method: str = "dp",
    n_walks: int = 10 ** 5,
    seed: int = 0,
    tolerance: Optional[float] = None,
    show_progress: bool = False,
) -> CouplingSequence:
    """
    Return-site law of the diamond-graph Bessel walk.

    Args:
        s: Kernel parameter in [0, 1); the couplings decay like r^(−(2+s))
        R: Number of couplings to keep
        horizon: Time horizon T of the first-return law (or walk length)
        method: 'dp' (exact binomial heat kernels) or 'monte_carlo'
        n_walks: Walks for the Monte Carlo method
        seed: Seed for the Monte Carlo method
        tolerance: Largest accepted pointwise error (default: Config.HORIZON_TOLERANCE)
        show_progress: Show progress bars

    Returns:
        CouplingSequence with mass_at_zero set
    """
    _check_s(s)
    _check_horizon(horizon)
    if R < 1:
        raise ValueError(f"Radius must be >= 1, got {R}")
    if method == "dp":
        return _diamond_dp(s, R, horizon, tolerance or Config.HORIZON_TOLERANCE, show_progress)
    if method == "monte_carlo":
        return _monte_carlo(s, R, horizon, "diamond", 1, n_walks, seed, show_progress)
    raise ValueError(f"Unknown method: {method}. Use 'dp' or 'monte_carlo'")


def _horizontal_move_law(law, h_max: int, show_progress: bool) -> np.ndarray:
    """q(h) = Σ_v g(v) NB(h; v, 1/2) for h = 0..h_max."""
    q = np.zeros(h_max + 1)
    vs = np.arange(2, law.horizon + 1, 2)
    if show_progress:
        vs = tqdm(vs, desc="Horizontal move law", unit="v")
    for v in vs:
        weight = law.g[v]
        if weight <= 0:
            continue
        width = _NB_SIGMAS * math.sqrt(2.0 * v) + 10.0
        lo = max(0, int(v - width))
        hi = min(h_max, int(v + width))
        if lo > hi:
            continue
        h = np.arange(lo, hi + 1)
        q[lo: hi + 1] += weight * nbinom.pmf(h, v, 0.5)
    return q


def _grid_exact(s: float, R: int, horizon: int, tolerance: float, show_progress: bool) -> CouplingSequence:
    law = first_return_law(s, horizon, show_progress=show_progress)
    gamma = law.exponent
    h_max = horizon - int(math.ceil(_NB_SIGMAS * math.sqrt(2.0 * horizon)))
    if h_max < 2:
        raise HorizonTooSmallError(f"Horizon {horizon} too short for the grid construction")
    q = _horizontal_move_law(law, h_max, show_progress)

    # J(x) = Σ_h q(h) P[h fair ±1 steps end at x]
    x = np.arange(R + 1)
    acc = np.zeros(R + 1)
    h_all = np.arange(h_max + 1)
    for start in range(0, h_max + 1, _CHUNK):
        h = h_all[start: start + _CHUNK]
        parity = ((h[:, None] + x[None, :]) % 2) == 0
        kernel = np.where(parity, binom.pmf((h[:, None] + x[None, :]) // 2, h[:, None], 0.5), 0.0)
        acc += q[h] @ kernel

    M_rem = max(1.0 - math.fsum(q), 0.0)
    a = h_max + 0.5
    if M_rem > 0:
        C = M_rem / float(zeta(gamma, h_max + 1))
        prefactor = C / math.sqrt(2.0 * math.pi)
        xf = x[1:].astype(float)
        tail = (prefactor * (xf ** 2 / 2.0) ** (0.5 - gamma) * math.exp(gammaln(gamma - 0.5))
                * gammainc(gamma - 0.5, xf ** 2 / (2.0 * a)))
        tail0 = prefactor * a ** (0.5 - gamma) / (gamma - 0.5)
    else:
        tail, tail0 = np.zeros(R), 0.0
    pointwise = M_rem * math.sqrt(2.0 / (math.pi * h_max))

    return _finalize(
        float(acc[0]), acc[1:], float(tail0), tail, M_rem, pointwise,
        s, CouplingSource.BESSEL_GRID, horizon, tolerance,
        {"method": "dp", "dimension": 1, "tail_mass": M_rem, "h_max": h_max},
    )


def grid_bessel_couplings(
    d: int,
    s: float,
    R: int,
    horizon: int = Config.DEFAULT_HORIZON,
    method: str = "dp",
    n_walks: int = 10 ** 5,
    seed: int = 0,
    tolerance: Optional[float] = None,
    show_progress: bool = False,
) -> CouplingSequence:
    """
    Return-site law of the grid Bessel walk on Z^d x Z.

    For d = 1 and method 'dp' the law is exact up to the extrapolated tail.
    For d >= 2 (or method 'monte_carlo') walks are simulated and the sequence
    is the law of the first coordinate of the return site.
    """
    _check_s(s)
    _check_horizon(horizon)
    if d < 1:
        raise ValueError(f"Dimension must be >= 1, got {d}")
    if R < 1:
        raise ValueError(f"Radius must be >= 1, got {R}")
    if method not in ("dp", "monte_carlo"):
        raise ValueError(f"Unknown method: {method}. Use 'dp' or 'monte_carlo'")
    if d == 1 and method == "dp":
        return _grid_exact(s, R, horizon, tolerance or Config.HORIZON_TOLERANCE, show_progress)
    if method == "dp":
        logger.info(f"📊 d={d}: no exact construction, using Monte Carlo")
    return _monte_carlo(s, R, horizon, "grid", d, n_walks, seed, show_progress)
