"""First-return law of the Bessel walk and its renewal profile."""

import logging
import math
from typing import Optional

import numpy as np
from tqdm import tqdm

from ..models import FirstReturnLaw
from ..utils.fitting import LineFit, geometric_points, loglog_fit
from .kernel import kernel

logger = logging.getLogger(__name__)

# Gaussian height cap: mass above sqrt(2 T log(1/eps)) is below eps
_HEIGHT_EPS = 1e-16


def _height_cap(s: float, T: int) -> int:
    exact = T // 2 + 2
    if s < 0:
        return exact
    gaussian = int(math.ceil(math.sqrt(2.0 * T * math.log(1.0 / _HEIGHT_EPS)))) + 2
    return min(gaussian, exact)


def first_return_law(s: float, T: int, show_progress: bool = False) -> FirstReturnLaw:
    """
    Exact first-return law of the walk started at 0.

    The walk is forced to height 1 at time 1. Sub-probability mass on heights
    1..H is then evolved with killing at 0, and the killed mass at each step
    is g_s(t). Mass pushed above the height cap is counted in ``tail_mass``.

    Args:
        s: Kernel parameter (s > -1)
        T: Horizon, even and >= 2
        show_progress: Show a progress bar over time steps

    Returns:
        FirstReturnLaw with g indexed by n = 0..T
    """
    if T < 2 or T % 2:
        raise ValueError(f"Horizon must be even and >= 2, got {T}")

    kern = kernel(s)
    H = _height_cap(s, T)
    up = kern.up_probabilities(np.arange(H + 1))

    g = np.zeros(T + 1)
    p = np.zeros(H + 1)
    p[1] = 1.0
    escaped = 0.0

    steps = range(1, T)
    if show_progress:
        steps = tqdm(steps, desc=f"First return s={s}", unit="steps")

    with np.errstate(under="ignore"):
        for t in steps:
            moved_up = p * up
            moved_down = p - moved_up
            new = np.zeros_like(p)
            new[1:] = moved_up[:-1]
            new[:-1] += moved_down[1:]
            g[t + 1] = new[0]
            new[0] = 0.0
            escaped += moved_up[-1]
            p = new

    # Odd times are unreachable; clear rounding noise
    g[1::2] = 0.0
    tail_mass = max(1.0 - math.fsum(g), 0.0)
    if escaped > 1e-12 and H < T // 2 + 2:
        logger.warning(f"⚠️  Height cap H={H} leaked {escaped:.2e} of mass (s={s}, T={T})")

    logger.debug(f"First-return law s={s}, T={T}: tail mass {tail_mass:.3e}")
    return FirstReturnLaw(s=s, g=g, horizon=T, tail_mass=tail_mass)


def return_probability_profile(
    s: float,
    T: int,
    law: Optional[FirstReturnLaw] = None,
) -> np.ndarray:
    """
    Occupation probabilities P[Y_t = 0] for t = 0..T by renewal.

    u(0) = 1 and u(2m) = Σ_{k=1..m} g(2k) u(2m − 2k). Odd times are zero.

    Args:
        s: Kernel parameter
        T: Horizon (even)
        law: Precomputed first-return law with horizon >= T

    Returns:
        Array of length T + 1
    """
    if T < 2 or T % 2:
        raise ValueError(f"Horizon must be even and >= 2, got {T}")
    if law is None:
        law = first_return_law(s, T)
    elif law.horizon < T:
        raise ValueError(f"First-return law horizon {law.horizon} is shorter than {T}")

    m_max = T // 2
    ge = law.g[0: T + 1: 2]
    ue = np.zeros(m_max + 1)
    ue[0] = 1.0
    for m in range(1, m_max + 1):
        ue[m] = np.dot(ge[1: m + 1], ue[m - 1:: -1])

    profile = np.zeros(T + 1)
    profile[0::2] = ue
    return profile


def decay_exponent(values: np.ndarray, t_min: int, t_max: int, per_octave: int = 8) -> LineFit:
    """
    Log-log decay fit of an even-time sequence over [t_min, t_max].

    The fitted slope is negated, so a sequence ~ t^(−a) returns slope a.
    """
    points = geometric_points(t_min, t_max, per_octave)
    points = np.unique(points + points % 2)
    points = points[points <= len(values) - 1]
    fit = loglog_fit(points, values[points])
    return LineFit(slope=-fit.slope, intercept=fit.intercept,
                   residual=fit.residual, n_points=fit.n_points)
