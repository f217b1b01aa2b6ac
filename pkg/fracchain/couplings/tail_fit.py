"""Power-law tail fits of coupling sequences."""

import logging
import math
from typing import Tuple

import numpy as np

from ..exceptions import WindowTooSmallError
from ..models import CouplingSequence, TailFit
from ..utils.fitting import geometric_points, loglog_fit

logger = logging.getLogger(__name__)

MIN_FIT_POINTS = 8


def tail_exponent_fit(
    seq: CouplingSequence,
    window: Tuple[int, int],
    per_octave: int = 8,
) -> TailFit:
    """
    Fit J(r) ≈ constant · r^(−exponent) on geometrically spaced r in ``window``.

    Args:
        seq: Coupling sequence
        window: (r_min, r_max), inside 1..R
        per_octave: Fit points per doubling of r

    Returns:
        TailFit
    """
    r_min, r_max = int(window[0]), int(window[1])
    if r_min < 1 or r_max > seq.radius or r_min >= r_max:
        raise ValueError(f"Fit window {window} must satisfy 1 <= r_min < r_max <= {seq.radius}")

    points = geometric_points(r_min, r_max, per_octave)
    if points.size < MIN_FIT_POINTS:
        raise WindowTooSmallError(
            f"Window {window} gives {points.size} distinct points, need {MIN_FIT_POINTS}"
        )
    values = seq.values[points - 1]
    if np.any(values <= 0):
        raise WindowTooSmallError(f"Window {window} contains vanishing couplings")

    fit = loglog_fit(points, values)
    result = TailFit(
        exponent=-fit.slope,
        constant=math.exp(fit.intercept),
        fit_window=(r_min, r_max),
        residual=fit.residual,
        n_points=fit.n_points,
    )
    logger.debug(f"Tail fit {seq.source.value} on {window}: exponent {result.exponent:.4f}")
    return result
