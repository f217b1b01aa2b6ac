"""Height-dependent conductances encoding the vertical Bessel drift."""

import logging

import numpy as np

from ..bessel.kernel import kernel
from ..models import ConductanceField

logger = logging.getLogger(__name__)

BASELINE_CONDUCTANCE = 0.25


def conductance_field(s: float, max_height: int) -> ConductanceField:
    """
    Conductances a(r, r+1) for r = 0..max_height-1.

    a(0, 1) = 1/4 and a(r, r+1) = ((1 - s/(2r)) / (1 + s/(2r))) · a(r-1, r),
    so that a(r, r+1) / (a(r-1, r) + a(r, r+1)) = Q_s(r, r+1). The clamp at 1/4
    in Q_s never binds for s in [0, 1).

    Args:
        s: Kernel parameter in [0, 1)
        max_height: Number of edges stored above the baseline

    Returns:
        ConductanceField with the fitted bound constant max_r a(r, r+1)·r^s
    """
    if not 0 <= s < 1:
        raise ValueError(f"Conductance field needs s in [0, 1), got {s}")
    if max_height < 1:
        raise ValueError(f"max_height must be >= 1, got {max_height}")

    r = np.arange(1, max_height, dtype=float)
    ratios = (1.0 - s / (2.0 * r)) / (1.0 + s / (2.0 * r))
    values = BASELINE_CONDUCTANCE * np.concatenate(([1.0], np.cumprod(ratios)))

    # The clamp never binds on this range
    up = kernel(s).up_probabilities(r)
    assert np.allclose(up, 0.5 - s / (4.0 * r))

    heights = np.arange(max_height, dtype=float)
    heights[0] = 1.0
    bound_constant = float(np.max(values * heights ** s))

    return ConductanceField(
        s=s,
        values=values,
        max_height=max_height,
        bound_constant=bound_constant,
    )
