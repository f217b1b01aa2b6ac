"""Vertical Bessel kernel Q_s on the half-line."""

import numpy as np


class BesselKernel:
    """
    Nearest-neighbour walk on {0, 1, 2, ...} with drift -s/(4r).

    Q_s(0, 1) = 1 and Q_s(r, r+1) = max(1/2 - s/(4r), 1/4) for r >= 1.
    """

    def __init__(self, s: float):
        if s <= -1:
            raise ValueError(f"Bessel kernel needs s > -1, got {s}")
        self.s = float(s)

    def up_probabilities(self, r) -> np.ndarray:
        """Q_s(r, r+1) for an array of heights r >= 0."""
        r = np.asarray(r, dtype=float)
        if np.any(r < 0):
            raise ValueError("heights must be non-negative")
        with np.errstate(divide="ignore", invalid="ignore"):
            up = np.maximum(0.5 - self.s / (4.0 * r), 0.25)
        return np.where(r == 0, 1.0, up)

    def up_probability(self, r: int) -> float:
        return float(self.up_probabilities(r))

    def down_probability(self, r: int) -> float:
        return 0.0 if r == 0 else 1.0 - self.up_probability(r)

    def __repr__(self) -> str:
        return f"BesselKernel(s={self.s})"


def kernel(s: float) -> BesselKernel:
    """Closed-form Bessel kernel for parameter ``s``."""
    return BesselKernel(s)
