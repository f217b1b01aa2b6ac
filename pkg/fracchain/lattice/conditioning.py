"""Conditioning sets: the line, horizontal strips and a self-similar fractal."""

import logging
import math
from typing import Dict, Optional, Sequence

import numpy as np

from .domains import LatticeDomain

logger = logging.getLogger(__name__)

# Middle row plus one recursing block above and one below
DEFAULT_FRACTAL_MASK = (
    (False, True, False),
    (True, True, True),
    (False, True, False),
)


class ConditioningSet:
    """Sites of a host domain on which a field is constrained."""

    def __init__(
        self,
        kind: str,
        domain: Optional[LatticeDomain],
        coords: np.ndarray,
        params: Optional[Dict] = None,
        dimension_estimate: Optional[float] = None,
    ):
        self.kind = kind
        self.domain = domain
        self.coords = np.asarray(coords, dtype=np.int64).reshape(-1, 2)
        self.params = dict(params or {})
        self.dimension_estimate = dimension_estimate
        if domain is not None:
            idx = domain.lookup(self.coords[:, 0], self.coords[:, 1])
            dropped = int(np.sum(idx < 0))
            if dropped:
                logger.debug(f"{kind} set: {dropped} sites outside the alive set dropped")
            self.coords = self.coords[idx >= 0]
            self.indices = np.sort(idx[idx >= 0])
        else:
            self.indices = np.empty(0, dtype=np.int64)

    @property
    def size(self) -> int:
        return int(len(self.coords))

    def mask(self, n_sites: int) -> np.ndarray:
        out = np.zeros(n_sites, dtype=bool)
        out[self.indices] = True
        return out

    def to_dict(self) -> Dict:
        return {"kind": self.kind, **self.params, "size": self.size}

    def __repr__(self) -> str:
        return f"ConditioningSet({self.kind}, size={self.size})"


def line_set(domain: LatticeDomain) -> ConditioningSet:
    """Every alive site on the horizontal axis."""
    coords = domain.coords[domain.baseline_indices()]
    return ConditioningSet("line", domain, coords)


def strip_set(domain: LatticeDomain, B: int) -> ConditioningSet:
    """
    Alive sites with |y| <= B (physical units).

    B = 0 is the line; B at least the host height covers every site.
    """
    if B < 0:
        raise ValueError(f"Strip width must be >= 0, got {B}")
    scale = 2 if domain.lattice == "diamond" else 1
    keep = np.abs(domain.coords[:, 1]) <= scale * B
    return ConditioningSet("strip", domain, domain.coords[keep], {"B": B})


def _validate_mask(mask: Sequence) -> np.ndarray:
    arr = np.asarray(mask, dtype=bool)
    if arr.size == 9 and arr.ndim == 1:
        arr = arr.reshape(3, 3)
    if arr.shape != (3, 3):
        raise ValueError(f"Fractal mask must be 3x3 (or 9 booleans), got shape {arr.shape}")
    if not arr[1].all():
        raise ValueError("Fractal mask must keep the full middle row")
    return arr


def fractal_pattern(k: int, mask: Sequence = DEFAULT_FRACTAL_MASK) -> np.ndarray:
    """Boolean 3^k x 3^k occupation pattern, S_k = kron(mask, S_{k-1})."""
    if k < 1:
        raise ValueError(f"Fractal level must be >= 1, got {k}")
    base = _validate_mask(mask)
    pattern = base
    for _ in range(k - 1):
        pattern = np.kron(base, pattern)
    return pattern


def fractal_set(
    k: int,
    mask: Sequence = DEFAULT_FRACTAL_MASK,
    domain: Optional[LatticeDomain] = None,
) -> ConditioningSet:
    """
    Self-similar conditioning set on the centred 3^k x 3^k block.

    Row 0 of the pattern is the top row (largest y). The middle row of the
    block lies on the horizontal axis.

    Args:
        k: Recursion level
        mask: 3x3 subdivision mask (middle row must be full)
        domain: Optional square-lattice host; sites outside it are dropped

    Returns:
        ConditioningSet with dimension_estimate = log(count) / log(3^k)
    """
    pattern = fractal_pattern(k, mask)
    side = 3 ** k
    half = (side - 1) // 2
    if domain is not None and domain.lattice != "square":
        raise ValueError("Fractal sets live on square-lattice hosts")

    rows, cols = np.nonzero(pattern)
    coords = np.column_stack([cols - half, half - rows])
    dimension = math.log(len(coords)) / math.log(side)
    if domain is not None:
        # clip to the host first; torus lookups wrap
        x_min, x_max, y_min, y_max = domain.bounds
        inside = (
            (coords[:, 0] >= x_min) & (coords[:, 0] <= x_max)
            & (coords[:, 1] >= y_min) & (coords[:, 1] <= y_max)
        )
        if not inside.all():
            logger.info(f"Fractal level {k}: {int((~inside).sum())} of {len(coords)} sites lie outside {domain.kind}")
        coords = coords[inside]
    return ConditioningSet(
        "fractal", domain, coords,
        {"k": k, "mask": np.asarray(_validate_mask(mask)).astype(int).ravel().tolist()},
        dimension_estimate=dimension,
    )
