"""Gibbs measures with lattice-valued or sine-Gordon conditioning."""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import sparse

from ..fields.precision import PrecisionOperator
from ..lattice.conditioning import ConditioningSet

logger = logging.getLogger(__name__)

SCHEDULES = ("systematic", "random")


def greedy_colouring(matrix) -> List[np.ndarray]:
    """
    Split sites into classes with no coupling inside a class.

    Sites are coloured in index order with the smallest free colour.
    """
    csr = sparse.csr_matrix(matrix)
    size = csr.shape[0]
    colours = np.full(size, -1, dtype=np.int64)
    for i in range(size):
        row = csr.indices[csr.indptr[i]: csr.indptr[i + 1]]
        used = set(colours[row[row != i]].tolist())
        c = 0
        while c in used:
            c += 1
        colours[i] = c
    return [np.flatnonzero(colours == c) for c in range(int(colours.max()) + 1)]


class GibbsModel:
    """
    Gaussian field with precision Q, constrained on a set of sites.

    On conditioned sites the field lives in v·ℤ (``lam is None``), carries the
    potential −λ cos(2πφ/v) (``lam > 0``), or is unconstrained (``lam == 0``).

    Args:
        precision: Precision operator (β already included)
        conditioning: ConditioningSet, array of site indices, or None
        spacing: Lattice spacing v
        lam: None (integer), 0 (Gaussian) or λ > 0 (sine-Gordon)
        schedule: 'systematic' or 'random' order of site classes
    """

    def __init__(
        self,
        precision: PrecisionOperator,
        conditioning: Union[ConditioningSet, Sequence[int], None] = None,
        spacing: float = 1.0,
        lam: Optional[float] = None,
        schedule: str = "systematic",
    ):
        if spacing <= 0:
            raise ValueError(f"Lattice spacing must be > 0, got {spacing}")
        if lam is not None and lam < 0:
            raise ValueError(f"lam must be >= 0 or None, got {lam}")
        if schedule not in SCHEDULES:
            raise ValueError(f"Unknown schedule: {schedule}. Use one of {SCHEDULES}")

        self.precision = precision
        self.spacing = float(spacing)
        self.lam = lam
        self.schedule = schedule

        if isinstance(conditioning, ConditioningSet):
            indices = conditioning.indices
        elif conditioning is None:
            indices = np.empty(0, dtype=np.int64)
        else:
            indices = np.asarray(conditioning, dtype=np.int64)
        if indices.size and (indices.min() < 0 or indices.max() >= precision.size):
            raise ValueError("Conditioning sites must be alive sites of the host")
        self.conditioning = conditioning
        self.mask = np.zeros(precision.size, dtype=bool)
        self.mask[indices] = True

        self.Q = precision.matrix.tocsr() if precision.is_sparse else np.asarray(precision.matrix)
        self.diagonal = np.asarray(
            precision.matrix.diagonal() if precision.is_sparse else np.diag(precision.matrix), dtype=float
        )
        if np.any(self.diagonal <= 0):
            raise ValueError("Precision diagonal must be positive")
        self.classes = greedy_colouring(self.Q)
        logger.debug(f"Gibbs model on {self.size} sites: {len(self.classes)} update classes")

    @property
    def size(self) -> int:
        return self.precision.size

    @property
    def beta(self) -> float:
        return self.precision.beta

    @property
    def conditioned_indices(self) -> np.ndarray:
        return np.flatnonzero(self.mask)

    @property
    def kind(self) -> str:
        if not self.mask.any() or self.lam == 0:
            return "gaussian"
        return "integer" if self.lam is None else "sine_gordon"

    def with_lambda(self, lam: Optional[float]) -> "GibbsModel":
        return GibbsModel(self.precision, self.conditioned_indices, self.spacing, lam, self.schedule)

    def __repr__(self) -> str:
        return (
            f"GibbsModel({self.kind}, sites={self.size}, conditioned={int(self.mask.sum())}, "
            f"v={self.spacing:g}, beta={self.beta:g})"
        )


@dataclass
class ObservableSpec:
    """
    Per-sweep observables.

    Each entry is recorded as a second moment about zero: φ_i², φ_iφ_j,
    exp(⟨a, φ⟩) and ⟨φ, g⟩².
    """

    sites: Sequence[int] = ()
    pairs: Sequence[Tuple[int, int]] = ()
    laplace: Dict[str, np.ndarray] = field(default_factory=dict)
    pairings: Dict[str, np.ndarray] = field(default_factory=dict)

    def names(self) -> List[str]:
        names = [f"var[{i}]" for i in self.sites]
        names += [f"cov[{i},{j}]" for i, j in self.pairs]
        names += [f"laplace[{k}]" for k in self.laplace]
        names += [f"pairing[{k}]" for k in self.pairings]
        return names

    def evaluate(self, phi: np.ndarray) -> np.ndarray:
        values = [phi[i] ** 2 for i in self.sites]
        values += [phi[i] * phi[j] for i, j in self.pairs]
        values += [np.exp(np.dot(a, phi)) for a in self.laplace.values()]
        values += [np.dot(g, phi) ** 2 for g in self.pairings.values()]
        return np.asarray(values, dtype=float)
