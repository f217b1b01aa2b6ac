"""Precision operators of Gaussian chains and lattice free fields, with exact sampling."""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Union

import numpy as np
from scipy import linalg, sparse
from scipy.sparse.linalg import spsolve_triangular, splu

from ..exceptions import CouplingRadiusError, FactorizationError
from ..lattice.domains import LatticeDomain, build_domain
from ..models import ConductanceField, CouplingSequence, CouplingSource
from ..utils.rng import make_generator

logger = logging.getLogger(__name__)

Matrix = Union[np.ndarray, sparse.spmatrix]

STRUCTURES = ("long_range_1d", "nearest_neighbour_2d", "long_range_2d")


@dataclass
class PrecisionOperator:
    """
    Symmetric positive-definite precision of a Gaussian field.

    ``host`` is the lattice domain the rows are indexed by. ``omitted_mass``
    bounds the coupling mass left out of the diagonal.
    """

    structure: str
    matrix: Matrix
    beta: float
    host: Optional[LatticeDomain] = None
    coupling: Optional[CouplingSequence] = None
    omitted_mass: float = 0.0
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.structure not in STRUCTURES:
            raise ValueError(f"Unknown structure: {self.structure}. Use one of {STRUCTURES}")
        if self.beta <= 0:
            raise ValueError(f"beta must be > 0, got {self.beta}")

    @property
    def is_sparse(self) -> bool:
        return sparse.issparse(self.matrix)

    @property
    def size(self) -> int:
        return int(self.matrix.shape[0])

    def dense(self) -> np.ndarray:
        return self.matrix.toarray() if self.is_sparse else np.asarray(self.matrix)

    def covariance(self) -> np.ndarray:
        return chain_covariance(self)


def _chain_couplings(J: CouplingSequence, n: int) -> np.ndarray:
    """J(r) for r = 1..2n, extending power laws analytically."""
    needed = 2 * n
    if J.radius >= needed:
        return J.values[:needed]
    if J.source == CouplingSource.POWER_LAW:
        r = np.arange(J.radius + 1, needed + 1, dtype=float)
        return np.concatenate([J.values, r ** (-J.alpha)])
    raise CouplingRadiusError(
        f"Chain on {{-{n}..{n}}} needs couplings up to r={needed}, sequence stops at R={J.radius}"
    )


def chain_precision(J: CouplingSequence, n: int, beta: float = 1.0) -> PrecisionOperator:
    """
    Dense precision of the long-range Gaussian chain on {−n..n} with zero exterior.

    Each unordered pair is counted twice, so Q_ij = −2βJ(|i−j|) and
    Q_ii = 2β Σ_{j∈ℤ, j≠i} J(|i−j|) = 4β·one_sided_mass. With this convention
    2β·Q⁻¹ is the expected-visit Green function of the trace walk.

    Args:
        J: Coupling sequence with radius >= 2n (or a power law)
        n: Half-width of the chain
        beta: Inverse temperature

    Returns:
        PrecisionOperator with structure long_range_1d
    """
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if beta <= 0:
        raise ValueError(f"beta must be > 0, got {beta}")

    size = 2 * n + 1
    if n > 0:
        values = _chain_couplings(J, n)
        column = np.concatenate([[0.0], values])
        matrix = -2.0 * beta * linalg.toeplitz(column[:size])
    else:
        matrix = np.zeros((1, 1))
    np.fill_diagonal(matrix, 4.0 * beta * J.one_sided_mass)

    return PrecisionOperator(
        structure="long_range_1d",
        matrix=matrix,
        beta=beta,
        host=build_domain("interval", n=n) if n >= 1 else None,
        coupling=J,
        omitted_mass=J.truncation_error if J.source != CouplingSource.POWER_LAW else 0.0,
        metadata={"n": n, "alpha": J.alpha, "source": J.source.value},
    )


def nearest_neighbour_chain_precision(n: int, beta: float = 1.0) -> PrecisionOperator:
    """Chain precision with J = 1 at distance one only."""
    size = 2 * n + 1
    matrix = 2.0 * beta * (2.0 * np.eye(size) - np.eye(size, k=1) - np.eye(size, k=-1))
    return PrecisionOperator(
        structure="long_range_1d", matrix=matrix, beta=beta,
        metadata={"n": n, "nearest_neighbour": True},
    )


def nearest_neighbour_precision(
    domain: LatticeDomain,
    beta: float = 1.0,
    conductances: Optional[ConductanceField] = None,
) -> PrecisionOperator:
    """
    Sparse precision β(D − A) of the (conductance) free field on ``domain``.

    The covariance is (1/β)(D − A)⁻¹, i.e. the expected-visit Green function
    divided by β·deg.
    """
    if beta <= 0:
        raise ValueError(f"beta must be > 0, got {beta}")
    A, degree = domain.adjacency(conductances)
    matrix = (beta * (sparse.diags(degree) - A)).tocsc()
    return PrecisionOperator(
        structure="nearest_neighbour_2d",
        matrix=matrix,
        beta=beta,
        host=domain,
        metadata={"domain": domain.kind, **domain.params},
    )


def long_range_2d_precision(n: int, alpha: float, beta: float = 1.0, r_max: Optional[float] = None) -> PrecisionOperator:
    """
    Dense long-range precision on box2d(n) with couplings |x − y|^(−alpha).

    Couplings beyond Euclidean range ``r_max`` (default n) are dropped. The
    diagonal carries the full in-range row sum over ℤ², including exterior
    sites, and the dropped mass ≈ 2π r_max^(2−α)/(α−2) is reported.
    """
    if alpha <= 2:
        raise ValueError(f"2D long-range couplings need alpha > 2, got {alpha}")
    r_max = float(n if r_max is None else r_max)
    if r_max < 1:
        raise ValueError(f"r_max must be >= 1, got {r_max}")

    domain = build_domain("box2d", n=n)
    coords = domain.coords.astype(float)
    diff = coords[:, None, :] - coords[None, :, :]
    dist = np.sqrt(np.sum(diff ** 2, axis=-1))
    with np.errstate(divide="ignore"):
        J = np.where((dist > 0) & (dist <= r_max), dist ** (-alpha), 0.0)

    reach = int(math.floor(r_max))
    offsets = np.arange(-reach, reach + 1)
    ox, oy = np.meshgrid(offsets, offsets, indexing="ij")
    radius = np.sqrt(ox ** 2 + oy ** 2).ravel()
    in_range = (radius > 0) & (radius <= r_max)
    row_sum = float(np.sum(radius[in_range] ** (-alpha)))

    matrix = -2.0 * beta * J
    np.fill_diagonal(matrix, 2.0 * beta * row_sum)
    omitted = 2.0 * math.pi * r_max ** (2.0 - alpha) / (alpha - 2.0)
    logger.debug(f"2D long-range precision n={n}, alpha={alpha}: omitted mass {omitted:.3e}")

    return PrecisionOperator(
        structure="long_range_2d",
        matrix=matrix,
        beta=beta,
        host=domain,
        omitted_mass=omitted,
        metadata={"n": n, "alpha": alpha, "r_max": r_max},
    )


def chain_covariance(P: PrecisionOperator) -> np.ndarray:
    """Dense covariance Q⁻¹ through a Cholesky factorization."""
    Q = P.dense()
    try:
        factor = linalg.cho_factor(Q, lower=True)
    except linalg.LinAlgError as e:
        raise FactorizationError(f"Precision ({P.structure}, size {P.size}) is not positive definite") from e
    cov = linalg.cho_solve(factor, np.eye(P.size))
    return 0.5 * (cov + cov.T)


def _sparse_ldl(Q: sparse.spmatrix):
    """Unpivoted sparse LU of a symmetric matrix, or None if splu permuted it."""
    lu = splu(
        Q.tocsc(),
        permc_spec="NATURAL",
        diag_pivot_thresh=0.0,
        options={"SymmetricMode": True},
    )
    identity = np.arange(Q.shape[0])
    if not (np.array_equal(lu.perm_r, identity) and np.array_equal(lu.perm_c, identity)):
        return None
    pivots = lu.U.diagonal()
    if np.any(pivots <= 0):
        raise FactorizationError("Sparse precision has a non-positive pivot")
    return lu.L.tocsr(), pivots


def sample_gaussian(P: PrecisionOperator, seed: Optional[int] = None, size: Optional[int] = None) -> np.ndarray:
    """
    Exact samples of N(0, Q⁻¹).

    Dense precisions use Q = LLᵀ and solve Lᵀx = z. Sparse precisions use
    Q = L diag(d) Lᵀ from an unpivoted symmetric-mode LU and solve
    Lᵀx = d^(−1/2) z, falling back to the dense route when the factorization
    permutes rows and columns.

    Args:
        P: Precision operator
        seed: Random seed
        size: Number of samples (None for a single vector)

    Returns:
        Array of shape (P.size,) or (size, P.size)
    """
    rng = make_generator(seed)
    count = 1 if size is None else int(size)
    z = rng.standard_normal((P.size, count))

    factors = _sparse_ldl(P.matrix) if P.is_sparse else None
    if factors is not None:
        L, pivots = factors
        x = spsolve_triangular(L.T.tocsr(), z / np.sqrt(pivots)[:, None], lower=False)
    else:
        if P.is_sparse:
            logger.warning("⚠️  Sparse factorization permuted the precision, sampling densely")
        try:
            L = linalg.cholesky(P.dense(), lower=True)
        except linalg.LinAlgError as e:
            raise FactorizationError(f"Precision ({P.structure}) is not positive definite") from e
        x = linalg.solve_triangular(L.T, z, lower=False)

    samples = np.asarray(x).T
    return samples[0] if size is None else samples
