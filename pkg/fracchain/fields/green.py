"""
Green functions of killed walks on lattice domains.

G(x, y) is the expected number of visits to y before killing, for the walk
started at x with transition matrix D⁻¹A. Writing (D − A)w = e_x gives
G(x, y) = w(y)·deg(y).
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import cg, splu

from ..config import Config
from ..couplings.walk_derived import bessel_couplings
from ..exceptions import SolverError
from ..lattice.conductances import conductance_field
from ..lattice.domains import LatticeDomain, build_domain
from ..models import ConductanceField
from ..utils.fitting import LineFit, geometric_points, loglog_fit
from .precision import chain_covariance, chain_precision

logger = logging.getLogger(__name__)

Site = Union[int, Tuple[int, int]]


@dataclass
class GreenTable:
    """Expected visits G(x, ·) from one source site."""

    domain: LatticeDomain
    source: int
    values: np.ndarray
    residual: float
    conductances: Optional[ConductanceField] = None

    def at(self, site: Tuple[int, int]) -> float:
        idx = int(self.domain.lookup(site[0], site[1]))
        return float(self.values[idx]) if idx >= 0 else 0.0

    @property
    def diagonal(self) -> float:
        return float(self.values[self.source])

    def line_values(self) -> np.ndarray:
        return self.values[self.domain.baseline_indices()]


class GreenSolver:
    """
    Factorize D − A once and solve for many sources.

    Direct sparse LU is used up to ``threshold`` unknowns, Jacobi-preconditioned
    conjugate gradients beyond.
    """

    def __init__(
        self,
        domain: LatticeDomain,
        conductances: Optional[ConductanceField] = None,
        method: str = "auto",
        threshold: Optional[int] = None,
        num_workers: Optional[int] = None,
    ):
        if method not in ("auto", "direct", "cg"):
            raise ValueError(f"Unknown method: {method}. Use 'auto', 'direct' or 'cg'")
        self.domain = domain
        self.conductances = conductances
        self.num_workers = num_workers or Config.THREADS

        A, degree = domain.adjacency(conductances)
        self.degree = degree
        self.operator = (sparse.diags(degree) - A).tocsc()

        limit = Config.DIRECT_SOLVER_MAX_UNKNOWNS if threshold is None else threshold
        if method == "auto":
            method = "direct" if domain.n_sites <= limit else "cg"
        self.method = method

        self._lu = None
        self._jacobi = None
        if method == "direct":
            logger.info(f"🚀 Factorizing {domain.kind} operator ({domain.n_sites} unknowns)")
            self._lu = splu(self.operator)
        else:
            logger.info(f"🚀 Conjugate gradients on {domain.kind} ({domain.n_sites} unknowns)")
            self._jacobi = sparse.diags(1.0 / degree)

    @property
    def size(self) -> int:
        return self.domain.n_sites

    def _raw_solve(self, rhs: np.ndarray) -> np.ndarray:
        if self._lu is not None:
            return self._lu.solve(rhs)
        if rhs.ndim == 1:
            return self._cg(rhs)
        columns = [rhs[:, j] for j in range(rhs.shape[1])]
        with ThreadPoolExecutor(max_workers=self.num_workers) as executor:
            solved = list(executor.map(self._cg, columns))
        return np.column_stack(solved)

    def _cg(self, b: np.ndarray) -> np.ndarray:
        x, info = cg(self.operator, b, rtol=Config.SOLVER_RTOL, maxiter=Config.CG_MAX_ITER, M=self._jacobi)
        if info != 0:
            raise SolverError(f"CG did not converge on {self.domain.kind} (info={info})")
        return x

    def _residual(self, x: np.ndarray, rhs: np.ndarray) -> float:
        r = self.operator @ x - rhs
        return float(np.max(np.linalg.norm(r, axis=0) / np.linalg.norm(rhs, axis=0)))

    def solve(self, rhs: np.ndarray) -> Tuple[np.ndarray, float]:
        """
        Solve (D − A)w = rhs (one column or many) with one refinement step.

        Returns:
            (w, relative residual)

        Raises:
            SolverError: residual above Config.SOLVER_RTOL after refinement
        """
        rhs = np.asarray(rhs, dtype=float)
        x = self._raw_solve(rhs)
        residual = self._residual(x, rhs)
        if residual > Config.SOLVER_RTOL:
            x = x + self._raw_solve(rhs - self.operator @ x)
            residual = self._residual(x, rhs)
        if residual > Config.SOLVER_RTOL:
            raise SolverError(f"Residual {residual:.2e} above {Config.SOLVER_RTOL:.0e} on {self.domain.kind}")
        return x, residual

    def _index(self, x: Site) -> int:
        if isinstance(x, (int, np.integer)):
            if not 0 <= x < self.size:
                raise IndexError(f"Site index {x} out of range")
            return int(x)
        return self.domain.index_of(x)

    def green_row(self, x: Site) -> GreenTable:
        """G(x, ·) for a site tuple (index coordinates) or a site index."""
        idx = self._index(x)
        rhs = np.zeros(self.size)
        rhs[idx] = 1.0
        w, residual = self.solve(rhs)
        return GreenTable(self.domain, idx, w * self.degree, residual, self.conductances)

    def green_block(self, sources: Iterable[Site]) -> np.ndarray:
        """Rows G(x, ·) for each source, shape (len(sources), n_sites)."""
        indices = [self._index(x) for x in sources]
        rhs = np.zeros((self.size, len(indices)))
        rhs[indices, np.arange(len(indices))] = 1.0
        w, _ = self.solve(rhs)
        return (w * self.degree[:, None]).T

    def line_green(self) -> np.ndarray:
        """G restricted to baseline × baseline, ordered left to right."""
        line = self.domain.baseline_indices()
        return self.green_block(line)[:, line]


def green_solve(
    domain: LatticeDomain,
    conductances: Optional[ConductanceField],
    x: Site,
    method: str = "auto",
) -> GreenTable:
    """Expected-visit Green function G(x, ·) of the killed walk on ``domain``."""
    return GreenSolver(domain, conductances, method).green_row(x)


def green_solve_many(
    domain: LatticeDomain,
    conductances: Optional[ConductanceField],
    sources: Sequence[Site],
    method: str = "auto",
) -> np.ndarray:
    """G(x, ·) for several sources from one factorization."""
    return GreenSolver(domain, conductances, method).green_block(sources)


def diamond_conductances(domain: LatticeDomain, s: float) -> ConductanceField:
    """Conductance field tall enough for every edge of ``domain``."""
    return conductance_field(s, domain.max_height + 1)


# ---------------------------------------------------------------- trace identity


@dataclass
class TraceIdentityResult:
    """Chain covariance against the line Green function of the planar walk."""

    n: int
    s: float
    factor: float
    discrepancy: float
    escape_bound: float
    coupling_error: float
    n_unknowns: int
    chain_green: np.ndarray
    line_green: np.ndarray

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "s": self.s,
            "factor": self.factor,
            "discrepancy": self.discrepancy,
            "escape_bound": self.escape_bound,
            "coupling_error": self.coupling_error,
            "n_unknowns": self.n_unknowns,
        }


def escape_bound(conductances: ConductanceField, height: int, half_width: int, couplings) -> float:
    """
    Bound on the probability that an excursion leaves the truncated host.

    Vertical part: the walk started at height 1 reaches ``height`` before the
    baseline with probability (1/a₀) / Σ_{r<height} 1/a_r. Horizontal part:
    the extrapolated return-site mass beyond ``half_width``.
    """
    resistance = 1.0 / conductances.values[:height]
    vertical = float(resistance[0] / np.sum(resistance))
    R = couplings.radius
    alpha = couplings.alpha
    c = float(couplings.values[-1]) * R ** alpha
    horizontal = 2.0 * c * max(half_width - R // 2, 1) ** (1.0 - alpha) / (alpha - 1.0)
    return vertical + horizontal


def trace_identity_check(
    n: int,
    s: float,
    factor: float = 16,
    horizon: int = Config.DEFAULT_HORIZON,
    beta: float = 1.0,
    tolerance: Optional[float] = None,
    solver_threshold: Optional[int] = None,
) -> TraceIdentityResult:
    """
    Compare 2β·(chain covariance) with the planar line Green function.

    The chain uses the diamond return-site couplings of ``s``. The planar walk
    runs on the free-bottom half-plane host of half-width factor·n/2 with the
    Bessel conductances; its line Green function is the expected-visit Green
    function of the trace chain killed outside {−n..n}.

    Args:
        n: Chain half-width
        s: Kernel parameter in [0, 1)
        factor: Host half-width in units of n/2 (>= 2)
        horizon: First-return horizon for the couplings
        beta: Inverse temperature of the chain
        tolerance: Pointwise coupling tolerance
        solver_threshold: Largest system factorized directly

    Returns:
        TraceIdentityResult with the max relative bulk discrepancy
    """
    if factor < 2:
        raise ValueError(f"factor must be >= 2, got {factor}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")

    J = bessel_couplings(s, R=2 * n, horizon=horizon, tolerance=tolerance)
    chain_green = 2.0 * beta * chain_covariance(chain_precision(J, n, beta))

    domain = build_domain("half_plane_free_bottom", n=n, factor=factor)
    conductances = diamond_conductances(domain, s)
    solver = GreenSolver(domain, conductances, threshold=solver_threshold)
    line_green = solver.line_green()

    bulk = np.abs(np.arange(-n, n + 1)) <= n / 2
    block = np.ix_(bulk, bulk)
    rel = np.abs(chain_green[block] - line_green[block]) / np.abs(line_green[block])
    discrepancy = float(rel.max())

    half_width = int(math.ceil(factor * n / 2.0))
    bound = escape_bound(conductances, 2 * half_width, half_width, J)
    logger.info(
        f"📊 Trace identity n={n}, s={s}, factor={factor}: discrepancy {discrepancy:.3e}, "
        f"escape bound {bound:.3e}"
    )
    return TraceIdentityResult(
        n=n, s=s, factor=factor,
        discrepancy=discrepancy,
        escape_bound=bound,
        coupling_error=J.truncation_error + J.pointwise_error,
        n_unknowns=domain.n_sites,
        chain_green=chain_green,
        line_green=line_green,
    )


# ------------------------------------------------------------ boundary behaviour


def boundary_profile(
    n: int,
    s: float,
    factor: float = 4,
    window: Optional[Tuple[int, int]] = None,
    per_octave: int = 4,
) -> Tuple[LineFit, np.ndarray, np.ndarray]:
    """
    Log-log fit of G(x, x) against dist(x, L_n) for baseline sites of the slit host.

    Returns:
        (fit, distances, diagonal values)
    """
    window = window or (2, max(4, n // 2))
    domain = build_domain("slit_diamond", n=n, factor=factor, half_plane=True)
    conductances = diamond_conductances(domain, s)
    solver = GreenSolver(domain, conductances)

    offsets = geometric_points(window[0], window[1], per_octave)
    offsets = offsets[offsets <= n + 1]
    sources = [domain.baseline_index(n + 1 - d) for d in offsets]
    distances = domain.distance_to_slit(sources)
    block = solver.green_block(sources)
    diagonal = block[np.arange(len(sources)), sources]
    fit = loglog_fit(distances, diagonal)
    logger.info(f"📊 Boundary profile n={n}, s={s}: slope {fit.slope:.3f}")
    return fit, distances, diagonal


def smoothed_vs_slit_ratio(
    n: int,
    s: float,
    M_values: Sequence[float] = (4, 8, 16),
    delta: float = 0.5,
) -> dict:
    """
    Bulk diagonal Green ratios between the smoothed slit host and the slit
    truncated to the same box, for each M.

    Returns:
        {M: {"mean_ratio", "max_ratio", "min_ratio"}}
    """
    results = {}
    for M in M_values:
        smoothed = build_domain("smoothed_slit", n=n, M=M, half_plane=True)
        slit = build_domain("slit_diamond", n=n, factor=2 * M, half_plane=True)
        conductances = diamond_conductances(slit, s)

        bulk = [k for k in range(-n, n + 1) if abs(k) <= delta * n]
        bulk = [k for k in bulk if smoothed.contains(np.array([[2 * k, 0]]))[0]]
        smooth_diag = _diagonal(GreenSolver(smoothed, conductances), [smoothed.baseline_index(k) for k in bulk])
        slit_diag = _diagonal(GreenSolver(slit, conductances), [slit.baseline_index(k) for k in bulk])
        ratio = smooth_diag / slit_diag
        results[M] = {
            "mean_ratio": float(ratio.mean()),
            "max_ratio": float(ratio.max()),
            "min_ratio": float(ratio.min()),
        }
        logger.info(f"📊 Smoothed/slit ratio n={n}, M={M}: mean {ratio.mean():.4f}")
    return results


def _diagonal(solver: GreenSolver, sources: Sequence[int]) -> np.ndarray:
    block = solver.green_block(sources)
    return block[np.arange(len(sources)), sources]
