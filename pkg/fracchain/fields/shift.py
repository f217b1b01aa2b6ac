"""Shift functions σ = (1/β)(−Δ)⁻¹f and their energy along the baseline."""

import logging
from dataclasses import dataclass
from typing import Dict, Optional, Tuple, Union

import numpy as np

from ..lattice.domains import LatticeDomain
from ..models import ConductanceField
from ..utils.fitting import LineFit, geometric_points, loglog_fit
from .green import GreenSolver

logger = logging.getLogger(__name__)

SiteFunction = Union[np.ndarray, Dict[Tuple[int, int], float]]


@dataclass
class ShiftFunction:
    """σ on the alive sites of ``domain``; zero on killed sites."""

    domain: LatticeDomain
    sigma: np.ndarray
    f: np.ndarray
    beta: float

    def line_values(self) -> np.ndarray:
        return self.sigma[self.domain.baseline_indices()]


def _as_site_array(domain: LatticeDomain, f: SiteFunction) -> np.ndarray:
    if isinstance(f, dict):
        out = np.zeros(domain.n_sites)
        for site, value in f.items():
            out[domain.index_of(site)] = value
        return out
    out = np.asarray(f, dtype=float)
    if out.shape != (domain.n_sites,):
        raise ValueError(f"Test function must have one value per alive site ({domain.n_sites}), got {out.shape}")
    return out


def line_energy(domain: LatticeDomain, values: np.ndarray) -> float:
    """Σ over consecutive baseline positions k, k+1 of (σ_{k+1} − σ_k)²."""
    line = domain.baseline_indices()
    positions = domain.baseline_positions()
    adjacent = np.diff(positions) == 1
    jumps = np.diff(values[line])[adjacent]
    return float(np.sum(jumps ** 2))


def shift_and_line_energy(
    domain: LatticeDomain,
    conductances: Optional[ConductanceField],
    f: SiteFunction,
    beta: float = 1.0,
    solver: Optional[GreenSolver] = None,
) -> Tuple[ShiftFunction, float]:
    """
    σ = (1/β)(D − A)⁻¹(D f) and its Dirichlet energy along the baseline.

    ``f`` is a site function in expected-visit normalisation, so that
    σ(x) = (1/β) Σ_y G(x, y) f(y).

    Args:
        domain: Host domain
        conductances: Edge conductances (None for uniform weights)
        f: Array over alive sites, or a mapping site -> value
        beta: Inverse temperature
        solver: Reusable factorization of the same domain

    Returns:
        (ShiftFunction, line energy)
    """
    if beta <= 0:
        raise ValueError(f"beta must be > 0, got {beta}")
    f = _as_site_array(domain, f)
    solver = solver or GreenSolver(domain, conductances)
    w, _ = solver.solve(solver.degree * f)
    sigma = w / beta
    energy = line_energy(domain, sigma)
    logger.debug(f"Shift on {domain.kind}: line energy {energy:.4e}")
    return ShiftFunction(domain=domain, sigma=sigma, f=f, beta=beta), energy


def gradient_decay(
    domain: LatticeDomain,
    conductances: Optional[ConductanceField],
    x: Tuple[int, int],
    window: Tuple[int, int],
    solver: Optional[GreenSolver] = None,
    per_octave: int = 8,
) -> LineFit:
    """
    Decay of |G(x, y+1) − G(x, y)| with the baseline distance |y − x|.

    The source ``x`` is given in index coordinates; baseline sites to its
    right are used. The fitted slope is negated, so |∇G| ~ d^(−a) gives a.
    """
    solver = solver or GreenSolver(domain, conductances)
    table = solver.green_row(x)
    positions = domain.baseline_positions()
    values = table.line_values()
    origin = x[0] // 2 if domain.lattice == "diamond" else x[0]

    lookup = dict(zip(positions.tolist(), values.tolist()))
    distances = geometric_points(window[0], window[1], per_octave)
    keep, gradients = [], []
    for d in distances:
        k = origin + int(d)
        if k in lookup and k + 1 in lookup:
            keep.append(d)
            gradients.append(abs(lookup[k + 1] - lookup[k]))
    if len(keep) < 2:
        raise ValueError(f"Window {window} has fewer than 2 baseline points in {domain.kind}")

    fit = loglog_fit(np.asarray(keep), np.asarray(gradients))
    return LineFit(slope=-fit.slope, intercept=fit.intercept, residual=fit.residual, n_points=fit.n_points)


def smooth_bump(domain: LatticeDomain, n: int, centre: Tuple[float, float] = (0.0, 0.0), radius: float = 0.5) -> np.ndarray:
    """
    Volume-normalised bump g(z/n) / n² with g(z) = exp(−1/(1 − |z − c|²/r²)).

    Coordinates are physical and scaled by ``n``.
    """
    z = domain.physical() / float(n)
    rho2 = np.sum((z - np.asarray(centre)) ** 2, axis=1) / radius ** 2
    bump = np.zeros(domain.n_sites)
    inside = rho2 < 1.0
    bump[inside] = np.exp(-1.0 / (1.0 - rho2[inside]))
    return bump / float(n) ** 2
