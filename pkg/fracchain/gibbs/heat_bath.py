"""Heat-bath updates from exact full conditionals."""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.stats import norm

from ..config import Config
from ..utils.rng import make_generator
from .model import GibbsModel

logger = logging.getLogger(__name__)


@dataclass
class SamplerState:
    """Current field and bookkeeping of one Markov chain."""

    phi: np.ndarray
    rng: np.random.Generator
    sweep: int = 0
    burned_in: bool = False
    accepted: int = 0
    proposed: int = 0
    max_window_tail: float = 0.0

    @classmethod
    def initial(cls, model: GibbsModel, seed=None, rng: Optional[np.random.Generator] = None) -> "SamplerState":
        """All-zero start, which is admissible for every conditioning."""
        return cls(phi=np.zeros(model.size), rng=rng if rng is not None else make_generator(seed))

    @property
    def acceptance_rate(self) -> Optional[float]:
        return self.accepted / self.proposed if self.proposed else None


def discrete_gaussian_window(mu: np.ndarray, q: np.ndarray, spacing: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Lattice points and probabilities of P(m) ∝ exp(−q(m·v − μ)²/2).

    The window covers ±⌈6/√(q v²)⌉ points around μ/v; one width (the largest
    over the batch) is used for every row. The mass beyond each end of the
    window is folded into the end atom through the Gaussian integral
    Σ_{m > m_end} w(m) ≈ ∫_{m_end + ½}^∞ w.

    Returns:
        (m values, probabilities, folded tail mass per row)
    """
    centre = mu / spacing
    width = np.ceil(Config.DG_WINDOW_SIGMAS / np.sqrt(q * spacing ** 2)).astype(np.int64)
    w = int(width.max())
    offsets = np.arange(-w, w + 2)
    m = np.floor(centre)[:, None] + offsets[None, :]
    log_p = -0.5 * q[:, None] * (m * spacing - mu[:, None]) ** 2

    sd = 1.0 / np.sqrt(q)
    log_scale = np.log(np.sqrt(2.0 * math.pi) * sd / spacing)
    log_left = log_scale + norm.logsf((mu - (m[:, 0] - 0.5) * spacing) / sd)
    log_right = log_scale + norm.logsf(((m[:, -1] + 0.5) * spacing - mu) / sd)

    shift = log_p.max(axis=1)
    p = np.exp(log_p - shift[:, None])
    left, right = np.exp(log_left - shift), np.exp(log_right - shift)
    p[:, 0] += left
    p[:, -1] += right
    total = p.sum(axis=1)
    p /= total[:, None]
    return m, p, (left + right) / total


def sample_discrete_gaussian(
    mu: np.ndarray, q: np.ndarray, spacing: float, rng: np.random.Generator
) -> Tuple[np.ndarray, float]:
    """Draws from the windowed discrete Gaussians by inverse CDF, tails folded into the end atoms."""
    m, p, tail = discrete_gaussian_window(mu, q, spacing)
    cdf = np.cumsum(p, axis=1)
    u = rng.random(mu.size)
    choice = np.minimum((cdf < u[:, None]).sum(axis=1), m.shape[1] - 1)
    return m[np.arange(mu.size), choice] * spacing, float(tail.max())


def heat_bath_sweep(model: GibbsModel, state: SamplerState) -> SamplerState:
    """
    Update every site once from its full conditional, class by class.

    With precision Q the conditional of site i is N(μ_i, 1/q_i), where
    q_i = Q_ii and μ_i = φ_i − (Qφ)_i / q_i. Conditioned sites then draw
    from the discrete Gaussian on v·ℤ, or accept the Gaussian proposal with
    probability exp(λ(cos(2πφ'/v) − cos(2πφ/v))).
    """
    rng = state.rng
    phi = state.phi
    order = range(len(model.classes))
    if model.schedule == "random":
        order = rng.permutation(len(model.classes))

    kind = model.kind
    kappa = 2.0 * math.pi / model.spacing
    for c in order:
        sites = model.classes[c]
        q = model.diagonal[sites]
        mu = phi[sites] - (model.Q[sites] @ phi) / q
        proposal = mu + rng.standard_normal(sites.size) / np.sqrt(q)

        constrained = model.mask[sites] if kind != "gaussian" else np.zeros(sites.size, dtype=bool)
        new = proposal
        if constrained.any():
            if kind == "integer":
                values, tail = sample_discrete_gaussian(mu[constrained], q[constrained], model.spacing, rng)
                new[constrained] = values
                state.max_window_tail = max(state.max_window_tail, tail)
            else:
                old = phi[sites][constrained]
                prop = proposal[constrained]
                log_ratio = model.lam * (np.cos(kappa * prop) - np.cos(kappa * old))
                accept = np.log(rng.random(prop.size)) < log_ratio
                new[constrained] = np.where(accept, prop, old)
                state.accepted += int(accept.sum())
                state.proposed += int(prop.size)
        phi[sites] = new

    state.sweep += 1
    return state
