"""Markov chain runs with batch-means error bars, and effective temperatures."""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Tuple

import numpy as np
from scipy.sparse.linalg import spsolve
from tqdm import tqdm

from ..config import Config
from ..fields.precision import chain_covariance
from ..models import ObservableEstimate, ObservableSet
from ..utils.rng import spawn_generators
from ..utils.statistics import batch_means, monotone_drift
from .heat_bath import SamplerState, heat_bath_sweep
from .model import GibbsModel, ObservableSpec

logger = logging.getLogger(__name__)


def _run_chain(
    model: GibbsModel,
    sweeps: int,
    burn_in: int,
    observables: ObservableSpec,
    rng: np.random.Generator,
    show_progress: bool,
) -> Tuple[np.ndarray, SamplerState]:
    state = SamplerState.initial(model, rng=rng)
    recorded = np.empty((sweeps - burn_in, len(observables.names())))
    steps = range(sweeps)
    if show_progress:
        steps = tqdm(steps, desc=f"Sweeps ({model.kind})", unit="sweeps")
    for t in steps:
        heat_bath_sweep(model, state)
        if t + 1 == burn_in:
            state.burned_in = True
        if t >= burn_in:
            recorded[t - burn_in] = observables.evaluate(state.phi)
    return recorded, state


def run_experiment(
    model: GibbsModel,
    sweeps: int,
    burn_in: int,
    observables: ObservableSpec,
    seed: int = 0,
    n_batches: int = Config.MIN_BATCHES,
    n_chains: int = 1,
    num_workers: Optional[int] = None,
    show_progress: bool = False,
) -> ObservableSet:
    """
    Run independent heat-bath chains and summarise observables by batch means.

    Each chain gets its own stream spawned from ``seed``. Chains run on a
    thread pool and are merged in chain order, so the estimates depend only
    on the arguments.

    Args:
        model: Gibbs model
        sweeps: Sweeps per chain, including burn-in
        burn_in: Sweeps discarded at the start of each chain
        observables: Observables recorded after every sweep
        seed: Root seed
        n_batches: Batches per chain (>= 20)
        n_chains: Independent chains
        num_workers: Threads (default: Config.THREADS)
        show_progress: Show a progress bar for the first chain

    Returns:
        ObservableSet with one estimate per observable
    """
    if sweeps <= burn_in:
        raise ValueError(f"sweeps ({sweeps}) must exceed burn_in ({burn_in})")
    if n_batches < Config.MIN_BATCHES:
        raise ValueError(f"n_batches must be >= {Config.MIN_BATCHES}, got {n_batches}")
    if sweeps - burn_in < n_batches:
        raise ValueError(f"{sweeps - burn_in} recorded sweeps cannot fill {n_batches} batches")
    names = observables.names()
    if not names:
        raise ValueError("No observables requested")

    streams = spawn_generators(seed, n_chains)
    workers = min(n_chains, num_workers or Config.THREADS)
    logger.info(f"🚀 {n_chains} chain(s) of {sweeps} sweeps on {model} with {workers} threads")

    results: List[Tuple[np.ndarray, SamplerState]] = [None] * n_chains
    with ThreadPoolExecutor(max_workers=workers) as executor:
        futures = {
            executor.submit(
                _run_chain, model, sweeps, burn_in, observables, streams[i], show_progress and i == 0
            ): i
            for i in range(n_chains)
        }
        for future in futures:
            results[futures[future]] = future.result()

    batches = np.concatenate([batch_means(rec, n_batches).batches for rec, _ in results], axis=0)
    drift = any(
        monotone_drift(batch_means(rec, n_batches).batches[:, k])
        for rec, _ in results
        for k in range(len(names))
    )
    if drift:
        logger.warning(f"⚠️  Batch means drift monotonically for {model}; chains may not be equilibrated")

    mean = batches.mean(axis=0)
    stderr = batches.std(axis=0, ddof=1) / math.sqrt(batches.shape[0])
    estimates = {
        name: ObservableEstimate(value=float(mean[k]), stderr=float(stderr[k]), n_batches=int(batches.shape[0]))
        for k, name in enumerate(names)
    }

    accepted = sum(state.accepted for _, state in results)
    proposed = sum(state.proposed for _, state in results)
    return ObservableSet(
        estimates=estimates,
        sweeps=sweeps,
        burn_in=burn_in,
        n_chains=n_chains,
        equilibration_warning=drift,
        max_window_tail=max(state.max_window_tail for _, state in results),
        acceptance_rate=accepted / proposed if proposed else None,
    )


def gaussian_pairing_variance(model: GibbsModel, g: np.ndarray) -> float:
    """gᵀQ⁻¹g for the unconstrained Gaussian field."""
    if model.precision.is_sparse:
        return float(g @ spsolve(model.precision.matrix.tocsc(), g))
    return float(g @ chain_covariance(model.precision) @ g)


def effective_beta(
    model: GibbsModel,
    g: np.ndarray,
    observables: ObservableSet,
    reference_variance: Optional[float] = None,
    key: str = "pairing[g]",
) -> Tuple[float, float]:
    """
    β_eff = β · Var_Gauss⟨φ, g⟩ / Var⟨Ψ, g⟩ with a delta-method error.

    Args:
        model: Model the observables were sampled from
        g: Test function over all sites
        observables: Output of run_experiment containing ``key``
        reference_variance: Var_Gauss⟨φ, g⟩ at the model's β (computed when omitted)
        key: Name of the ⟨Ψ, g⟩² observable

    Returns:
        (β_eff, standard error)
    """
    if key not in observables:
        raise KeyError(f"Observable {key} was not recorded")
    estimate = observables[key]
    if estimate.value <= 0:
        raise ValueError(f"Test function has zero sampled variance ({key})")
    g = np.asarray(g, dtype=float)
    reference = gaussian_pairing_variance(model, g) if reference_variance is None else reference_variance
    if reference <= 0:
        raise ValueError("Test function has zero Gaussian variance")
    value = model.beta * reference / estimate.value
    return value, value * estimate.stderr / estimate.value
