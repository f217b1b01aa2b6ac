"""Builders turning experiment params into package objects."""

import logging
from typing import Any, Dict, Optional

import numpy as np
from pydantic import ValidationError

from ..config import Config
from ..couplings import (
    bessel_couplings,
    fourier_couplings,
    grid_bessel_couplings,
    power_law_couplings,
    spitzer_couplings,
)
from ..exceptions import ConfigError
from ..gibbs import GibbsModel, ObservableSpec, run_experiment
from ..lattice import ConditioningSet, LatticeDomain, fractal_set, line_set, strip_set
from ..models import CouplingSequence, DomainSpec, ExperimentConfig, ObservableSet

logger = logging.getLogger(__name__)

SOURCES = ("spitzer", "power_law", "fourier", "bessel", "grid_bessel")


def _alpha(params: Dict[str, Any]) -> float:
    if "alpha" in params:
        return float(params["alpha"])
    if "s" in params:
        return 2.0 + float(params["s"])
    if "u" in params:
        return 2.0 * float(params["u"]) + 1.0
    raise ConfigError("Coupling params need one of alpha, s or u")


def build_couplings(params: Dict[str, Any], R: int, seed: int = 0, show_progress: bool = False) -> CouplingSequence:
    """
    Coupling sequence of radius R described by ``params``.

    Keys: source (spitzer, power_law, fourier, bessel, grid_bessel), one of
    alpha/s/u, and for walk-derived sources horizon, method, n_walks, d.
    """
    source = params.get("source", "power_law")
    if source not in SOURCES:
        raise ConfigError(f"Unknown coupling source: {source}. Use one of {SOURCES}")
    if source == "spitzer":
        return spitzer_couplings(R)
    alpha = _alpha(params)
    if source == "power_law":
        return power_law_couplings(alpha, R)
    if source == "fourier":
        return fourier_couplings(
            (alpha - 1.0) / 2.0, R,
            quadrature_points=int(params.get("quadrature_points", Config.FOURIER_QUADRATURE_POINTS)),
        )
    walk_args = dict(
        horizon=int(params.get("horizon", Config.DEFAULT_HORIZON)),
        method=params.get("method", "dp"),
        n_walks=int(params.get("n_walks", 10 ** 5)),
        seed=seed,
        tolerance=params.get("tolerance"),
        show_progress=show_progress,
    )
    if source == "bessel":
        return bessel_couplings(alpha - 2.0, R, **walk_args)
    return grid_bessel_couplings(int(params.get("d", 1)), alpha - 2.0, R, **walk_args)


def build_domain_from(params: Dict[str, Any]) -> LatticeDomain:
    try:
        return DomainSpec.model_validate(params).build()
    except ValidationError as e:
        raise ConfigError(f"Invalid domain description {params}:\n{e}") from e


def build_conditioning(domain: LatticeDomain, spec: Optional[Dict[str, Any]]) -> Optional[ConditioningSet]:
    """
    Conditioning set from {"kind": "line" | "strip" | "fractal" | "all" | "none", ...}.
    """
    spec = spec or {"kind": "line"}
    kind = spec.get("kind", "line")
    if kind == "none":
        return None
    if kind == "line":
        return line_set(domain)
    if kind == "strip":
        return strip_set(domain, int(spec.get("B", 0)))
    if kind == "fractal":
        return fractal_set(int(spec.get("k", 2)), spec.get("mask", ((0, 1, 0), (1, 1, 1), (0, 1, 0))), domain)
    if kind == "all":
        return ConditioningSet("all", domain, domain.coords)
    raise ConfigError(f"Unknown conditioning kind: {kind}. Use line, strip, fractal, all or none")


def centre_index(size: int) -> int:
    return size // 2


def sample_model(
    config: ExperimentConfig,
    model: GibbsModel,
    observables: ObservableSpec,
    seed_offset: int = 0,
    show_progress: bool = False,
) -> ObservableSet:
    """Run the heat-bath sampler with the sweeps, burn-in and batches of ``config``."""
    if config.sweeps is None or config.burn_in is None:
        raise ConfigError(f"Experiment {config.id} needs sweeps and burn_in")
    return run_experiment(
        model,
        sweeps=config.sweeps,
        burn_in=config.burn_in,
        observables=observables,
        seed=config.seed + seed_offset,
        n_batches=config.n_batches,
        n_chains=int(config.params.get("n_chains", 1)),
        show_progress=show_progress,
    )


def ratio_with_error(value: float, stderr: float, reference: float) -> tuple:
    if reference <= 0:
        raise ValueError("Reference variance must be positive")
    return value / reference, stderr / reference


def observable_rows(observables: ObservableSet, label: Dict[str, Any] = None) -> list:
    label = label or {}
    return [
        {**label, "observable": name, "estimate": est.value, "stderr": est.stderr, "batches": est.n_batches}
        for name, est in observables.estimates.items()
    ]


def as_vector(values, size: int) -> np.ndarray:
    vector = np.asarray(values, dtype=float)
    if vector.shape != (size,):
        raise ConfigError(f"Expected a vector of {size} values, got shape {vector.shape}")
    return vector
