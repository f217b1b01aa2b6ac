"""Experiments on long-range chains, their integer-valued versions and the planar free field."""

import logging
import math
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from ..exceptions import ConfigError
from ..fbm import dirichlet_covariance_matrix, log_covariance_matrix, rescale_chain_field, shape_fit
from ..fields import (
    GreenSolver,
    PrecisionOperator,
    boundary_exponent,
    chain_covariance,
    chain_precision,
    long_range_2d_precision,
    nearest_neighbour_precision,
    quadratic_form_band,
    sample_gaussian,
    variance_profile,
    variance_scaling,
)
from ..fields.shift import smooth_bump
from ..gibbs import (
    GibbsModel,
    ObservableSpec,
    effective_beta,
    gaussian_pairing_variance,
    ginibre_sandwich,
    regev_monotonicity,
)
from ..lattice import build_domain
from ..models import ExperimentConfig, FbmSpec, ObservableSet
from ..utils.fitting import affine_fit
from .factories import (
    as_vector,
    build_conditioning,
    build_couplings,
    centre_index,
    observable_rows,
    ratio_with_error,
    sample_model,
)
from .registry import Artifact, ExperimentOutput, check, param, register
from .svg import PlotSpec

logger = logging.getLogger(__name__)

DEFAULT_COUPLINGS = {"source": "power_law", "alpha": 2.5}


def _hurst(alpha: float) -> float:
    return (alpha - 2.0) / 2.0


def _window(config: ExperimentConfig) -> Optional[Tuple[int, int]]:
    window = param(config, "fit_window")
    return tuple(window) if window else None


def _chain_bump(n: int) -> np.ndarray:
    """exp(−1/(1 − t²)) at t = i/n on {−n..n}, divided by n."""
    t = np.arange(-n, n + 1) / float(n)
    g = np.zeros(t.size)
    inside = np.abs(t) < 1.0
    g[inside] = np.exp(-1.0 / (1.0 - t[inside] ** 2))
    return g / float(n)


def _integer_chain(
    config: ExperimentConfig,
    couplings: Dict[str, Any],
    n: int,
    beta: float,
    spacing: float,
    sites: List[int],
    seed_offset: int = 0,
    lam: Optional[float] = None,
    pairing: bool = False,
) -> Tuple[GibbsModel, ObservableSet, np.ndarray]:
    """Sample a chain conditioned at every site; return the model, estimates and Gaussian covariance."""
    J = build_couplings(couplings, 2 * n, seed=config.seed)
    P = chain_precision(J, n, beta)
    conditioning = build_conditioning(P.host, param(config, "conditioning", {"kind": "all"}))
    model = GibbsModel(P, conditioning, spacing=spacing, lam=lam,
                       schedule=param(config, "schedule", "systematic"))
    observables = ObservableSpec(
        sites=[i + n for i in sites],
        pairings={"g": _chain_bump(n)} if pairing else {},
    )
    estimates = sample_model(config, model, observables, seed_offset=seed_offset)
    return model, estimates, chain_covariance(P)


@register("chain_gaussian")
def chain_gaussian(config: ExperimentConfig) -> ExperimentOutput:
    """Variance profile, boundary exponent and form comparison of one Gaussian chain."""
    n = int(param(config, "n", 256))
    beta = float(param(config, "beta", 1.0))
    J = build_couplings(param(config, "couplings", DEFAULT_COUPLINGS), 2 * n, seed=config.seed)
    P = chain_precision(J, n, beta)
    cov = chain_covariance(P)
    variances = variance_profile(cov)
    c = centre_index(P.size)

    rows = [{"i": i, "variance": float(variances[i + n]), "covariance_to_centre": float(cov[c, i + n])}
            for i in range(-n, n + 1)]
    artifacts = [Artifact("variance_profile", rows,
                          PlotSpec(x="i", y=["variance"], title=f"Var(φ(i)), alpha={J.alpha:g}"))]

    band = quadratic_form_band(J, n, int(param(config, "n_vectors", 100)), seed=config.seed)
    summary: Dict[str, Any] = {"alpha": J.alpha, "centre_variance": float(variances[c]), "form_band": band}
    records = []
    if 2.0 < J.alpha < 4.0:
        target = min(2.0 * _hurst(J.alpha), 1.0)
        fit = boundary_exponent(variances, _window(config))
        tol = config.tolerance("exponent", 0.1)
        summary["boundary_fit"] = {"slope": fit.slope, "residual": fit.residual}
        records.append(check(config, "boundary_exponent", fit.slope, target - tol, target + tol, target=target,
                             claim="Var(φ(i)) ∝ (1 − t²)^(2H) near the edge"))

    n_samples = int(param(config, "n_samples", 0))
    if n_samples > 0:
        samples = np.atleast_2d(sample_gaussian(P, seed=config.seed, size=n_samples))
        sample_rows = [{"i": i, **{f"sample_{k}": float(samples[k, i + n]) for k in range(n_samples)}}
                       for i in range(-n, n + 1)]
        artifacts.append(Artifact("samples", sample_rows,
                                  PlotSpec(x="i", y=[f"sample_{k}" for k in range(n_samples)],
                                           title="Gaussian chain samples")))
    return ExperimentOutput(records=records, artifacts=artifacts, summary=summary)


@register("chain_variance_scaling")
def chain_variance_scaling(config: ExperimentConfig) -> ExperimentOutput:
    """Centre variance against n: logarithmic at alpha = 2, a power n^(alpha−2) for 2 < alpha < 3."""
    default_cases = [
        {"label": "spitzer", "couplings": {"source": "spitzer"}, "n_values": [128, 256, 512], "model": "log"},
        {"label": "power_law", "couplings": {"source": "power_law", "alpha": 2.5},
         "n_values": [128, 256, 512, 1024], "model": "power"},
    ]
    beta = float(param(config, "beta", 1.0))
    records, rows, summary = [], [], {}
    for case in param(config, "cases", default_cases):
        label = case.get("label", case["couplings"].get("source", "case"))
        n_values = [int(n) for n in case["n_values"]]
        J = build_couplings(case["couplings"], 2 * max(n_values), seed=config.seed)
        scaling = variance_scaling(lambda n: J, n_values, beta=beta, model=case.get("model", "power"))
        rows += [{"case": label, **row} for row in scaling.as_rows()]
        summary[label] = {"slope": scaling.fit.slope, "intercept": scaling.fit.intercept,
                          "residual": scaling.fit.residual}
        if scaling.model == "log":
            records.append(check(
                config, f"log_residual[{label}]", scaling.fit.residual, upper=config.tolerance("log_residual", 0.02),
                claim="Var(φ_n(0)) = a·log n + b",
            ))
        else:
            target = float(case.get("target_slope", J.alpha - 2.0))
            tol = config.tolerance("slope", 0.1)
            records.append(check(
                config, f"slope[{label}]", scaling.fit.slope, target - tol, target + tol, target=target,
                claim="Var(φ_n(0)) ∝ n^(alpha−2)",
            ))
    artifact = Artifact("variance_scaling", rows,
                        PlotSpec(x="n", y=["variance"], series="case", logx=True, logy=True,
                                 title="Centre variance"))
    return ExperimentOutput(records=records, artifacts=[artifact], summary=summary)


@register("fbm_shape")
def fbm_shape(config: ExperimentConfig) -> ExperimentOutput:
    """Rescaled chain covariance against the Dirichlet fBm kernel (log kernel at alpha = 2)."""
    n = int(param(config, "n", 1024))
    beta = float(param(config, "beta", 1.0))
    stride = int(param(config, "stride", 16))
    bulk = float(param(config, "bulk", 0.8))
    J = build_couplings(param(config, "couplings", DEFAULT_COUPLINGS), 2 * n, seed=config.seed)
    if J.alpha >= 3.0:
        raise ConfigError(f"fBm comparison needs 2 <= alpha < 3, got {J.alpha}")
    spec = FbmSpec.from_alpha(max(J.alpha, 2.0), beta=beta)
    H = spec.H

    cov = chain_covariance(chain_precision(J, n, beta))
    field = rescale_chain_field(cov, n, H)
    # Subsample on a grid through the centre t = 0
    centre = n - 1
    idx = np.arange(centre % stride, field.t.size, stride)
    t = field.t[idx]
    empirical = field.values[np.ix_(idx, idx)]
    if H > 0:
        target = dirichlet_covariance_matrix(H, t, beta=1.0)
        include_diagonal = True
    else:
        target = log_covariance_matrix(t, beta=1.0)
        include_diagonal = False

    fit = shape_fit(empirical, target, t, beta=beta, bulk=bulk, include_diagonal=include_diagonal)
    scale = fit.scale
    rows = []
    for a, x in enumerate(t):
        for b, y in enumerate(t):
            expected = scale * target[a, b]
            rows.append({
                "x": float(x), "y": float(y),
                "empirical": float(empirical[a, b]),
                "target": float(expected),
                "residual": float(abs(empirical[a, b] - expected) / abs(expected))
                if np.isfinite(expected) and expected != 0 else float("nan"),
            })

    records = [check(config, "shape_residual", fit.residual, upper=config.tolerance("shape", 0.05),
                     target=0.0, claim="rescaled covariance matches K⁻²·kernel in the bulk")]
    spec = spec.model_copy(update={"K": fit.K})
    summary: Dict[str, Any] = {**spec.model_dump(), "u": spec.u, "scale": scale, "n_entries": fit.n_entries}
    if H > 0:
        profile = boundary_exponent(variance_profile(cov), _window(config))
        tol = config.tolerance("exponent", 0.1)
        records.append(check(config, "boundary_exponent", profile.slope, 2 * H - tol, 2 * H + tol,
                             target=2 * H, claim="Var(φ(i)) ∝ (1 − t²)^(2H) near the edge"))
    artifact = Artifact("fbm_shape", rows,
                        PlotSpec(x="x", y=["empirical", "target"], scatter=True, title=f"Covariance shape, H={H:g}"))
    return ExperimentOutput(records=records, artifacts=[artifact], summary=summary)


@register("chain_integer")
def chain_integer(config: ExperimentConfig) -> ExperimentOutput:
    """Heat-bath estimates for a chain with lattice-valued (or sine-Gordon) sites."""
    n = int(param(config, "n", 64))
    beta = float(param(config, "beta", 1.0))
    spacing = float(param(config, "spacing", 2.0 * math.pi))
    lam = param(config, "lam")
    sites = [int(i) for i in param(config, "sites", [0])]
    model, estimates, cov = _integer_chain(
        config, param(config, "couplings", DEFAULT_COUPLINGS), n, beta, spacing, sites,
        lam=None if lam is None else float(lam), pairing=True,
    )
    rows = observable_rows(estimates, {"kind": model.kind})
    for row in rows:
        if row["observable"].startswith("var["):
            index = int(row["observable"][4:-1])
            row["gaussian"] = float(cov[index, index])
    records = []
    lower, upper = config.tolerances.get("ratio_lower"), config.tolerances.get("ratio_upper")
    multiplier = config.tolerance("error_multiplier", 2.0)
    for i in sites:
        ratio, err = ratio_with_error(estimates[f"var[{i + n}]"].value, estimates[f"var[{i + n}]"].stderr,
                                      float(cov[i + n, i + n]))
        records.append(check(config, f"variance_ratio[i={i}]", ratio, lower, upper, error=err,
                             error_multiplier=multiplier, claim="Var(Ψ(i)) / Var_Gauss(φ(i))"))

    g = _chain_bump(n)
    beta_eff, beta_err = effective_beta(model, g, estimates)
    summary = {
        "model": repr(model),
        "beta_eff": beta_eff,
        "beta_eff_stderr": beta_err,
        "equilibration_warning": estimates.equilibration_warning,
        "max_window_tail": estimates.max_window_tail,
        "acceptance_rate": estimates.acceptance_rate,
    }
    return ExperimentOutput(records=records, artifacts=[Artifact("observables", rows)], summary=summary)


@register("chain_invisibility")
def chain_invisibility(config: ExperimentConfig) -> ExperimentOutput:
    """Integer-valued chain at high temperature against its Gaussian version, with a low-temperature contrast."""
    n = int(param(config, "n", 256))
    beta = float(param(config, "beta", 0.05))
    spacing = float(param(config, "spacing", 2.0 * math.pi))
    multiplier = config.tolerance("error_multiplier", 2.0)
    records, rows = [], []

    _, estimates, cov = _integer_chain(config, param(config, "couplings", DEFAULT_COUPLINGS), n, beta, spacing, [0])
    ratio, err = ratio_with_error(estimates[f"var[{n}]"].value, estimates[f"var[{n}]"].stderr, float(cov[n, n]))
    rows += observable_rows(estimates, {"case": "invisible", "n": n, "beta": beta})
    records.append(check(
        config, "variance_ratio", ratio, config.tolerance("ratio_lower", 0.9), config.tolerance("ratio_upper", 1.0),
        error=err, target=1.0, error_multiplier=multiplier,
        claim="lattice-valued chain at small beta has the Gaussian centre variance",
    ))

    contrast = param(config, "contrast", {"couplings": {"source": "spitzer"}, "n": 128, "beta": 10.0})
    if contrast:
        cn = int(contrast.get("n", 128))
        cbeta = float(contrast.get("beta", 10.0))
        _, c_estimates, c_cov = _integer_chain(config, contrast.get("couplings", {"source": "spitzer"}),
                                               cn, cbeta, spacing, [0], seed_offset=1)
        c_ratio, c_err = ratio_with_error(c_estimates[f"var[{cn}]"].value, c_estimates[f"var[{cn}]"].stderr,
                                          float(c_cov[cn, cn]))
        rows += observable_rows(c_estimates, {"case": "localized", "n": cn, "beta": cbeta})
        records.append(check(
            config, "contrast_variance_ratio", c_ratio, upper=config.tolerance("contrast_upper", 0.2),
            error=c_err, claim="lattice-valued chain at alpha = 2 and large beta localizes",
        ))
    return ExperimentOutput(records=records, artifacts=[Artifact("invisibility", rows)],
                            summary={"equilibration_warning": estimates.equilibration_warning})


def _test_vectors(config: ExperimentConfig, size: int) -> Dict[str, np.ndarray]:
    custom = param(config, "vectors")
    if custom:
        return {name: as_vector(values, size) for name, values in custom.items()}
    centre = np.zeros(size)
    centre[centre_index(size)] = 0.5
    return {
        "centre": centre,
        "flat": np.full(size, 0.3),
        "alternating": 0.3 * (-1.0) ** np.arange(size),
    }


@register("correlation_inequalities")
def correlation_inequalities(config: ExperimentConfig) -> ExperimentOutput:
    """Laplace-transform sandwich and precision monotonicity on small chains, by exact enumeration."""
    half_width = int(param(config, "half_width", 2))
    K = int(param(config, "K", 5))
    slack_tol = config.tolerance("slack", 1e-12)
    default_cases = [
        {"alpha": 2.5, "beta": 1.0, "spacing": 1.0, "lam": 1.0},
        {"alpha": 2.5, "beta": 2.0, "spacing": 1.0, "lam": 0.5},
        {"alpha": 3.0, "beta": 1.0, "spacing": 0.8, "lam": 2.0},
    ]
    records, rows = [], []
    for k, case in enumerate(param(config, "cases", default_cases)):
        J = build_couplings({"source": "power_law", "alpha": case.get("alpha", 2.5)}, 2 * half_width)
        P = chain_precision(J, half_width, float(case.get("beta", 1.0)))
        spacing = float(case.get("spacing", 1.0))
        model = GibbsModel(P, np.arange(P.size), spacing=spacing)
        vectors = _test_vectors(config, P.size)
        sandwich = ginibre_sandwich(model, vectors, K=K, lam=float(case.get("lam", 1.0)))
        rows += [{"case": k, **row} for row in sandwich]
        worst = min(min(row["lower_slack"], row["upper_slack"]) for row in sandwich)
        records.append(check(config, f"sandwich_min_slack[case={k}]", worst, lower=-slack_tol,
                             claim="integer ≤ sine-Gordon ≤ Gaussian Laplace transforms"))

        A = P.dense()
        B = A + float(case.get("shift", 0.5)) * np.eye(P.size)
        slacks = regev_monotonicity(A, B, list(vectors.values()), K=int(param(config, "regev_K", 6)),
                                    spacing=spacing)
        for name, slack in zip(vectors, slacks):
            rows.append({"case": k, "vector": name, "regev_slack": slack})
        records.append(check(config, f"monotonicity_min_slack[case={k}]", min(slacks), lower=-slack_tol,
                             claim="E_A⟨v, ψ⟩² ≥ E_B⟨v, ψ⟩² for A ≤ B"))
    return ExperimentOutput(records=records, artifacts=[Artifact("inequalities", rows)])


def _probe_sites(n: int) -> List[Tuple[int, int]]:
    return [(n // 4, 0), (-n // 4, 0), (0, n // 8), (n // 4, n // 8)]


@register("line_conditioned_gff")
def line_conditioned_gff(config: ExperimentConfig) -> ExperimentOutput:
    """Planar free field with lattice values imposed on the horizontal line."""
    n = int(param(config, "n", 64))
    beta = float(param(config, "beta", 0.1))
    spacing = float(param(config, "spacing", 1.0))
    multiplier = config.tolerance("error_multiplier", 2.0)
    probes = [tuple(p) for p in param(config, "probes", _probe_sites(n))]
    records, rows, summary = [], [], {}

    for k, geometry in enumerate(param(config, "geometries", ["box2d", "torus2d"])):
        domain = build_domain(geometry, n=n)
        P = nearest_neighbour_precision(domain, beta)
        model = GibbsModel(P, build_conditioning(domain, param(config, "conditioning")), spacing=spacing)
        g = smooth_bump(domain, n)
        indices = [domain.index_of(p) for p in probes]
        observables = ObservableSpec(sites=indices, pairings={"g": g})
        estimates = sample_model(config, model, observables, seed_offset=k)

        solver = GreenSolver(domain, threshold=config.solver_threshold)
        block = solver.green_block(indices)
        reference = [float(block[j, idx] / (beta * solver.degree[idx])) for j, idx in enumerate(indices)]
        rows += observable_rows(estimates, {"geometry": geometry})
        for p, idx, ref in zip(probes, indices, reference):
            ratio, err = ratio_with_error(estimates[f"var[{idx}]"].value, estimates[f"var[{idx}]"].stderr, ref)
            records.append(check(
                config, f"variance_ratio[{geometry},{p[0]},{p[1]}]", ratio,
                config.tolerance("ratio_lower", 0.9), config.tolerance("ratio_upper", 1.0),
                error=err, target=1.0, error_multiplier=multiplier,
                claim="bulk variance is close to the free-field variance",
            ))

        beta_eff, beta_err = effective_beta(model, g, estimates, gaussian_pairing_variance(model, g))
        records.append(check(
            config, f"beta_eff_ratio[{geometry}]", beta_eff / beta,
            config.tolerance("beta_eff_lower", 1.0), config.tolerance("beta_eff_upper", 1.15),
            error=beta_err / beta, error_multiplier=multiplier,
            claim="smooth pairings see an effective temperature close to beta",
        ))
        summary[geometry] = {"model": repr(model), "beta_eff": beta_eff, "beta_eff_stderr": beta_err,
                             "equilibration_warning": estimates.equilibration_warning}
    return ExperimentOutput(records=records, artifacts=[Artifact("observables", rows)], summary=summary)


def _long_range_2d_variance(config: ExperimentConfig, n: int, alpha: float, beta: float, spacing: float,
                            seed_offset: int) -> Tuple[float, float, float]:
    P: PrecisionOperator = long_range_2d_precision(n, alpha, beta)
    model = GibbsModel(P, np.arange(P.size), spacing=spacing)
    centre = P.host.index_of((0, 0))
    estimates = sample_model(config, model, ObservableSpec(sites=[centre]), seed_offset=seed_offset)
    reference = float(chain_covariance(P)[centre, centre])
    return estimates[f"var[{centre}]"].value, estimates[f"var[{centre}]"].stderr, reference


@register("regimes")
def regimes(config: ExperimentConfig) -> ExperimentOutput:
    """Localization below alpha = 2, Brownian growth above alpha = 3, and a planar long-range model."""
    records, rows, summary = [], [], {}
    beta = float(param(config, "beta", 1.0))

    low = param(config, "localized", {"alpha": 1.5, "n_values": [256, 1024]})
    n_small, n_large = (int(n) for n in low["n_values"])
    J = build_couplings({"source": "power_law", "alpha": low["alpha"]}, 2 * n_large)
    var = {n: float(chain_covariance(chain_precision(J, n, beta))[n, n]) for n in (n_small, n_large)}
    rows += [{"regime": "localized", "n": n, "variance": v} for n, v in var.items()]
    records.append(check(
        config, "localized_variance_change", abs(var[n_large] / var[n_small] - 1.0),
        upper=config.tolerance("localized", 0.05), target=0.0,
        claim="Var(φ_n(0)) stays bounded for alpha < 2",
    ))

    high = param(config, "brownian", {"alpha": 3.5, "n_values": [128, 256, 512, 1024]})
    n_values = [int(n) for n in high["n_values"]]
    J = build_couplings({"source": "power_law", "alpha": high["alpha"]}, 2 * max(n_values))
    scaling = variance_scaling(lambda n: J, n_values, beta=beta, model="power")
    rows += [{"regime": "brownian", **row} for row in scaling.as_rows()]
    tol = config.tolerance("exponent", 0.1)
    records.append(check(config, "brownian_slope", scaling.fit.slope, 1.0 - tol, 1.0 + tol, target=1.0,
                         claim="Var(φ_n(0)) ∝ n for alpha > 3"))

    planar = param(config, "planar", {"alpha": 4.5, "beta": 0.2, "n_values": [3, 5, 7], "spacing": 1.0})
    if planar:
        planar_n = [int(n) for n in planar["n_values"]]
        variances = []
        for k, n in enumerate(planar_n):
            value, stderr, reference = _long_range_2d_variance(
                config, n, float(planar["alpha"]), float(planar["beta"]), float(planar.get("spacing", 1.0)), k,
            )
            variances.append(value)
            rows.append({"regime": "planar", "n": n, "variance": value, "stderr": stderr, "gaussian": reference})
        fit = affine_fit(np.log(planar_n), np.asarray(variances))
        summary["planar_fit"] = {"slope": fit.slope, "intercept": fit.intercept}
        records.append(check(config, "planar_log_slope", fit.slope, lower=0.0,
                             claim="lattice-valued planar long-range field delocalizes at small beta"))

    informational = param(config, "integer_localized")
    if informational:
        n = int(informational.get("n", 64))
        _, estimates, cov = _integer_chain(
            config, {"source": "power_law", "alpha": float(informational.get("alpha", 1.5))}, n,
            float(informational.get("beta", beta)), float(informational.get("spacing", 1.0)), [0], seed_offset=100,
        )
        summary["integer_localized"] = {"variance": estimates[f"var[{n}]"].value,
                                        "stderr": estimates[f"var[{n}]"].stderr,
                                        "gaussian": float(cov[n, n])}

    artifact = Artifact("regimes", rows,
                        PlotSpec(x="n", y=["variance"], series="regime", logx=True, logy=True,
                                 title="Centre variance by regime"))
    summary["brownian_fit"] = {"slope": scaling.fit.slope, "residual": scaling.fit.residual}
    return ExperimentOutput(records=records, artifacts=[artifact], summary=summary)
