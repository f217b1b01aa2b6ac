"""Experiments on Bessel walks and the couplings they induce."""

import logging
import math

import numpy as np

from ..bessel import decay_exponent, first_return_law, return_probability_profile, simulate_walk
from ..config import Config
from ..couplings import bessel_couplings, grid_bessel_couplings, spitzer_couplings, tail_exponent_fit
from ..models import ExperimentConfig, WalkSpec
from ..utils.fitting import geometric_points
from .factories import build_couplings
from .registry import Artifact, ExperimentOutput, check, param, register
from .svg import PlotSpec

logger = logging.getLogger(__name__)


@register("couplings")
def couplings_table(config: ExperimentConfig) -> ExperimentOutput:
    """One coupling sequence, its tail fit and error budget."""
    R = int(param(config, "R", 256))
    J = build_couplings(config.params, R, seed=config.seed)
    summary = {
        "source": J.source.value,
        "alpha": J.alpha,
        "radius": J.radius,
        "truncation_error": J.truncation_error,
        "pointwise_error": J.pointwise_error,
        "mass_at_zero": J.mass_at_zero,
        "one_sided_mass": J.one_sided_mass,
    }
    records = []
    window = param(config, "fit_window")
    if window is not None:
        fit = tail_exponent_fit(J, tuple(window))
        summary["tail_fit"] = fit.model_dump()
        if J.source.value == "fourier":
            u = (J.alpha - 1.0) / 2.0
            summary["exponent_candidates"] = {
                "2u+1": abs(fit.exponent - (2.0 * u + 1.0)),
                "2u+2": abs(fit.exponent - (2.0 * u + 2.0)),
            }
            logger.info(f"📊 Fourier tail {fit.exponent:.3f}: 2u+1={2 * u + 1:g}, 2u+2={2 * u + 2:g}")
        tol = config.tolerance("exponent", 0.1)
        records.append(check(
            config, "tail_exponent", fit.exponent, J.alpha - tol, J.alpha + tol,
            target=J.alpha, claim="J(r) decays like r^-alpha",
        ))
    artifact = Artifact(
        "couplings", J.as_rows(),
        PlotSpec(x="r", y=["J"], title=f"{J.source.value} couplings, alpha={J.alpha:g}", logx=True, logy=True),
    )
    return ExperimentOutput(records=records, artifacts=[artifact], summary=summary)


@register("spitzer_vs_dp")
def spitzer_vs_dp(config: ExperimentConfig) -> ExperimentOutput:
    """Walk-derived couplings at s = 0 against the closed form 2/(π(4r² − 1))."""
    R = int(param(config, "R", 20))
    horizon = int(param(config, "horizon", Config.DEFAULT_HORIZON))
    dp = bessel_couplings(0.0, R, horizon=horizon)
    exact = spitzer_couplings(R)

    r = np.arange(0, R + 1)
    dp_values = dp.J(r)
    exact_values = exact.J(r)
    diff = np.abs(dp_values - exact_values)
    worst = float(diff.max())
    budget = dp.pointwise_error

    rows = [
        {"r": int(k), "dp": float(a), "exact": float(b), "abs_diff": float(d)}
        for k, a, b, d in zip(r, dp_values, exact_values, diff)
    ]
    records = [
        check(config, "max_discrepancy", worst, upper=config.tolerance("discrepancy", 1e-4),
              target=0.0, claim="walk-derived couplings at s=0 equal the Spitzer law"),
        check(config, "discrepancy_minus_budget", worst - budget, upper=0.0,
              claim="discrepancy stays inside the reported pointwise budget"),
    ]
    return ExperimentOutput(
        records=records,
        artifacts=[Artifact("spitzer_vs_dp", rows, PlotSpec(x="r", y=["dp", "exact"], title="J(r) at s=0"))],
        summary={"pointwise_error": budget, "truncation_error": dp.truncation_error, "horizon": horizon},
    )


@register("mass_normalization")
def mass_normalization(config: ExperimentConfig) -> ExperimentOutput:
    """Total coupling mass of the Spitzer and walk-derived sequences."""
    R = int(param(config, "R", 256))
    horizon = int(param(config, "horizon", Config.DEFAULT_HORIZON))
    records, rows = [], []

    spitzer = spitzer_couplings(R)
    deficit = abs(spitzer.total_mass() + spitzer.truncation_error - 1.0)
    rows.append({"sequence": "spitzer", "s": 0.0, "total_mass": spitzer.total_mass(),
                 "truncation_error": spitzer.truncation_error})
    records.append(check(config, "spitzer_mass_deficit", deficit, upper=config.tolerance("spitzer", 1e-12),
                         target=0.0, claim="Spitzer masses telescope to 1"))

    builders = {
        "diamond": lambda s: bessel_couplings(s, R, horizon=horizon),
        "grid": lambda s: grid_bessel_couplings(1, s, R, horizon=horizon),
    }
    for s in param(config, "s_values", [0.0, 0.5]):
        for name, build in builders.items():
            J = build(float(s))
            gap = abs(1.0 - J.total_mass())
            rows.append({"sequence": name, "s": float(s), "total_mass": J.total_mass(),
                         "truncation_error": J.truncation_error})
            records.append(check(
                config, f"{name}_mass_gap[s={s}]", gap,
                upper=J.truncation_error + Config.NORMALIZATION_EPS,
                claim="walk-derived mass is 1 up to the truncation budget",
            ))
    return ExperimentOutput(records=records, artifacts=[Artifact("masses", rows)])


@register("first_return_exponent")
def first_return_exponent(config: ExperimentConfig) -> ExperimentOutput:
    """Decay exponent of the first-return law against (3 + s)/2."""
    T = int(param(config, "horizon", Config.DEFAULT_HORIZON))
    t_min = int(param(config, "t_min", 2 ** 8))
    tol = config.tolerance("exponent", 0.05)
    records, rows = [], []
    for s in param(config, "s_values", [0.0, 0.3, 0.5, 0.8]):
        s = float(s)
        law = first_return_law(s, T)
        fit = decay_exponent(law.g, t_min, T)
        records.append(check(
            config, f"exponent[s={s}]", fit.slope, law.exponent - tol, law.exponent + tol,
            target=law.exponent, claim="g_s(n) ~ n^-(3+s)/2",
        ))
        points = geometric_points(2, T, 4)
        points = np.unique(points + points % 2)
        rows += [{"s": s, "n": int(n), "g": float(law.g[n]), "plateau": float(law.plateau([n])[0])}
                 for n in points if n <= T]
    artifact = Artifact("first_return", rows,
                        PlotSpec(x="n", y=["g"], series="s", logx=True, logy=True, title="First-return law"))
    return ExperimentOutput(records=records, artifacts=[artifact])


@register("return_site_exponent")
def return_site_exponent(config: ExperimentConfig) -> ExperimentOutput:
    """Tail exponent of the diamond and grid return-site laws against 2 + s."""
    window = tuple(param(config, "fit_window", [16, 256]))
    R = int(param(config, "R", window[1]))
    horizon = int(param(config, "horizon", Config.DEFAULT_HORIZON))
    tol = config.tolerance("exponent", 0.1)
    records, rows = [], []
    for s in param(config, "s_values", [0.0, 0.3, 0.5, 0.8]):
        s = float(s)
        for name in param(config, "geometries", ["diamond", "grid"]):
            if name == "diamond":
                J = bessel_couplings(s, R, horizon=horizon)
            else:
                J = grid_bessel_couplings(1, s, R, horizon=horizon)
            fit = tail_exponent_fit(J, window)
            records.append(check(
                config, f"{name}_exponent[s={s}]", fit.exponent, J.alpha - tol, J.alpha + tol,
                target=J.alpha, claim="return-site law decays like r^-(2+s)",
            ))
            rows += [{"geometry": name, "s": s, "r": r, "J": float(J.values[r - 1])}
                     for r in geometric_points(1, R, 4)]
    artifact = Artifact("return_sites", rows,
                        PlotSpec(x="r", y=["J"], series="s", logx=True, logy=True, title="Return-site laws"))
    return ExperimentOutput(records=records, artifacts=[artifact])


@register("renewal_bound")
def renewal_bound(config: ExperimentConfig) -> ExperimentOutput:
    """Decay of P[Y_t = 0] against (1 − s)/2."""
    T = int(param(config, "horizon", Config.DEFAULT_HORIZON))
    t_min = int(param(config, "t_min", 2 ** 8))
    tol = config.tolerance("exponent", 0.07)
    records, rows = [], []
    for s in param(config, "s_values", [0.0, 0.6]):
        s = float(s)
        profile = return_probability_profile(s, T)
        fit = decay_exponent(profile, t_min, T)
        target = (1.0 - s) / 2.0
        records.append(check(
            config, f"exponent[s={s}]", fit.slope, target - tol, target + tol,
            target=target, claim="P[Y_t = 0] ~ t^-(1-s)/2",
        ))
        points = geometric_points(2, T, 4)
        points = np.unique(points + points % 2)
        rows += [{"s": s, "t": int(t), "probability": float(profile[t])} for t in points if t <= T]
    artifact = Artifact("occupation", rows,
                        PlotSpec(x="t", y=["probability"], series="s", logx=True, logy=True,
                                 title="Return probability"))
    return ExperimentOutput(records=records, artifacts=[artifact])


@register("walk")
def walk_histogram(config: ExperimentConfig) -> ExperimentOutput:
    """Histogram of return sites (or killed sites) of simulated walks."""
    spec = WalkSpec.model_validate({**config.params, "seed": config.seed})
    summary = simulate_walk(spec)
    N = summary.n_walks
    live = ~summary.censored
    sites, counts = np.unique(summary.sites[live], axis=0, return_counts=True)
    rows = []
    for site, count in zip(sites, counts):
        frequency = count / N
        rows.append({
            "site": " ".join(str(int(c)) for c in np.atleast_1d(site)),
            "count": int(count),
            "frequency": float(frequency),
            "stderr": math.sqrt(frequency * (1.0 - frequency) / N),
        })
    censored = summary.n_censored / N
    records = [check(config, "censored_fraction", censored, upper=config.tolerances.get("censored"),
                     claim="walks end before the step cap")]
    summary_out = {"n_walks": N, "censored": summary.n_censored, "mean_time": float(summary.times[live].mean())
                   if live.any() else None}
    if spec.observe_sites:
        summary_out["visits"] = {f"{u} {v}": summary.visits.get((u, v), 0) / N for u, v in spec.observe_sites}
    return ExperimentOutput(records=records, artifacts=[Artifact("walk", rows)], summary=summary_out)
