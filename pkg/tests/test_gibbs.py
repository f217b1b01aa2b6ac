"""Tests for constrained Gibbs models, heat-bath sampling and exact enumeration."""

import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.stats import norm

from fracchain.exceptions import WindowTooSmallError
from fracchain.fields.precision import PrecisionOperator
from fracchain.gibbs import (
    GibbsModel,
    ObservableSpec,
    SamplerState,
    effective_beta,
    exact_enumeration,
    ginibre_sandwich,
    heat_bath_sweep,
    regev_monotonicity,
    run_experiment,
    sample_discrete_gaussian,
)
from fracchain.gibbs.heat_bath import discrete_gaussian_window
from fracchain.gibbs.model import greedy_colouring
from fracchain.models import ObservableEstimate, ObservableSet


def dense_precision(matrix, beta=1.0):
    return PrecisionOperator(structure="long_range_1d", matrix=np.asarray(matrix, dtype=float), beta=beta)


def tridiagonal(size):
    return 2.0 * np.eye(size) - np.eye(size, k=1) - np.eye(size, k=-1)


@pytest.fixture
def chain5():
    """Nearest-neighbour chain of five sites with zero exterior."""
    return dense_precision(tridiagonal(5))


class TestGibbsModel:
    """Test suite for model construction."""

    def test_tridiagonal_colouring(self):
        """Test a chain splits into even and odd sites."""
        classes = greedy_colouring(tridiagonal(5))
        assert len(classes) == 2
        assert classes[0].tolist() == [0, 2, 4]
        assert classes[1].tolist() == [1, 3]

    def test_kinds(self, chain5):
        """Test the constraint kind follows lam and the conditioning set."""
        assert GibbsModel(chain5).kind == "gaussian"
        assert GibbsModel(chain5, [0, 2], lam=0.0).kind == "gaussian"
        assert GibbsModel(chain5, [0, 2]).kind == "integer"
        model = GibbsModel(chain5, [0, 2], lam=1.5)
        assert model.kind == "sine_gordon"
        assert model.with_lambda(None).kind == "integer"
        assert model.conditioned_indices.tolist() == [0, 2]

    @pytest.mark.parametrize("kwargs,match", [
        ({"spacing": 0.0}, "spacing"),
        ({"lam": -1.0}, "lam"),
        ({"schedule": "checkerboard"}, "Unknown schedule"),
        ({"conditioning": [7]}, "alive sites"),
    ])
    def test_invalid_arguments(self, chain5, kwargs, match):
        """Test invalid spacings, potentials, schedules and sites are rejected."""
        with pytest.raises(ValueError, match=match):
            GibbsModel(chain5, **kwargs)

    def test_non_positive_diagonal(self):
        """Test a precision with a zero diagonal entry is rejected."""
        with pytest.raises(ValueError, match="diagonal"):
            GibbsModel(dense_precision([[0.0, 0.0], [0.0, 1.0]]))

    def test_observable_names(self):
        """Test observables are named in a fixed order."""
        spec = ObservableSpec(sites=[1], pairs=[(0, 1)], laplace={"a": np.ones(2)}, pairings={"g": np.ones(2)})
        assert spec.names() == ["var[1]", "cov[0,1]", "laplace[a]", "pairing[g]"]
        values = spec.evaluate(np.array([1.0, 2.0]))
        assert np.allclose(values, [4.0, 2.0, math.exp(3.0), 9.0])


class TestExactEnumeration:
    """Test suite for the brute-force oracle."""

    def test_gaussian_model(self, chain5):
        """Test unconstrained models return Q^-1 and exp(a^T C a / 2)."""
        a = np.array([0.1, 0.0, 0.2, 0.0, -0.1])
        result = exact_enumeration(GibbsModel(chain5, [0, 2], lam=0.0), 3, {"a": a})
        cov = np.linalg.inv(tridiagonal(5))
        assert np.allclose(result.covariance, cov)
        assert result.laplace["a"] == pytest.approx(math.exp(0.5 * a @ cov @ a))

    def test_single_integer_site(self):
        """Test one site on Z matches the direct lattice sum."""
        result = exact_enumeration(GibbsModel(dense_precision([[1.0]]), [0]), 6, {"a": np.array([0.5])})
        m = np.arange(-6, 7, dtype=float)
        w = np.exp(-0.5 * m ** 2)
        assert result.variance(0) == pytest.approx((m ** 2 * w).sum() / w.sum(), rel=1e-12)
        assert result.laplace["a"] == pytest.approx((np.exp(0.5 * m) * w).sum() / w.sum(), rel=1e-12)
        assert result.n_configurations == 13
        assert result.tail_bound < 1e-9

    def test_single_sine_gordon_site(self):
        """Test the Fourier expansion matches quadrature of exp(-x^2/2 + cos(2 pi x))."""
        result = exact_enumeration(GibbsModel(dense_precision([[1.0]]), [0], lam=1.0), 6)

        def density(x):
            return math.exp(-0.5 * x * x + math.cos(2.0 * math.pi * x))

        Z, _ = quad(density, -12, 12, limit=400, epsabs=1e-13)
        second, _ = quad(lambda x: x * x * density(x), -12, 12, limit=400, epsabs=1e-13)
        assert result.variance(0) == pytest.approx(second / Z, rel=1e-7)

    def test_schur_complement(self):
        """Test unconstrained sites are integrated out exactly."""
        model = GibbsModel(dense_precision([[2.0, -1.0], [-1.0, 2.0]]), [0])
        result = exact_enumeration(model, 6)
        m = np.arange(-6, 7, dtype=float)
        w = np.exp(-0.75 * m ** 2)
        psi2 = (m ** 2 * w).sum() / w.sum()
        assert result.variance(0) == pytest.approx(psi2, rel=1e-10)
        assert result.covariance[0, 1] == pytest.approx(0.5 * psi2, rel=1e-10)
        assert result.variance(1) == pytest.approx(0.5 + 0.25 * psi2, rel=1e-10)

    def test_window_too_small(self):
        """Test a window much narrower than the field raises."""
        model = GibbsModel(dense_precision([[0.01]]), [0])
        with pytest.raises(WindowTooSmallError):
            exact_enumeration(model, 0)

    def test_invalid_sizes(self, chain5):
        """Test wide windows and large constrained sets are rejected."""
        with pytest.raises(ValueError, match="Window half-width"):
            exact_enumeration(GibbsModel(chain5, [0]), 7)
        big = GibbsModel(dense_precision(tridiagonal(9)), list(range(9)))
        with pytest.raises(ValueError, match="at most 8"):
            exact_enumeration(big, 1)


class TestComparisonInequalities:
    """Test suite for the Laplace-transform sandwich and covariance monotonicity."""

    def test_sandwich_ordering(self):
        """Test integer <= sine-Gordon <= Gaussian Laplace transforms on a small chain."""
        model = GibbsModel(dense_precision(tridiagonal(3)), [0, 1, 2], spacing=2.0)
        vectors = {"e0": np.array([0.3, 0.0, 0.0]), "flat": np.array([0.2, 0.2, 0.2])}
        rows = ginibre_sandwich(model, vectors, K=6, lam=1.0)
        assert [row["vector"] for row in rows] == ["e0", "flat"]
        for row in rows:
            assert row["lower_slack"] >= -1e-9
            assert row["upper_slack"] >= -1e-9
            assert row["gaussian"] - row["integer"] > 1e-6

    def test_stiffer_precision_shrinks_variances(self):
        """Test adding a positive matrix to the precision lowers pairing variances."""
        A = np.array([[2.0, -0.5], [-0.5, 2.0]])
        slacks = regev_monotonicity(A, A + np.eye(2), [np.array([1.0, 0.0]), np.array([1.0, 1.0])])
        assert len(slacks) == 2
        assert all(s >= -1e-12 for s in slacks)

    def test_monotonicity_validation(self):
        """Test non-ordered or mismatched matrices are rejected."""
        A = np.array([[2.0, -0.5], [-0.5, 2.0]])
        with pytest.raises(ValueError, match="positive semi-definite"):
            regev_monotonicity(A + np.eye(2), A, [np.ones(2)])
        with pytest.raises(ValueError, match="same size"):
            regev_monotonicity(A, np.eye(3), [np.ones(2)])


class TestHeatBath:
    """Test suite for single-site updates."""

    def test_stiff_discrete_gaussian(self):
        """Test a very stiff conditional picks the nearest lattice point."""
        values, tail = sample_discrete_gaussian(np.array([0.3]), np.array([1e6]), 1.0, np.random.default_rng(0))
        assert values.tolist() == [0.0]
        assert tail == 0.0

    def test_window_tails_folded(self):
        """Test the mass beyond the window is added to the end atoms and reported."""
        m, p, folded = discrete_gaussian_window(np.array([0.0]), np.array([1.0]), 1.0)
        assert m[0, 0] == -6 and m[0, -1] == 7
        assert p.sum() == pytest.approx(1.0)
        assert 0.0 < folded[0] < 2.0 * norm.sf(6.0)
        weights = np.exp(-0.5 * m[0] ** 2)
        assert p[0, 0] > weights[0] / weights.sum()
        assert np.allclose(p[0, 1:-1], weights[1:-1] / weights.sum(), rtol=1e-8)

    def test_discrete_gaussian_frequencies(self):
        """Test P(0) = 1 / sum_m exp(-m^2/2) for a unit conditional."""
        rng = np.random.default_rng(5)
        values, _ = sample_discrete_gaussian(np.zeros(50000), np.ones(50000), 1.0, rng)
        m = np.arange(-10, 11)
        expected = 1.0 / np.exp(-0.5 * m ** 2).sum()
        assert np.mean(values == 0) == pytest.approx(expected, abs=0.01)
        assert np.all(values == np.round(values))

    def test_integer_sites_stay_on_lattice(self, chain5):
        """Test conditioned sites take values in v Z after every sweep."""
        model = GibbsModel(chain5, [0, 2, 4], spacing=0.5)
        state = SamplerState.initial(model, seed=1)
        for _ in range(20):
            heat_bath_sweep(model, state)
        ratio = state.phi[[0, 2, 4]] / 0.5
        assert np.allclose(ratio, np.round(ratio))
        assert state.sweep == 20
        assert state.max_window_tail < 1e-6

    def test_sine_gordon_acceptance(self, chain5):
        """Test sine-Gordon sites go through a Metropolis step."""
        model = GibbsModel(chain5, [1, 3], lam=1.0, schedule="random")
        state = SamplerState.initial(model, seed=2)
        for _ in range(50):
            heat_bath_sweep(model, state)
        assert state.proposed == 100
        assert 0.0 < state.acceptance_rate <= 1.0


class TestRunExperiment:
    """Test suite for batch-means runs and effective temperatures."""

    @pytest.fixture
    def observables(self):
        """Variance of the middle site and a flat pairing."""
        return ObservableSpec(sites=[2], pairings={"g": np.ones(5)})

    @pytest.mark.parametrize("kwargs,match", [
        ({"sweeps": 100, "burn_in": 100}, "must exceed"),
        ({"sweeps": 200, "burn_in": 10, "n_batches": 10}, "n_batches"),
        ({"sweeps": 20, "burn_in": 10}, "cannot fill"),
    ])
    def test_invalid_runs(self, chain5, observables, kwargs, match):
        """Test run lengths and batch counts are validated."""
        with pytest.raises(ValueError, match=match):
            run_experiment(GibbsModel(chain5), observables=observables, **kwargs)

    def test_no_observables(self, chain5):
        """Test an empty observable set is rejected."""
        with pytest.raises(ValueError, match="No observables"):
            run_experiment(GibbsModel(chain5), 200, 10, ObservableSpec())

    def test_deterministic_across_threads(self, chain5, observables):
        """Test estimates depend on the seed only."""
        model = GibbsModel(chain5, [0, 4])
        a = run_experiment(model, 400, 40, observables, seed=9, n_chains=2, num_workers=1)
        b = run_experiment(model, 400, 40, observables, seed=9, n_chains=2, num_workers=2)
        assert a.estimates == b.estimates
        assert a["var[2]"].n_batches == 40

    def test_gaussian_variance(self, chain5, observables):
        """Test the sampled variance matches Q^-1 within its error bar."""
        result = run_experiment(GibbsModel(chain5), 4000, 200, observables, seed=3)
        estimate = result["var[2]"]
        assert abs(estimate.value - 1.5) < 5 * estimate.stderr + 0.03
        assert result.acceptance_rate is None

    def test_integer_variance_matches_enumeration(self):
        """Test the integer sampler agrees with the exact oracle."""
        model = GibbsModel(dense_precision(tridiagonal(3)), [0, 1, 2])
        exact = exact_enumeration(model, 6).variance(1)
        result = run_experiment(model, 6000, 200, ObservableSpec(sites=[1]), seed=4)
        estimate = result["var[1]"]
        assert abs(estimate.value - exact) < 5 * estimate.stderr + 0.05 * exact

    def test_effective_beta(self):
        """Test halving the sampled variance doubles the effective temperature parameter."""
        model = GibbsModel(dense_precision(tridiagonal(5), beta=0.5))
        g = np.ones(5)
        reference = float(g @ np.linalg.inv(tridiagonal(5)) @ g)
        observables = ObservableSet(
            estimates={"pairing[g]": ObservableEstimate(value=reference / 2, stderr=0.01, n_batches=20)},
            sweeps=100,
            burn_in=10,
        )
        value, error = effective_beta(model, g, observables)
        assert value == pytest.approx(1.0)
        assert error == pytest.approx(0.02 / reference)
        with pytest.raises(KeyError):
            effective_beta(model, g, observables, key="pairing[h]")
