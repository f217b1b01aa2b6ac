"""Tests for the Bessel kernel, first-return laws and walk simulators."""

import math

import numpy as np
import pytest
from pydantic import ValidationError
from scipy.special import comb

from fracchain.bessel import (
    BesselKernel,
    decay_exponent,
    first_return_law,
    kernel,
    return_probability_profile,
    simulate_walk,
)
from fracchain.models import DomainSpec, WalkSpec


class TestBesselKernel:
    """Test suite for the vertical kernel."""

    def test_forced_up_at_zero(self):
        """Test the walk always leaves height 0 upwards."""
        k = kernel(0.5)
        assert k.up_probability(0) == 1.0
        assert k.down_probability(0) == 0.0

    @pytest.mark.parametrize("s,r,expected", [
        (0.0, 1, 0.5),
        (0.5, 1, 0.375),
        (-0.5, 1, 0.625),
        (0.5, 4, 0.5 - 0.5 / 16),
        (3.0, 1, 0.25),
    ])
    def test_up_probabilities(self, s, r, expected):
        """Test Q_s(r, r+1) = max(1/2 - s/(4r), 1/4)."""
        assert kernel(s).up_probability(r) == pytest.approx(expected)
        assert kernel(s).down_probability(r) == pytest.approx(1.0 - expected)

    def test_vectorised(self):
        """Test the array form agrees with the scalar form."""
        k = BesselKernel(0.3)
        heights = np.arange(10)
        assert np.allclose(k.up_probabilities(heights), [k.up_probability(r) for r in heights])

    def test_invalid_parameter(self):
        """Test s <= -1 is rejected."""
        with pytest.raises(ValueError, match="s > -1"):
            BesselKernel(-1.0)


class TestFirstReturnLaw:
    """Test suite for the exact first-return law."""

    @pytest.fixture(scope="class")
    def srw_law(self):
        """First-return law of the reflected simple random walk."""
        return first_return_law(0.0, 200)

    def test_catalan_values(self, srw_law):
        """Test g(2n) = C_{n-1} / 2^(2n-1) when s = 0."""
        assert srw_law.g[2] == pytest.approx(0.5)
        assert srw_law.g[4] == pytest.approx(1.0 / 8.0)
        assert srw_law.g[6] == pytest.approx(1.0 / 16.0)

    def test_odd_times_vanish(self, srw_law):
        """Test returns only happen at even times."""
        assert np.all(srw_law.g[1::2] == 0.0)
        assert srw_law.g[0] == 0.0

    def test_sub_probability(self, srw_law):
        """Test the law plus its tail mass is one."""
        assert srw_law.mass() <= 1.0
        assert srw_law.mass() + srw_law.tail_mass == pytest.approx(1.0)

    def test_plateau_constant(self):
        """Test g(t) t^(3/2) settles at sqrt(2/pi) for the reflected walk."""
        law = first_return_law(0.0, 2000)
        assert law.tail_constant() == pytest.approx(math.sqrt(2.0 / math.pi), rel=1e-2)
        assert law.plateau(np.array([2])).tolist() == pytest.approx([0.5 * 2.0 ** 1.5])

    def test_exponent(self):
        """Test the decay exponent is (3 + s) / 2."""
        assert first_return_law(0.6, 20).exponent == pytest.approx(1.8)

    def test_drift_speeds_up_returns(self):
        """Test a stronger downward drift leaves less mass beyond the horizon."""
        assert first_return_law(0.8, 400).tail_mass < first_return_law(0.0, 400).tail_mass

    def test_odd_horizon_rejected(self):
        """Test the horizon must be even."""
        with pytest.raises(ValueError, match="even"):
            first_return_law(0.0, 101)


class TestReturnProfile:
    """Test suite for renewal occupation probabilities."""

    def test_reflected_walk(self):
        """Test P[|S_2m| = 0] = C(2m, m) 4^-m for s = 0."""
        profile = return_probability_profile(0.0, 100)
        m = np.arange(51)
        assert np.allclose(profile[0::2], comb(2 * m, m) / 4.0 ** m)
        assert np.all(profile[1::2] == 0.0)

    def test_reuses_law(self):
        """Test a precomputed law gives the same profile."""
        law = first_return_law(0.5, 200)
        assert np.allclose(return_probability_profile(0.5, 100, law), return_probability_profile(0.5, 100))

    def test_short_law_rejected(self):
        """Test a law with a shorter horizon is rejected."""
        law = first_return_law(0.5, 50)
        with pytest.raises(ValueError, match="shorter"):
            return_probability_profile(0.5, 100, law)

    def test_square_root_decay(self):
        """Test the s = 0 profile decays like t^(-1/2)."""
        profile = return_probability_profile(0.0, 4096)
        fit = decay_exponent(profile, 256, 4096)
        assert fit.slope == pytest.approx(0.5, abs=0.01)


class TestSimulateWalk:
    """Test suite for the vectorised walk simulator."""

    @pytest.fixture(scope="class")
    def spec(self):
        """Small batch of diamond walks."""
        return WalkSpec(s=0.5, max_steps=200, n_walks=5000, seed=3)

    def test_deterministic_across_workers(self, spec):
        """Test results depend on the seed only, not on the thread count."""
        a = simulate_walk(spec, num_workers=1)
        b = simulate_walk(spec, num_workers=4)
        assert np.array_equal(a.times, b.times)
        assert np.array_equal(a.sites, b.sites)
        assert np.array_equal(a.censored, b.censored)

    def test_even_return_times(self, spec):
        """Test diamond walks return at even times only."""
        summary = simulate_walk(spec)
        returned = summary.times[~summary.censored]
        assert np.all(returned % 2 == 0)
        assert summary.first_return_histogram(spec.max_steps).sum() == summary.n_walks - summary.n_censored

    def test_histograms_count_returns(self, spec):
        """Test site histograms split returns inside and beyond R."""
        summary = simulate_walk(spec)
        counts, beyond = summary.return_site_histogram(5)
        assert counts.sum() + beyond == summary.n_walks - summary.n_censored
        assert summary.signed_histogram(5).sum() == counts.sum()

    def test_matches_exact_law(self):
        """Test the simulated return at time 2 has probability g(2) = 1/2."""
        summary = simulate_walk(WalkSpec(s=0.0, max_steps=64, n_walks=20000, seed=11))
        assert np.mean(summary.times == 2) == pytest.approx(0.5, abs=0.02)

    def test_grid_walks(self):
        """Test grid walks in d = 2 return with 2-D sites."""
        summary = simulate_walk(WalkSpec(geometry="grid", dimension=2, s=0.5, max_steps=100, n_walks=500, seed=1))
        assert summary.sites.shape == (500, 2)

    def test_domain_walks_end_on_killed_sites(self):
        """Test walks inside a domain stop on sites outside the alive set."""
        spec = WalkSpec(
            s=0.5, max_steps=5000, n_walks=200, seed=2, start_height=1,
            domain=DomainSpec(kind="slit_diamond", n=4, factor=4, half_plane=True),
        )
        summary = simulate_walk(spec)
        domain = spec.domain.build()
        stopped = summary.sites[~summary.censored]
        assert not np.any(domain.contains(stopped))

    def test_diamond_dimension_rejected(self):
        """Test the diamond geometry has a one-dimensional baseline."""
        with pytest.raises(ValidationError):
            WalkSpec(geometry="diamond", dimension=2)
