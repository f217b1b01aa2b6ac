"""Tests for coupling sequences and their tail fits."""

import math

import numpy as np
import pytest
from scipy.special import zeta

from fracchain.couplings import (
    bessel_couplings,
    fourier_couplings,
    negative_binomial_weights,
    power_law_couplings,
    spitzer_couplings,
    tail_exponent_fit,
    time_split_weights,
)
from fracchain.exceptions import WindowTooSmallError
from fracchain.models import CouplingSequence, CouplingSource


class TestSpitzerCouplings:
    """Test suite for the closed-form Spitzer law."""

    def test_closed_form(self, spitzer_64):
        """Test J(k) = 2 / (pi (4k^2 - 1))."""
        k = np.arange(1, 65)
        assert np.allclose(spitzer_64.values, 2.0 / (np.pi * (4 * k ** 2 - 1)))
        assert spitzer_64.mass_at_zero == pytest.approx(1.0 - 2.0 / np.pi)
        assert spitzer_64.source == CouplingSource.SPITZER

    def test_mass_telescopes(self, spitzer_64):
        """Test kept mass plus truncation error is exactly one."""
        assert spitzer_64.total_mass() + spitzer_64.truncation_error == pytest.approx(1.0, abs=1e-14)
        assert spitzer_64.truncation_error == pytest.approx(2.0 / (np.pi * 129))

    def test_symmetric_lookup(self, spitzer_64):
        """Test J(-r) = J(r), J(0) is the holding mass and J vanishes beyond R."""
        assert spitzer_64.J(-3) == spitzer_64.J(3)
        assert spitzer_64.J(0) == pytest.approx(1.0 - 2.0 / np.pi)
        assert spitzer_64.J(65) == 0.0
        assert spitzer_64.is_walk_derived

    def test_invalid_radius(self):
        """Test R < 1 is rejected."""
        with pytest.raises(ValueError, match="Radius"):
            spitzer_couplings(0)


class TestPowerLawCouplings:
    """Test suite for pure power laws."""

    def test_values_and_masses(self, power_law_25):
        """Test J(r) = r^-alpha with Hurwitz-zeta masses."""
        assert power_law_25.values[0] == 1.0
        assert power_law_25.J(4) == pytest.approx(4 ** -2.5)
        assert power_law_25.one_sided_mass == pytest.approx(zeta(2.5))
        assert power_law_25.truncation_error == pytest.approx(2.0 * zeta(2.5, 513))
        assert not power_law_25.is_walk_derived
        assert power_law_25.J(0) == 0.0

    def test_monotone(self, power_law_25):
        """Test power laws are non-increasing."""
        assert power_law_25.is_monotone(start=1)

    def test_alpha_must_exceed_one(self):
        """Test alpha <= 1 is rejected."""
        with pytest.raises(ValueError, match="alpha > 1"):
            power_law_couplings(1.0, 10)


class TestFourierCouplings:
    """Test suite for couplings of the Fourier fractional Laplacian."""

    def test_nearest_neighbour_at_u_one(self):
        """Test u = 1 gives the nearest-neighbour Laplacian, J(1) = 1/2 and nothing else."""
        J = fourier_couplings(1.0, R=16, quadrature_points=2 ** 12)
        assert J.alpha == 3.0
        assert J.values[0] == pytest.approx(0.5, abs=1e-12)
        assert np.all(np.abs(J.values[1:]) < 1e-12)
        assert J.one_sided_mass == pytest.approx(0.5)

    def test_half_power_matches_scaled_spitzer(self, spitzer_64):
        """Test (1 - cos)^(1/2) has couplings sqrt(2) times the Spitzer law."""
        J = fourier_couplings(0.5, R=16, quadrature_points=2 ** 14)
        assert J.alpha == pytest.approx(2.0)
        assert np.allclose(J.values, math.sqrt(2.0) * spitzer_64.values[:16], rtol=1e-5)
        assert J.one_sided_mass == pytest.approx(math.sqrt(2.0) / np.pi)

    def test_non_negative(self):
        """Test couplings are non-negative for fractional powers."""
        J = fourier_couplings(0.75, R=64, quadrature_points=2 ** 12)
        assert np.all(J.values >= 0)
        assert J.pointwise_error >= 0

    @pytest.mark.parametrize("kwargs,match", [
        ({"u": 0.0, "R": 8}, "u in"),
        ({"u": 1.5, "R": 8}, "u in"),
        ({"u": 0.5, "R": 8, "quadrature_points": 1024}, "quadrature_points"),
        ({"u": 0.5, "R": 4096, "quadrature_points": 4096}, "Radius"),
    ])
    def test_invalid_arguments(self, kwargs, match):
        """Test invalid powers, rule sizes and radii are rejected."""
        with pytest.raises(ValueError, match=match):
            fourier_couplings(**kwargs)


class TestTailFit:
    """Test suite for power-law tail fits."""

    def test_exact_power_law(self, power_law_25):
        """Test the fit recovers alpha on a pure power law."""
        fit = tail_exponent_fit(power_law_25, (8, 512))
        assert fit.exponent == pytest.approx(2.5, abs=1e-8)
        assert fit.constant == pytest.approx(1.0, rel=1e-8)
        assert fit.residual < 1e-8
        assert fit.fit_window == (8, 512)

    def test_spitzer_exponent(self, spitzer_64):
        """Test the Spitzer tail decays like r^-2."""
        fit = tail_exponent_fit(spitzer_64, (16, 64))
        assert abs(fit.exponent - 2.0) < 0.01

    def test_window_too_small(self, power_law_25):
        """Test a window with too few distinct points is rejected."""
        with pytest.raises(WindowTooSmallError):
            tail_exponent_fit(power_law_25, (8, 9))

    def test_window_outside_radius(self, power_law_25):
        """Test a window beyond R is rejected."""
        with pytest.raises(ValueError, match="Fit window"):
            tail_exponent_fit(power_law_25, (8, 1024))


class TestWalkDerivedCouplings:
    """Test suite for return-site laws of the Bessel walk."""

    def test_zero_drift_reproduces_spitzer(self, spitzer_64):
        """Test s = 0 gives the Spitzer law of the simple random walk."""
        J = bessel_couplings(0.0, R=8, horizon=4096, tolerance=1e-3)
        assert J.source == CouplingSource.BESSEL_DIAMOND
        assert J.alpha == 2.0
        assert np.allclose(J.values, spitzer_64.values[:8], atol=2e-4)
        assert J.mass_at_zero == pytest.approx(1.0 - 2.0 / np.pi, abs=2e-4)

    def test_mass_at_most_one(self):
        """Test the return-site law is a sub-probability."""
        J = bessel_couplings(0.5, R=32, horizon=4096, tolerance=1e-2)
        assert J.total_mass() <= 1.0 + 1e-9
        assert J.truncation_error >= 0
        assert J.horizon == 4096

    @pytest.mark.slow
    @pytest.mark.parametrize("s", [0.0, 0.3, 0.5, 0.8])
    def test_tail_exponent(self, s):
        """Test the return-site law decays like r^-(2+s) on [16, 256]."""
        J = bessel_couplings(s, R=256, horizon=2 ** 16)
        fit = tail_exponent_fit(J, (16, 256))
        assert abs(fit.exponent - (2.0 + s)) <= 0.1

    def test_short_horizon_rejected(self):
        """Test a horizon leaving a large pointwise error raises."""
        with pytest.raises(ValueError, match="Horizon"):
            bessel_couplings(0.0, R=8, horizon=64)

    @pytest.mark.parametrize("kwargs,match", [
        ({"s": 1.0, "R": 8}, "s in"),
        ({"s": -0.5, "R": 8}, "s in"),
        ({"s": 0.5, "R": 8, "horizon": 63}, "even"),
        ({"s": 0.5, "R": 8, "horizon": 64, "method": "exact"}, "Unknown method"),
    ])
    def test_invalid_arguments(self, kwargs, match):
        """Test invalid s, horizons and methods are rejected."""
        with pytest.raises(ValueError, match=match):
            bessel_couplings(**kwargs)

    def test_negative_couplings_rejected(self):
        """Test a CouplingSequence cannot hold negative values."""
        with pytest.raises(ValueError, match="non-negative"):
            CouplingSequence(alpha=2.0, values=[0.1, -0.2], source="power_law", one_sided_mass=0.0)


class TestTimeSplitWeights:
    """Test suite for the binomial and negative-binomial splitting weights."""

    def test_binomial_weights(self):
        """Test C(2n, j) 4^-n sums to one and is symmetric."""
        w = time_split_weights(3)
        assert w.size == 7
        assert w.sum() == pytest.approx(1.0)
        assert w[0] == pytest.approx(4.0 ** -3)
        assert np.allclose(w, w[::-1])

    def test_geometric_case(self):
        """Test one vertical move leaves a geometric number of horizontal ones."""
        w = negative_binomial_weights(1, 10)
        assert np.allclose(w, 0.5 ** (np.arange(11) + 1))

    def test_invalid_arguments(self):
        """Test negative sizes are rejected."""
        with pytest.raises(ValueError):
            time_split_weights(-1)
        with pytest.raises(ValueError):
            negative_binomial_weights(0, 10)
