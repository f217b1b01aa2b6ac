"""Tests for fractional Brownian motion targets and chain rescaling."""

import numpy as np
import pytest
from scipy.integrate import quad

from fracchain.fbm import (
    blumenthal_integral,
    dirichlet_covariance_matrix,
    fbm_cov_dirichlet,
    fbm_cov_free,
    log_covariance_matrix,
    rescale_chain_field,
    shape_fit,
)
from fracchain.fbm.rescale import bulk_mask


class TestFreeCovariance:
    """Test suite for fBm pinned at the origin."""

    def test_variance(self):
        """Test Var(B_t) = |t|^(2H)."""
        assert fbm_cov_free(0.3, 2.0, 2.0) == pytest.approx(2.0 ** 0.6)

    def test_symmetric_and_self_similar(self):
        """Test Cov(B_cs, B_ct) = c^(2H) Cov(B_s, B_t)."""
        H = 0.25
        assert fbm_cov_free(H, 0.4, 1.3) == pytest.approx(fbm_cov_free(H, 1.3, 0.4))
        assert fbm_cov_free(H, 1.2, 3.9) == pytest.approx(3.0 ** (2 * H) * fbm_cov_free(H, 0.4, 1.3))

    def test_brownian_case(self):
        """Test H = 1/2 gives min(s, t) for positive times."""
        s = np.array([0.2, 0.7, 1.5])
        assert np.allclose(fbm_cov_free(0.5, s, 1.0), np.minimum(s, 1.0))

    def test_invalid_hurst(self):
        """Test H outside (0, 1) is rejected."""
        with pytest.raises(ValueError, match="H must lie"):
            fbm_cov_free(1.0, 0.1, 0.2)


class TestDirichletCovariance:
    """Test suite for fBm on (-1, 1) with zero boundary values."""

    def test_integral_matches_direct_quadrature(self):
        """Test the substituted integral agrees with plain quadrature."""
        H = 0.25
        for U in (0.3, 1.0, 3.0, 40.0):
            direct, _ = quad(lambda v: (v + 1.0) ** -0.5 * v ** (H - 0.5), 0.0, U, limit=200)
            assert blumenthal_integral(H, U) == pytest.approx(direct, rel=1e-6)
        assert blumenthal_integral(H, 0.0) == 0.0

    def test_hypergeometric_matches_quad(self):
        """Test the closed form and the quadrature route give the same matrix."""
        t = np.linspace(-0.9, 0.9, 7)
        closed = dirichlet_covariance_matrix(0.25, t, method="hypergeometric")
        numeric = dirichlet_covariance_matrix(0.25, t, method="quad")
        assert np.allclose(closed, numeric, rtol=1e-8)

    def test_matrix_properties(self):
        """Test symmetry, the diagonal limit and beta scaling."""
        t = np.linspace(-0.8, 0.8, 9)
        cov = dirichlet_covariance_matrix(0.2, t, beta=2.0)
        assert np.allclose(cov, cov.T)
        assert np.allclose(np.diag(cov), (1.0 - t ** 2) ** 0.4 / (0.2 * 2.0))
        assert np.allclose(dirichlet_covariance_matrix(0.2, t, beta=1.0), 2.0 * cov)

    def test_diagonal_is_limit(self):
        """Test the off-diagonal formula approaches the diagonal value."""
        H = 0.3
        near = fbm_cov_dirichlet(H, 1.0, 0.2, 0.2 + 1e-7)
        assert near == pytest.approx(fbm_cov_dirichlet(H, 1.0, 0.2, 0.2), rel=1e-3)

    def test_vanishes_at_boundary(self):
        """Test covariances shrink as one point approaches the boundary."""
        H = 0.25
        assert fbm_cov_dirichlet(H, 1.0, 0.0, 0.999) < 0.2 * fbm_cov_dirichlet(H, 1.0, 0.0, 0.5)

    @pytest.mark.parametrize("kwargs,match", [
        ({"H": 0.5, "beta": 1.0, "x": 0.1, "y": 0.2}, "H must lie"),
        ({"H": 0.25, "beta": 0.0, "x": 0.1, "y": 0.2}, "beta"),
        ({"H": 0.25, "beta": 1.0, "x": 1.0, "y": 0.2}, "Points"),
    ])
    def test_invalid_arguments(self, kwargs, match):
        """Test H >= 1/2, non-positive beta and boundary points are rejected."""
        with pytest.raises(ValueError, match=match):
            fbm_cov_dirichlet(**kwargs)

    def test_unknown_method(self):
        """Test the matrix method must be hypergeometric or quad."""
        with pytest.raises(ValueError, match="Unknown method"):
            dirichlet_covariance_matrix(0.25, np.array([0.0, 0.5]), method="series")

    def test_log_target(self):
        """Test the H = 0 target has an undefined diagonal unless one is given."""
        t = np.linspace(-0.5, 0.5, 5)
        cov = log_covariance_matrix(t)
        assert np.all(np.isnan(np.diag(cov)))
        off = ~np.eye(5, dtype=bool)
        assert np.allclose(cov[off], cov.T[off])
        assert np.all(cov[off] > 0)
        assert np.all(np.diag(log_covariance_matrix(t, diagonal=7.0)) == 7.0)


class TestRescaling:
    """Test suite for chain rescaling and shape fits."""

    def test_covariance_rescaling(self):
        """Test covariances are cut to |i| < n and scaled by n^(-2H)."""
        n = 4
        cov = np.arange(81, dtype=float).reshape(9, 9)
        field = rescale_chain_field(cov, n, H=0.5)
        assert field.is_covariance
        assert field.values.shape == (7, 7)
        assert field.values[0, 0] == pytest.approx(cov[1, 1] / 4.0)
        assert np.allclose(field.t, np.arange(-3, 4) / 4.0)

    def test_sample_pairing(self):
        """Test pairings are Riemann sums over the grid."""
        field = rescale_chain_field(np.ones(9), 4, H=0.0)
        assert not field.is_covariance
        assert field.pairing(lambda t: np.ones_like(t)) == pytest.approx(7.0 / 4.0)
        with pytest.raises(ValueError, match="covariance"):
            field.pairing_variance(np.ones(7))

    def test_pairing_variance(self):
        """Test the pairing variance is w^T C w with weights f / n."""
        cov = np.eye(9)
        field = rescale_chain_field(cov, 4, H=0.0)
        assert field.pairing_variance(np.ones(7)) == pytest.approx(7.0 / 16.0)

    def test_wrong_shape_rejected(self):
        """Test objects not living on 2n + 1 sites are rejected."""
        with pytest.raises(ValueError, match="Expected"):
            rescale_chain_field(np.ones(8), 4, H=0.1)

    def test_exact_scale_recovered(self):
        """Test a scaled copy of the target fits with zero residual."""
        t = np.linspace(-0.9, 0.9, 19)
        target = dirichlet_covariance_matrix(0.25, t)
        fit = shape_fit(3.0 * target, target, t, beta=2.0)
        assert fit.scale == pytest.approx(3.0)
        assert fit.K == pytest.approx(np.sqrt(6.0))
        assert fit.residual < 1e-12
        assert fit.n_entries == int(bulk_mask(t, 0.8).sum())

    def test_diagonal_excluded_for_log_target(self):
        """Test a log target fits once its diagonal is excluded."""
        t = np.linspace(-0.9, 0.9, 19)
        target = log_covariance_matrix(t)
        fit = shape_fit(0.5 * np.nan_to_num(target, nan=10.0), target, t, include_diagonal=False)
        assert fit.scale == pytest.approx(0.5)
        with pytest.raises(ValueError, match="Degenerate"):
            shape_fit(target, target, t)

    def test_negative_scale_rejected(self):
        """Test an anti-correlated empirical matrix is rejected."""
        t = np.linspace(-0.5, 0.5, 5)
        target = dirichlet_covariance_matrix(0.25, t)
        with pytest.raises(ValueError, match="not positive"):
            shape_fit(-target, target, t)
