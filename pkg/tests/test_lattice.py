"""Tests for lattice domains, conditioning sets and conductances."""

import math

import numpy as np
import pytest

from fracchain.lattice import build_domain, conductance_field, fractal_set, line_set, strip_set
from fracchain.lattice.conditioning import fractal_pattern
from fracchain.models import DomainSpec


class TestSquareDomains:
    """Test suite for boxes and tori."""

    def test_site_counts(self):
        """Test box, torus and free box sizes."""
        assert build_domain("interval", n=5).n_sites == 11
        assert build_domain("box2d", n=3).n_sites == 49
        assert build_domain("torus2d", n=3).n_sites == 48
        assert build_domain("free_box2d", n=3).n_sites == 48

    def test_origin_removed(self):
        """Test the torus pins the origin."""
        torus = build_domain("torus2d", n=3)
        with pytest.raises(KeyError, match="not alive"):
            torus.index_of((0, 0))
        assert torus.index_of((3, 0)) >= 0

    def test_box_degrees(self, small_box):
        """Test every box site has degree one, exterior edges included."""
        A, degree = small_box.adjacency()
        assert np.allclose(degree, 1.0)
        assert abs(A - A.T).max() == 0
        corner = small_box.index_of((6, 6))
        assert A[corner].sum() == pytest.approx(0.5)

    def test_torus_wraps(self):
        """Test torus edges wrap around and only the origin is killed."""
        torus = build_domain("torus2d", n=3)
        A, degree = torus.adjacency()
        assert np.allclose(degree, 1.0)
        assert A[torus.index_of((3, 2))].sum() == pytest.approx(1.0)
        assert A[torus.index_of((1, 0))].sum() == pytest.approx(0.75)

    def test_free_boundary(self):
        """Test free-box corners only count edges that exist."""
        box = build_domain("free_box2d", n=3)
        _, degree = box.adjacency()
        assert degree[box.index_of((3, 3))] == pytest.approx(0.5)
        assert degree[box.index_of((1, 1))] == pytest.approx(1.0)

    def test_baseline(self, small_box):
        """Test the baseline runs left to right along y = 0."""
        assert np.array_equal(small_box.baseline_positions(), np.arange(-6, 7))
        assert small_box.coords[small_box.baseline_index(2)].tolist() == [2, 0]


class TestDiamondDomains:
    """Test suite for slit and smoothed slit hosts."""

    def test_slit_removed(self):
        """Test baseline sites beyond the slit tip are killed."""
        slit = build_domain("slit_diamond", n=2, factor=4)
        assert not slit.contains(np.array([[6, 0]]))[0]
        assert slit.contains(np.array([[4, 0]]))[0]
        assert slit.contains(np.array([[7, 1]]))[0]
        assert np.array_equal(slit.baseline_positions(), np.arange(-2, 3))

    def test_diamond_parity(self):
        """Test index coordinates satisfy u = v (mod 2)."""
        slit = build_domain("slit_diamond", n=3, factor=4, half_plane=True)
        assert np.all((slit.coords[:, 0] + slit.coords[:, 1]) % 2 == 0)
        assert slit.coords[:, 1].min() == 0

    def test_free_bottom_degree(self):
        """Test baseline sites of the free-bottom host only have upward edges."""
        host = build_domain("half_plane_free_bottom", n=4)
        _, degree = host.adjacency()
        assert degree[host.baseline_index(0)] == pytest.approx(0.5)
        assert np.array_equal(host.baseline_positions(), np.arange(-4, 5))

    def test_conductances_shape_degree(self):
        """Test Bessel conductances make upward and downward weights differ."""
        host = build_domain("slit_diamond", n=2, factor=4, half_plane=True)
        field = conductance_field(0.5, host.max_height + 1)
        A, degree = host.adjacency(field)
        site = host.index_of((0, 2))
        assert degree[site] == pytest.approx(2 * field.values[1] + 2 * field.values[2])
        assert (abs(A - A.T)).max() < 1e-15

    def test_distance_to_slit(self):
        """Test baseline position k lies n + 1 - k away from the right half-line."""
        host = build_domain("slit_diamond", n=4, factor=4, half_plane=True)
        sites = [host.baseline_index(k) for k in (4, 2, 0, -3)]
        assert host.distance_to_slit(sites).tolist() == [1.0, 3.0, 5.0, 2.0]
        assert np.all(host.distance_to_slit() >= 0.5)
        with pytest.raises(ValueError, match="no slit"):
            build_domain("box2d", n=3).distance_to_slit()

    def test_smoothed_slit_boundary_labels(self):
        """Test the smoothed slit labels killed sites as slit or square."""
        host = build_domain("smoothed_slit", n=4, M=2)
        labels = host.boundary()
        assert set(labels) == {"slit", "square"}
        assert host.contains(np.array([[0, 0]]))[0]

    @pytest.mark.parametrize("kind,params,match", [
        ("hexagon", {"n": 3}, "Unknown domain kind"),
        ("box2d", {"n": 0}, "integer >= 1"),
        ("slit_diamond", {"n": 2, "factor": 1}, "slit tip"),
        ("smoothed_slit", {"n": 2, "M": 1}, "M >= 2"),
        ("box2d", {"n": 2, "M": 4}, "Invalid parameters"),
    ])
    def test_invalid_domains(self, kind, params, match):
        """Test unknown kinds and bad parameters are rejected."""
        with pytest.raises(ValueError, match=match):
            build_domain(kind, **params)

    def test_spec_round_trip(self):
        """Test a domain rebuilt from its spec has the same sites."""
        host = build_domain("smoothed_slit", n=3, M=4, half_plane=True)
        rebuilt = host.to_spec().build()
        assert rebuilt.n_sites == host.n_sites
        assert DomainSpec(kind="interval", n=4).build().n_sites == 9


class TestConditioningSets:
    """Test suite for line, strip and fractal sets."""

    def test_line_and_strip(self):
        """Test the line is the B = 0 strip."""
        box = build_domain("box2d", n=3)
        assert line_set(box).size == 7
        assert strip_set(box, 0).size == 7
        assert strip_set(box, 1).size == 21
        assert strip_set(box, 10).size == box.n_sites

    def test_strip_on_diamond_uses_physical_units(self):
        """Test strips on diamond hosts measure |y| in physical units."""
        host = build_domain("slit_diamond", n=2, factor=4, half_plane=True)
        strip = strip_set(host, 1)
        assert np.all(np.abs(strip.coords[:, 1]) <= 2)

    def test_negative_width_rejected(self):
        """Test B < 0 is rejected."""
        with pytest.raises(ValueError, match=">= 0"):
            strip_set(build_domain("box2d", n=3), -1)

    def test_fractal_counts(self):
        """Test the default mask keeps 5^k sites with dimension log 5 / log 3."""
        fractal = fractal_set(2)
        assert fractal.size == 25
        assert fractal.dimension_estimate == pytest.approx(math.log(5) / math.log(3))
        line = fractal.coords[fractal.coords[:, 1] == 0]
        assert sorted(line[:, 0].tolist()) == list(range(-4, 5))

    def test_fractal_clipped_to_host(self):
        """Test sites outside the host are dropped and the torus origin is skipped."""
        fractal = fractal_set(2, domain=build_domain("torus2d", n=3))
        assert fractal.size == 20
        assert fractal.mask(48).sum() == fractal.size
        assert np.all(np.abs(fractal.coords) <= 3)
        assert fractal.dimension_estimate == pytest.approx(math.log(5) / math.log(3))
        assert fractal_set(2, domain=build_domain("box2d", n=3)).size == 21

    def test_fractal_pattern_level_one(self):
        """Test level one is the mask itself."""
        pattern = fractal_pattern(1)
        assert pattern.sum() == 5
        assert pattern[1].all()

    def test_fractal_mask_validation(self):
        """Test masks without a full middle row are rejected."""
        with pytest.raises(ValueError, match="middle row"):
            fractal_set(1, mask=[[1, 1, 1], [1, 0, 1], [1, 1, 1]])

    def test_fractal_needs_square_host(self):
        """Test fractal sets refuse diamond hosts."""
        with pytest.raises(ValueError, match="square"):
            fractal_set(1, domain=build_domain("slit_diamond", n=2, factor=4))


class TestConductanceField:
    """Test suite for Bessel conductances."""

    def test_zero_drift_is_uniform(self):
        """Test s = 0 gives uniform conductances 1/4."""
        field = conductance_field(0.0, 16)
        assert np.allclose(field.values, 0.25)

    def test_reproduces_kernel(self):
        """Test a(r, r+1) / (a(r-1, r) + a(r, r+1)) = 1/2 - s/(4r)."""
        s = 0.5
        field = conductance_field(s, 20)
        r = np.arange(1, 20)
        up = field.values[r] / (field.values[r - 1] + field.values[r])
        assert np.allclose(up, 0.5 - s / (4.0 * r))
        assert field.bound_constant >= field.values[0]

    def test_mirror_below_baseline(self):
        """Test edges below the baseline mirror those above."""
        field = conductance_field(0.5, 8)
        assert field.edge(-1) == field.edge(0)
        assert field.edge(-3) == field.edge(2)
        with pytest.raises(ValueError, match="beyond"):
            field.edge(8)

    def test_invalid_parameter(self):
        """Test s outside [0, 1) is rejected."""
        with pytest.raises(ValueError, match="s in"):
            conductance_field(1.0, 8)
