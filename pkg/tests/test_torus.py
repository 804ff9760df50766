"""Torus geometry, grids, and RNG streams."""

import numpy as np
import pytest

from torusskew import TWO_PI, TorusGrid, make_grid, rng_stream, wrap, wrapped_distance
from torusskew.errors import DomainError, ResourceError


class TestWrap:
    def test_range_is_half_open(self):
        rng = np.random.default_rng(1)
        x = rng.uniform(-50, 50, size=10_000)
        w = wrap(x)
        assert np.all(w >= -np.pi)
        assert np.all(w < np.pi)

    def test_canonical_values_pass_through_bitwise(self):
        x = np.array([-np.pi, -1.5, 0.0, 0.25, np.pi - 1e-9, np.nextafter(np.pi, 0)])
        assert np.array_equal(wrap(x), x)

    def test_plus_pi_maps_to_minus_pi(self):
        assert wrap(np.pi) == -np.pi

    def test_multiples_of_two_pi(self):
        for k in range(-3, 4):
            assert abs(wrap(0.7 + k * TWO_PI) - 0.7) < 1e-12

    def test_distributes_over_addition_mod_two_pi(self):
        rng = np.random.default_rng(7)
        a = rng.uniform(-20, 20, size=2_000)
        b = rng.uniform(-20, 20, size=2_000)
        lhs = wrap(a + b)
        rhs = wrap(wrap(a) + wrap(b))
        assert np.max(wrapped_distance(lhs, rhs)) < 1e-12

    def test_scalar_in_scalar_out(self):
        assert np.isscalar(wrap(7.0)) or np.ndim(wrap(7.0)) == 0

    def test_non_finite_rejected(self):
        with pytest.raises(DomainError):
            wrap(np.inf)
        with pytest.raises(DomainError):
            wrap(np.array([0.0, np.nan]))


class TestWrappedDistance:
    def test_zero_iff_equal_mod_two_pi(self):
        assert wrapped_distance(0.3, 0.3 + TWO_PI) < 1e-12
        assert wrapped_distance(0.3, 0.3) == 0.0

    def test_symmetric_and_bounded_by_pi(self):
        rng = np.random.default_rng(3)
        a = rng.uniform(-10, 10, size=1_000)
        b = rng.uniform(-10, 10, size=1_000)
        d_ab = wrapped_distance(a, b)
        d_ba = wrapped_distance(b, a)
        assert np.array_equal(d_ab, d_ba)
        assert np.all(d_ab >= 0)
        assert np.all(d_ab <= np.pi + 1e-15)

    def test_antipodal_distance_is_pi(self):
        assert abs(wrapped_distance(-np.pi / 2, np.pi / 2) - np.pi) < 1e-15

    def test_triangle_inequality(self):
        rng = np.random.default_rng(4)
        a, b, c = rng.uniform(-np.pi, np.pi, size=(3, 500))
        assert np.all(
            wrapped_distance(a, c)
            <= wrapped_distance(a, b) + wrapped_distance(b, c) + 1e-12
        )


class TestTorusGrid:
    def test_integrate_constant(self):
        grid = make_grid(2, 32)
        total = grid.integrate(lambda theta: np.ones(theta.shape[0]))
        assert abs(total - TWO_PI**2) < 1e-9

    def test_integrate_trig_identities(self):
        grid = make_grid(1, 64)
        # The trapezoid rule on the full circle is exact for low harmonics.
        assert abs(grid.integrate(lambda t: np.sin(t[:, 0]))) < 1e-12
        assert (
            abs(grid.integrate(lambda t: np.sin(t[:, 0]) ** 2) - np.pi) < 1e-10
        )

    def test_axis_nodes_cover_canonical_range(self):
        grid = make_grid(3, 16)
        nodes = grid.axis_nodes()
        assert nodes.shape == (16,)
        assert nodes[0] >= -np.pi and nodes[-1] < np.pi
        assert np.allclose(np.diff(nodes), TWO_PI / 16)

    def test_blocks_enumerate_all_nodes_once(self):
        grid = make_grid(2, 16)
        seen = [block for block in grid.iter_blocks()]
        stacked = np.vstack(seen)
        assert stacked.shape == (16 * 16, 2)
        # every pair distinct
        assert len({tuple(row) for row in np.round(stacked, 12)}) == 256

    def test_weight_matches_cell_volume(self):
        grid = make_grid(2, 20)
        assert abs(grid.weight - (TWO_PI / 20) ** 2) < 1e-15

    def test_invalid_construction(self):
        with pytest.raises(DomainError):
            make_grid(0, 16)
        with pytest.raises(DomainError):
            make_grid(2, 1)
        with pytest.raises((DomainError, ResourceError)):
            make_grid(9, 4096)


class TestRngStream:
    def test_deterministic(self):
        a = rng_stream(42, 3).random(8)
        b = rng_stream(42, 3).random(8)
        assert np.array_equal(a, b)

    def test_distinct_paths_decorrelated(self):
        a = rng_stream(42, 0).random(4)
        b = rng_stream(42, 1).random(4)
        c = rng_stream(43, 0).random(4)
        assert not np.array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_multi_component_paths(self):
        a = rng_stream(7, 1, 2).random(4)
        b = rng_stream(7, 1, 3).random(4)
        assert not np.array_equal(a, b)
