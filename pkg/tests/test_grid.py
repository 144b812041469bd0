"""Mesh construction and moment computation."""

import numpy as np
import pytest

from flockkit import GridError, make_grid, moments_of
from flockkit.grid import XGrid


def test_xgrid_spacing_and_centers():
    xg = XGrid(10, -0.5, 0.5, "periodic")
    assert xg.dx == pytest.approx(0.1)
    c = xg.centers()
    assert c.shape == (10,)
    assert c[0] == pytest.approx(-0.45)
    assert c[-1] == pytest.approx(0.45)


def test_phase_grid_has_bitwise_zero_center():
    grid = make_grid(8, 41, -0.5, 0.5, -5.0, 5.0)
    xi = grid.xi_centers()
    assert xi[grid.J] == 0.0
    assert xi.shape == (41,)
    assert np.allclose(np.diff(xi), grid.dxi)


def test_make_grid_rejects_offset_velocity_mesh():
    # No cell center falls on xi = 0 for an even count on [-1, 1].
    with pytest.raises(GridError):
        make_grid(8, 40, -0.5, 0.5, -1.0, 1.0)


def test_make_grid_asymmetric_bounds_with_zero_center():
    # [-1, 3] with 8 cells has dxi = 0.5 and centers at -0.75 + 0.5 j;
    # none hits 0, while 9 cells on [-1.25, 3.25] do.
    grid = make_grid(4, 9, -0.5, 0.5, -1.25, 3.25)
    assert grid.xi_centers()[grid.J] == 0.0


def test_moments_match_direct_sums(small_grid, rng):
    g = rng.random((small_grid.Nx, small_grid.Nxi))
    xi = small_grid.xi_centers()
    m = moments_of(g, small_grid)
    assert np.allclose(m.rho, g.sum(axis=1) * small_grid.dxi)
    assert np.allclose(m.M, (g * xi).sum(axis=1) * small_grid.dxi)
    assert np.allclose(m.P, (g * xi**2).sum(axis=1) * small_grid.dxi)


def test_moments_of_even_profile_have_exactly_zero_momentum(small_grid, rng):
    g = rng.random((small_grid.Nx, small_grid.Nxi))
    g = 0.5 * (g + g[:, ::-1])
    m = moments_of(g, small_grid)
    assert np.abs(m.M).max() == 0.0
