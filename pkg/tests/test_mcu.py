"""Velocity-drift fluxes for the anti-drift equation: dt g + c d_xi(xi g) = 0.

The momentum-corrected upwind family must satisfy the exact discrete
momentum update M^{n+1} = (1 + c dt) M^n, conserve mass bitwise (wall
boundaries), and for c*theta >= 0 under the CFL bound keep g nonnegative
with constant l1 norm.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from flockkit import make_grid
from flockkit.mcu import (
    DriftFluxSpec,
    discrete_momentum_law_check,
    mcu_drift_flux,
    step_toy,
    toy_cfl_limit,
    upwind_drift_closed_form,
    upwind_drift_flux,
)

GRID = make_grid(3, 41, -0.5, 0.5, -5.0, 5.0)

g_fields = arrays(np.float64, (1, GRID.Nxi),
                  elements=st.floats(0.0, 10.0, allow_nan=False))


def compact(g, pad=2):
    """Zero the outermost cells: the momentum law is exact only for data
    supported away from the wall boundaries."""
    g = g.copy()
    g[..., :pad] = 0.0
    g[..., -pad:] = 0.0
    return g


@settings(max_examples=200, deadline=None)
@given(g=g_fields, c=st.floats(-2.0, 2.0),
       theta=st.sampled_from([-1.0, 0.0, 1.0]))
def test_momentum_update_is_exact(g, c, theta):
    g = compact(g)
    spec = DriftFluxSpec(c=c, theta=theta)
    dt = min(0.2 * toy_cfl_limit(GRID, c), 1.0) if c != 0.0 else 1e-3
    resid = discrete_momentum_law_check(g, GRID, spec, dt)
    scale = GRID.dxi * (np.abs(GRID.xi_centers()) * g).sum()
    assert np.abs(resid).max() <= 1e-15 * max(scale, 1e-30)


@settings(max_examples=200, deadline=None)
@given(g=g_fields, c=st.floats(-2.0, 2.0),
       theta=st.sampled_from([-1.0, 0.0, 1.0]))
def test_mass_is_conserved_bitwise(g, c, theta):
    spec = DriftFluxSpec(c=c, theta=theta)
    dt = min(0.2 * toy_cfl_limit(GRID, c), 1.0) if c != 0.0 else 1e-3
    g1 = step_toy(g, GRID, spec, dt)
    assert g1.sum() == pytest.approx(g.sum(), rel=1e-14, abs=1e-300)


@settings(max_examples=200, deadline=None)
@given(g=g_fields, c=st.floats(-2.0, 2.0),
       theta=st.sampled_from([0.0, 1.0]))
def test_positivity_and_l1_under_cfl(g, c, theta):
    # c * theta >= 0 required for the positivity proposition.
    if c * theta < 0.0:
        theta = -theta
    spec = DriftFluxSpec(c=c, theta=theta)
    dt = min(0.9 * toy_cfl_limit(GRID, c), 1.0) if c != 0.0 else 1e-3
    l1_0 = np.abs(g).sum()
    g1 = step_toy(g, GRID, spec, dt)
    assert (g1 >= 0.0).all()
    assert np.abs(g1).sum() == pytest.approx(l1_0, rel=1e-13, abs=1e-300)


def test_mcu_flux_is_affine_in_theta(rng):
    # F(theta) = F(0) - (c theta dxi / 2)(g_{j+1} - g_j) at interior
    # interfaces, zero at the walls.
    g = rng.random((1, GRID.Nxi))
    c = 1.3
    F0 = mcu_drift_flux(g, GRID, c, theta=0.0)
    F1 = mcu_drift_flux(g, GRID, c, theta=1.0)
    jump = g[:, 1:] - g[:, :-1]
    assert np.allclose((F0 - F1)[:, 1:-1], 0.5 * c * GRID.dxi * jump)
    assert np.allclose((F0 - F1)[:, [0, -1]], 0.0)


def test_boundary_fluxes_are_zero(rng):
    g = rng.random((1, GRID.Nxi))
    for F in (upwind_drift_flux(g, GRID, 1.0),
              mcu_drift_flux(g, GRID, -0.7, theta=1.0)):
        assert F.shape == (1, GRID.Nxi + 1)
        assert F[:, 0].max() == 0.0
        assert F[:, -1].max() == 0.0


def test_upwind_momentum_drift_matches_closed_form(rng):
    g = compact(rng.random((1, GRID.Nxi)))
    dt = 0.3 * toy_cfl_limit(GRID, 1.0)
    resid = discrete_momentum_law_check(
        g, GRID, DriftFluxSpec(c=1.0, family="upwind"), dt)
    assert np.allclose(resid, upwind_drift_closed_form(g, GRID, dt),
                       rtol=1e-10)


def test_upwind_violates_momentum_but_mcu_does_not(rng):
    # The qualitative content of the momentum comparison: plain upwind
    # drifts away from the exact update, the corrected flux does not.
    g = compact(rng.random((1, GRID.Nxi)))
    dt = 0.2 * toy_cfl_limit(GRID, 1.0)
    r_up = np.abs(discrete_momentum_law_check(
        g, GRID, DriftFluxSpec(c=1.0, family="upwind"), dt)).max()
    r_mcu = np.abs(discrete_momentum_law_check(
        g, GRID, DriftFluxSpec(c=1.0, theta=0.0), dt)).max()
    assert r_mcu < 1e-14
    assert r_up > 1e3 * max(r_mcu, 1e-18)
