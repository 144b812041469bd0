"""Direct phase-space reference solver (unrescaled variables)."""

import numpy as np
import pytest

from flockkit import CFLViolation, indicator, make_grid
from flockkit.direct import DirectState, drift_field, step_direct


@pytest.fixture
def setup(rng):
    grid = make_grid(12, 33, -0.5, 0.5, -4.0, 4.0)
    X, V = np.meshgrid(grid.x_centers(), grid.xi_centers(), indexing="ij")
    f = np.exp(-((V - 0.3 * np.sin(2 * np.pi * X)) ** 2))
    state = DirectState(f=f, t=0.0, model="CS", phi=indicator(0.3), grid=grid)
    return grid, state


def test_naive_and_fast_drift_agree(setup):
    grid, state = setup
    d_fast = drift_field(state.f, state.phi, state.model, grid)
    d_naive = drift_field(state.f, state.phi, state.model, grid, naive=True)
    assert np.allclose(d_fast, d_naive, rtol=1e-12, atol=1e-14)


def test_step_conserves_mass(setup):
    grid, state = setup
    mass0 = state.f.sum() * grid.dx * grid.dxi
    dmax = np.abs(drift_field(state.f, state.phi, state.model, grid)).max()
    vmax = max(abs(grid.xi_min), abs(grid.xi_max))
    dt = 0.5 * min(grid.dx / vmax, grid.dxi / max(dmax, 1e-12))
    for _ in range(20):
        state = step_direct(state, dt)
    assert state.f.sum() * grid.dx * grid.dxi == pytest.approx(mass0,
                                                               rel=1e-12)


def test_cs_step_conserves_total_momentum(setup):
    grid, state = setup
    v = grid.xi_centers()
    p0 = (state.f @ v).sum() * grid.dx * grid.dxi
    dmax = np.abs(drift_field(state.f, state.phi, state.model, grid)).max()
    vmax = max(abs(grid.xi_min), abs(grid.xi_max))
    dt = 0.5 * min(grid.dx / vmax, grid.dxi / max(dmax, 1e-12))
    for _ in range(20):
        state = step_direct(state, dt)
    p1 = (state.f @ v).sum() * grid.dx * grid.dxi
    assert p1 == pytest.approx(p0, abs=1e-10 * max(abs(p0), 1.0))


def test_step_keeps_f_nonnegative(setup):
    grid, state = setup
    dmax = np.abs(drift_field(state.f, state.phi, state.model, grid)).max()
    vmax = max(abs(grid.xi_min), abs(grid.xi_max))
    dt = 0.4 * min(grid.dx / vmax, grid.dxi / max(dmax, 1e-12))
    for _ in range(20):
        state = step_direct(state, dt)
    assert state.f.min() >= -1e-14 * state.f.max()


def test_step_raises_on_excessive_dt(setup):
    grid, state = setup
    with pytest.raises(CFLViolation):
        step_direct(state, dt=10.0 * grid.dx)


def test_alignment_pushes_velocities_together(setup):
    # The drift accelerates slow particles upward where neighbours are
    # faster: its sign correlates with u - v.
    grid, state = setup
    v = grid.xi_centers()
    rho = state.f.sum(axis=1) * grid.dxi
    u = (state.f @ v) * grid.dxi / rho
    d = drift_field(state.f, state.phi, state.model, grid)
    mismatch = u[:, None] - v[None, :]
    mask = state.f > 1e-3 * state.f.max()
    corr = np.sign(d[mask]) * np.sign(mismatch[mask])
    assert (corr >= 0).mean() > 0.95
