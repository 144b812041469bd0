"""Finite-volume building blocks on the x-grid."""

import numpy as np
import pytest

from flockkit import CFLViolation
from flockkit.claw import (
    ClawState,
    FluxFunction,
    advect_conservative,
    ddx_central,
    muscl_reconstruct,
    step_claw,
    step_macro_u,
    step_omega_cs,
    van_leer,
)
from flockkit.grid import XGrid


@pytest.fixture
def xg():
    return XGrid(64, -0.5, 0.5, "periodic")


def test_van_leer_limiter_properties():
    theta = np.array([-1.0, 0.0, 0.5, 1.0, 2.0, 10.0])
    lim = van_leer(theta)
    assert (lim >= 0.0).all()
    assert lim[theta <= 0.0].max() == 0.0
    assert lim[3] == pytest.approx(1.0)
    assert (lim <= 2.0).all()


def test_muscl_reconstruct_constant_is_exact(xg):
    U = np.full((1, xg.Nx), 3.0)
    uL, uR = muscl_reconstruct(U, xg.bc)
    assert np.allclose(uL, 3.0)
    assert np.allclose(uR, 3.0)


def test_ddx_central_of_sine(xg):
    x = xg.centers()
    d = ddx_central(np.sin(2 * np.pi * x), xg)
    # Second-order central difference of sin.
    assert np.allclose(d, 2 * np.pi * np.cos(2 * np.pi * x), atol=2e-2)


def test_advect_conservative_mass_and_positivity(xg, rng):
    q = rng.random(xg.Nx)
    a = np.full(xg.Nx, 0.7)
    mass0 = q.sum()
    for _ in range(50):
        q = advect_conservative(q, a, xg, dt=0.5 * xg.dx / 0.7)
    assert q.sum() == pytest.approx(mass0, rel=1e-13)
    assert (q >= 0.0).all()


def test_advect_conservative_translates_center_of_mass(xg):
    x = xg.centers()
    q = np.exp(-(x / 0.05) ** 2)
    a = np.full(xg.Nx, 1.0)
    dt = 0.5 * xg.dx
    n = int(round(0.2 / dt))
    for _ in range(n):
        q = advect_conservative(q, a, xg, dt)
    # For constant speed the discrete center of mass moves exactly a*dt
    # per step (the profile stays far from the periodic seam here).
    com = (x * q).sum() / q.sum()
    assert com == pytest.approx(n * dt, abs=1e-10)


def test_advect_conservative_raises_on_cfl(xg):
    q = np.ones(xg.Nx)
    a = np.full(xg.Nx, 1.0)
    with pytest.raises(CFLViolation):
        advect_conservative(q, a, xg, dt=2.0 * xg.dx, cfl_mode="error")


def test_step_claw_conserves_each_component(xg, rng):
    U = rng.random((2, xg.Nx)) + 0.5
    flux = FluxFunction(
        evaluate=lambda U: np.stack([0.3 * U[0], 0.5 * U[1] ** 2]),
        max_wavespeed=lambda U: np.maximum(0.3, np.abs(U[1])),
    )
    state = ClawState(U=U, grid=xg)
    totals0 = state.U.sum(axis=1)
    for _ in range(20):
        state = step_claw(state, flux, None, dt=0.2 * xg.dx)
    assert np.allclose(state.U.sum(axis=1), totals0, rtol=1e-13)


def test_step_macro_u_uniform_state_is_steady(xg):
    rho = np.full(xg.Nx, 2.0)
    u = np.full(xg.Nx, 0.4)
    P = np.full(xg.Nx, 0.1)
    omega = np.full(xg.Nx, 1.0)
    B = np.zeros(xg.Nx)
    rho2, u2 = step_macro_u(rho, u, P, omega, B, xg, dt=1e-3)
    assert np.allclose(rho2, rho, atol=1e-14)
    assert np.allclose(u2, u, atol=1e-12)


def test_step_macro_u_alignment_source_acts_linearly(xg):
    rho = np.full(xg.Nx, 1.0)
    u = np.zeros(xg.Nx)
    P = np.zeros(xg.Nx)
    omega = np.full(xg.Nx, 1.0)
    B = np.full(xg.Nx, 0.5)
    _, u2 = step_macro_u(rho, u, P, omega, B, xg, dt=1e-3)
    assert np.allclose(u2, 0.5 * 1e-3, rtol=1e-12)


def test_step_macro_u_keeps_velocity_in_floored_cells(xg):
    # Cells below the density floor carry no momentum; their velocity must
    # be retained as a transport coefficient, not reset.
    rho = np.full(xg.Nx, 1e-16)
    u = np.full(xg.Nx, 1.3)
    P = np.zeros(xg.Nx)
    omega = np.full(xg.Nx, 1.0)
    B = np.zeros(xg.Nx)
    _, u2 = step_macro_u(rho, u, P, omega, B, xg, dt=1e-3, rho_floor=1e-10)
    assert np.allclose(u2, 1.3)


def test_step_omega_cs_exponential_growth(xg):
    # With unit scaling rate and zero velocity the factor satisfies
    # omega' = omega, so a forward Euler march tracks e^t to first order.
    omega = np.ones(xg.Nx)
    u = np.zeros(xg.Nx)
    A = np.ones(xg.Nx)
    dt = 1e-3
    t = 0.0
    while t < 1.0 - 1e-12:
        omega = step_omega_cs(omega, u, A, xg, dt)
        t += dt
    rel = np.abs(omega - np.e).max() / np.e
    assert rel <= 2 * dt * t
