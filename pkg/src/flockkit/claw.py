"""Second-order MUSCL / local Lax-Friedrichs solver for 1D conservation laws.

Used for the macroscopic (rho, rho*u) system and for the Cucker-Smale
scaling factor omega.  Reconstruction uses Van Leer's limiter in the total
form phi(t) = (t + |t|)/(1 + |t|); the interface flux is the standard
Rusanov form F = (G(uL) + G(uR))/2 - lambda/2 (uR - uL).  Time integration
is forward Euler throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable
import warnings

import numpy as np

from .errors import CFLViolation, VacuumError, FlockkitError
from .grid import XGrid

__all__ = [
    "ClawState",
    "FluxFunction",
    "van_leer",
    "muscl_reconstruct",
    "lf_flux",
    "step_claw",
    "advect_conservative",
    "step_macro_u",
    "step_omega_cs",
]

SLOPE_EPS = 1e-14


@dataclass(frozen=True)
class ClawState:
    """Cell averages of an n-vector of conserved quantities, shape (n, Nx)."""

    U: np.ndarray
    grid: XGrid

    @property
    def n(self) -> int:
        return self.U.shape[0]


@dataclass(frozen=True)
class FluxFunction:
    """Flux G(U) and the spectral radius of its Jacobian."""

    evaluate: Callable[[np.ndarray], np.ndarray]
    max_wavespeed: Callable[[np.ndarray], np.ndarray]


def van_leer(theta):
    """Van Leer limiter (theta + |theta|) / (1 + |theta|).

    Total function: 0 for theta <= 0, in [0, 2), equal to 1 at theta = 1.
    """
    theta = np.asarray(theta, dtype=float)
    out = (theta + np.abs(theta)) / (1.0 + np.abs(theta))
    return out if out.ndim else float(out)


def _fill_ghosts(U: np.ndarray, bc: str) -> np.ndarray:
    """Pad with two ghost cells per side (periodic wrap or zero-gradient)."""
    if bc == "periodic":
        return np.concatenate([U[..., -2:], U, U[..., :2]], axis=-1)
    if bc == "outflow":
        left = np.repeat(U[..., :1], 2, axis=-1)
        right = np.repeat(U[..., -1:], 2, axis=-1)
        return np.concatenate([left, U, right], axis=-1)
    raise FlockkitError(f"unknown boundary kind {bc!r}")


def muscl_reconstruct(U: np.ndarray, bc: str):
    """Slope-limited interface states.

    Returns (uL, uR) of shape (..., Nx+1): states on the left/right of every
    interface i-1/2 for i = 0..Nx.  Componentwise slopes use safe division
    (limiter set to 0 where the forward difference is below roundoff).
    """
    U = np.atleast_2d(np.asarray(U, dtype=float))
    Up = _fill_ghosts(U, bc)
    dU = np.diff(Up, axis=-1)                      # dU[k] = Up[k+1] - Up[k]
    scale = np.maximum(np.max(np.abs(U), axis=-1, keepdims=True), 1.0)
    denom = dU[..., 1:]                            # forward difference of cell k+1
    numer = dU[..., :-1]
    safe = np.abs(denom) > SLOPE_EPS * scale
    theta = np.where(safe, numer / np.where(safe, denom, 1.0), 0.0)
    phi = np.where(safe, van_leer(theta), 0.0)
    # limited increment of padded cell k (k = 1 .. Nx+2)
    incr = 0.5 * phi * denom
    uL = Up[..., 1:-2] + incr[..., :-1]
    uR = Up[..., 2:-1] - incr[..., 1:]
    return uL, uR


def _lf_flux_lam(uL: np.ndarray, uR: np.ndarray, flux: FluxFunction):
    lam = np.maximum(flux.max_wavespeed(uL), flux.max_wavespeed(uR))
    F = 0.5 * (flux.evaluate(uL) + flux.evaluate(uR)) - 0.5 * lam * (uR - uL)
    return F, lam


def lf_flux(uL: np.ndarray, uR: np.ndarray, flux: FluxFunction):
    """Local Lax-Friedrichs (Rusanov) interface flux."""
    return _lf_flux_lam(uL, uR, flux)[0]


def _check_cfl(dt, lam_max, dx, cfl_mode):
    if lam_max * dt / dx > 1.0 + 1e-12:
        msg = (f"CFL violation: dt*lambda/dx = {lam_max * dt / dx:.3f} > 1 "
               f"(dt={dt:.3e}, lambda={lam_max:.3e}, dx={dx:.3e})")
        if cfl_mode == "error":
            raise CFLViolation(msg)
        warnings.warn(msg)


def step_claw(state: ClawState, flux: FluxFunction, source, dt,
              cfl_mode="error") -> ClawState:
    """One forward-Euler MUSCL-LF step.

    `source` is the source density per cell (same shape as U) or None; the
    cell total sum(dx * U) changes only by dt * sum(dx * source) plus the
    boundary fluxes when the domain is not periodic.
    """
    if dt <= 0:
        raise FlockkitError("dt must be positive")
    U = np.atleast_2d(state.U)
    uL, uR = muscl_reconstruct(U, state.grid.bc)
    F, lam = _lf_flux_lam(uL, uR, flux)
    _check_cfl(dt, float(np.max(lam)), state.grid.dx, cfl_mode)
    Unew = U - dt / state.grid.dx * (F[..., 1:] - F[..., :-1])
    if source is not None:
        Unew = Unew + dt * np.atleast_2d(source)
    return ClawState(U=Unew.reshape(state.U.shape), grid=state.grid)


def _interface_speeds(a: np.ndarray, bc: str) -> np.ndarray:
    """Arithmetic-mean speeds at all Nx+1 interfaces of a cell-centered field."""
    ap = _fill_ghosts(a, bc)
    return 0.5 * (ap[..., 1:-2] + ap[..., 2:-1])


def advect_conservative(q, a, grid: XGrid, dt, source=None, cfl_mode="error"):
    """One MUSCL-LF step for dq/dt + d(a(x) q)/dx = source.

    The speed field `a` is given at cell centers and frozen over the step;
    interface speeds are arithmetic means of the adjacent cells.
    """
    q = np.asarray(q, dtype=float)
    a_if = _interface_speeds(np.asarray(a, dtype=float), grid.bc)
    qL, qR = muscl_reconstruct(q, grid.bc)
    qL, qR = qL[0], qR[0]
    F = 0.5 * a_if * (qL + qR) - 0.5 * np.abs(a_if) * (qR - qL)
    _check_cfl(dt, float(np.max(np.abs(a_if))), grid.dx, cfl_mode)
    qnew = q - dt / grid.dx * (F[1:] - F[:-1])
    if source is not None:
        qnew = qnew + dt * np.asarray(source, dtype=float)
    return qnew


def ddx_central(q, grid: XGrid) -> np.ndarray:
    """Central difference with the grid's boundary handling."""
    qp = _fill_ghosts(np.asarray(q, dtype=float), grid.bc)
    return (qp[..., 3:-1] - qp[..., 1:-3]) / (2.0 * grid.dx)


def _macro_flux() -> FluxFunction:
    def evaluate(U):
        rho, m = U[0], U[1]
        with np.errstate(divide="ignore", invalid="ignore"):
            u = np.where(rho > 0, m / np.where(rho > 0, rho, 1.0), 0.0)
        return np.stack([m, m * u])

    def max_wavespeed(U):
        rho, m = U[0], U[1]
        with np.errstate(divide="ignore", invalid="ignore"):
            u = np.where(rho > 0, m / np.where(rho > 0, rho, 1.0), 0.0)
        return np.abs(u)

    return FluxFunction(evaluate=evaluate, max_wavespeed=max_wavespeed)


MACRO_FLUX = _macro_flux()


def step_macro_u(rho, u, P, omega, B, grid: XGrid, dt, cfl_mode="error",
                 rho_floor=0.0):
    """Advance U = (rho, rho*u) with flux (rho*u, rho*u^2) and source
    (0, rho*B - d/dx(P / omega^2)).

    The pressure gradient is a central difference; P comes from the kinetic
    distribution and is exogenous to U, so it enters as a source, not a flux.
    Returns the updated (rho, u).  Cells at or below `rho_floor` after the
    step raise VacuumError unless rho_floor > 0, in which case u keeps its
    previous value there: an essentially empty cell carries no momentum, and
    its u is only read back as a transport coefficient, so continuity is the
    sane choice (the kinetic Cucker-Smale driver runs with genuine vacuum
    cells).
    """
    rho = np.asarray(rho, dtype=float)
    u = np.asarray(u, dtype=float)
    if rho_floor == 0.0 and np.any(rho <= 0):
        raise VacuumError("step_macro_u requires strictly positive density")
    U = np.stack([rho, rho * u])
    pterm = ddx_central(np.asarray(P, dtype=float) / np.asarray(omega, dtype=float) ** 2, grid)
    if rho_floor > 0.0:
        # No pressure force acts on an essentially empty cell; this mirrors
        # the masking of the pressure-gradient drift in the kinetic fluxes.
        pterm = np.where(rho > rho_floor, pterm, 0.0)
    source = np.stack([np.zeros_like(rho), rho * np.asarray(B, dtype=float) - pterm])
    new = step_claw(ClawState(U=U, grid=grid), MACRO_FLUX, source, dt,
                    cfl_mode=cfl_mode)
    rho_new, m_new = new.U[0], new.U[1]
    if rho_floor == 0.0:
        if np.any(rho_new <= 0):
            raise VacuumError("vacuum formed during the macroscopic step")
        return rho_new, m_new / rho_new
    ok = rho_new > rho_floor
    u_new = np.where(ok, m_new / np.where(ok, rho_new, 1.0), u)
    return rho_new, u_new


def step_omega_cs(omega, u, A, grid: XGrid, dt, cfl_mode="error"):
    """One step of the conservative omega equation

        d omega/dt + d(u omega)/dx = omega (du/dx + A).

    The result must stay strictly positive.
    """
    omega = np.asarray(omega, dtype=float)
    if np.any(omega <= 0):
        raise VacuumError("omega must be strictly positive")
    source = omega * (ddx_central(u, grid) + np.asarray(A, dtype=float))
    out = advect_conservative(omega, u, grid, dt, source=source,
                              cfl_mode=cfl_mode)
    if np.any(out <= 0):
        raise CFLViolation(
            "omega became nonpositive; reduce dt (the source term integration "
            "is explicit)"
        )
    return out
