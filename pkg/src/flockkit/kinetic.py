"""Full rescaled solvers for the (g, u, omega) system.

The distribution update assembles four (Motsch-Tadmor) or five
(Cucker-Smale) first-order fluxes:

  F1  x-upwind on u g                    (sign of the interface velocity)
  F2  x-upwind on (xi/omega) g           (sign split at xi = 0)
  F3  xi MCU-theta flux with c_i = -(du/dx)_i
  F4  xi upwind on the pressure-gradient drift, with the one-sided
      biased difference that makes F2 + F4 momentum-neutral cell by cell
  F5  (CS only) xi flux for the (dx omega / omega^2) xi^2 term, built to be
      momentum-compatible with F4

x is periodic; both xi-boundary fluxes vanish (compact support).  The
macroscopic velocity is advanced by the MUSCL-LF solver of `claw`, and
omega analytically (MT) or by its conservative equation (CS).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from . import claw
from .errors import CFLViolation, FlockkitError, VacuumError
from .grid import PhaseGrid, make_grid, moments_of
from .mcu import mcu_drift_flux
from .operators import InfluenceFunction, compute_alignment, kernel_matrix

__all__ = [
    "RescaledState",
    "rescale_initial",
    "flux_F1",
    "flux_F2",
    "flux_F3",
    "flux_F4",
    "flux_F5",
    "step_mt",
    "step_cs",
    "stable_dt",
    "KineticSolver",
]


@dataclass(frozen=True)
class RescaledState:
    """Snapshot of the rescaled system: g on (x, xi), u and omega per x-cell."""

    g: np.ndarray
    u: np.ndarray
    omega: np.ndarray
    t: float
    model: str  # "MT" | "CS"
    grid: PhaseGrid
    phi: InfluenceFunction
    theta_mcu: float | str = 0.0  # blend parameter or "adaptive"

    def moments(self):
        return moments_of(self.g, self.grid)


def _interface_mean(a: np.ndarray) -> np.ndarray:
    """Periodic interface values a_{i+1/2} = (a_i + a_{i+1}) / 2, i = 0..Nx-1."""
    return 0.5 * (a + np.roll(a, -1))


def _ddx_central_periodic(a: np.ndarray, dx: float) -> np.ndarray:
    return (np.roll(a, -1) - np.roll(a, 1)) / (2.0 * dx)


def _diff_x(F: np.ndarray) -> np.ndarray:
    """F_{i+1/2} - F_{i-1/2} from periodic interface values indexed by i."""
    return F - np.roll(F, 1, axis=0)


def flux_F1(g: np.ndarray, u_iface: np.ndarray) -> np.ndarray:
    """x-upwind flux on u g.  Row i holds the flux at interface i+1/2."""
    g_right = np.roll(g, -1, axis=0)
    up = u_iface[:, None]
    return np.where(up >= 0, up * g, up * g_right)


def flux_F2(g: np.ndarray, omega_iface: np.ndarray, grid: PhaseGrid) -> np.ndarray:
    """x-upwind flux on (xi/omega) g, upwinded by the sign of xi.

    `omega_iface` is the scaling factor at the x-interfaces (a constant row
    for MT, the first-order interpolation (omega_i + omega_{i+1})/2 for CS).
    """
    xi = grid.xi_centers()
    speed = xi[None, :] / omega_iface[:, None]
    g_right = np.roll(g, -1, axis=0)
    take_left = np.arange(grid.Nxi)[None, :] >= grid.J
    return np.where(take_left, speed * g, speed * g_right)


def _pad_xi_flux(F_int: np.ndarray) -> np.ndarray:
    """Zero boundary fluxes on both xi ends (exact mass conservation)."""
    z = np.zeros((F_int.shape[0], 1))
    return np.concatenate([z, F_int, z], axis=1)


def flux_F3(g: np.ndarray, dudx: np.ndarray, grid: PhaseGrid, theta) -> np.ndarray:
    """MCU-theta xi-fluxes with the cell-dependent drift rate c_i = -(du/dx)_i.

    `theta` is a blend in [-1, 1] or "adaptive" (theta_i = sign(c_i)).
    Returns shape (Nx, Nxi+1).
    """
    c = -np.asarray(dudx, dtype=float)
    th = np.sign(c) if isinstance(theta, str) and theta == "adaptive" else float(theta)
    return mcu_drift_flux(g, grid, c, th)


def _pressure_drift_mt(g, grid, omega):
    """One-sided (dP/dx)_i / (rho_i omega): coefficient of the MT F4 drift."""
    xi2 = grid.xi_centers() ** 2
    up = np.zeros_like(g)
    dn = np.zeros_like(g)
    up[:, grid.J + 1:] = g[:, grid.J + 1:] - np.roll(g, 1, axis=0)[:, grid.J + 1:]
    dn[:, : grid.J] = np.roll(g, -1, axis=0)[:, : grid.J] - g[:, : grid.J]
    dP = grid.dxi / grid.dx * ((up + dn) @ xi2)
    return dP / omega


def _pressure_drift_cs(g, grid, omega_iface):
    """CS F4 coefficient numerator: (omega_{i+1/2}+omega_{i-1/2})/2 * [d/dx(P/omega^2)]_i.

    The one-sided difference of P/omega^2 weighs every g-slice by the squared
    interface values omega_{i+-1/2} of the cell being updated (the staggered
    reading of the scaling factor).  Together with the centered omega
    increment in `flux_F5` this makes the per-cell momentum budget of
    F2 + F4 + F5 cancel identically for arbitrary omega > 0; weighing by the
    cell values omega_i instead breaks the cancellation at first order in the
    omega increment.
    """
    xi2 = grid.xi_centers() ** 2
    b = omega_iface[:, None] ** 2               # omega_{i+1/2}^2
    a = np.roll(omega_iface, 1)[:, None] ** 2   # omega_{i-1/2}^2
    up = np.zeros_like(g)
    dn = np.zeros_like(g)
    sl = np.s_[:, grid.J + 1:]
    up[sl] = (g / b)[sl] - (np.roll(g, 1, axis=0) / a)[sl]
    dn[:, : grid.J] = (np.roll(g, -1, axis=0) / b)[:, : grid.J] - (g / a)[:, : grid.J]
    dPw = grid.dxi / grid.dx * ((up + dn) @ xi2)
    return 0.5 * (omega_iface + np.roll(omega_iface, 1)) * dPw


def flux_F4(g: np.ndarray, rho: np.ndarray, omega, grid: PhaseGrid,
            model: str, vacuum_tol: Optional[float] = None) -> np.ndarray:
    """xi-upwind flux on the pressure-gradient drift term.

    MT: coefficient (1/(rho_i omega)) (dP/dx)_i with the biased one-sided
    difference; CS: (1/rho_i) (omega_{i+1/2}+omega_{i-1/2})/2 [d/dx(P/w^2)]_i.
    Cells with rho_i <= 0 raise VacuumError unless `vacuum_tol` is given, in
    which case the drift coefficient is zeroed below rho <= vacuum_tol*max(rho)
    (no pressure force can emanate from an empty cell).
    """
    omega = np.broadcast_to(np.asarray(omega, dtype=float), rho.shape)
    if model == "MT":
        num = _pressure_drift_mt(g, grid, omega)
    elif model == "CS":
        num = _pressure_drift_cs(g, grid, _interface_mean(omega))
    else:
        raise FlockkitError(f"unknown model {model!r}")
    if vacuum_tol is None:
        if np.any(rho <= 0):
            raise VacuumError("vacuum cell in the pressure-drift flux")
        coef = num / rho
    else:
        live = rho > vacuum_tol * max(float(np.max(rho)), 1e-300)
        coef = np.where(live, num / np.where(live, rho, 1.0), 0.0)
    c = coef[:, None]
    F_int = np.where(c >= 0, c * g[:, :-1], c * g[:, 1:])
    return _pad_xi_flux(F_int)


def flux_F5(g: np.ndarray, omega: np.ndarray, grid: PhaseGrid,
            variant: str = "paired") -> np.ndarray:
    """CS-only xi flux for the (dx omega / omega^2) xi^2 drift.

    "paired" is the interface-centered momentum-preserving variant (the
    xi_j xi_{j+1}/4 stencil); "simple" the cell-biased one.  Both vanish when
    omega is spatially constant, and carry a factor xi_J = 0 on the
    interfaces adjacent to xi = 0.

    The omega increment is centered, (omega_{i+1/2} - omega_{i-1/2})/dx, in
    both xi-branches; see `_pressure_drift_cs` for why this exact pairing
    with F4 is what closes the per-cell momentum budget.
    """
    xi = grid.xi_centers()
    J = grid.J
    w_if = _interface_mean(omega)          # omega_{i+1/2}
    w2p = w_if[:, None] ** 2               # omega_{i+1/2}^2
    w2m = np.roll(w_if, 1)[:, None] ** 2   # omega_{i-1/2}^2
    dw = ((w_if - np.roll(w_if, 1)) / grid.dx)[:, None]
    dw_back = dw
    dw_fwd = dw
    gm = np.roll(g, 1, axis=0)             # g_{i-1,j}
    gp = np.roll(g, -1, axis=0)            # g_{i+1,j}
    upper = (np.arange(grid.Nxi - 1) >= J)[None, :]
    if variant == "paired":
        coef = (xi[:-1] * xi[1:] / 4.0)[None, :]
        pair = g[:, :-1] + g[:, 1:]
        pair_m = gm[:, :-1] + gm[:, 1:]
        pair_p = gp[:, :-1] + gp[:, 1:]
        F_up = coef * (pair / w2p + pair_m / w2m) * dw_back
        F_dn = coef * (pair_p / w2p + pair / w2m) * dw_fwd
    elif variant == "simple":
        coef = (xi[:-1] ** 2 / 2.0)[None, :]
        F_up = coef * (g[:, :-1] / w2p + gm[:, :-1] / w2m) * dw_back
        F_dn = coef * (gp[:, :-1] / w2p + g[:, :-1] / w2m) * dw_fwd
    else:
        raise FlockkitError(f"unknown F5 variant {variant!r}")
    F_int = np.where(upper, F_up, F_dn)
    return _pad_xi_flux(F_int)


class KineticSolver:
    """Driver holding the static pieces of a run (grid, kernel, options)."""

    def __init__(self, grid: PhaseGrid, model: str, phi: InfluenceFunction,
                 theta_mcu=0.0, f5_variant="paired", cfl_mode="warn",
                 disable_transport=False, vacuum_tol=None):
        if grid.bc_x != "periodic":
            raise FlockkitError("the kinetic solvers require periodic x")
        if model not in ("MT", "CS"):
            raise FlockkitError(f"unknown model {model!r}")
        self.grid = grid
        self.model = model
        self.phi = phi
        self.theta_mcu = theta_mcu
        self.f5_variant = f5_variant
        self.cfl_mode = cfl_mode
        self.disable_transport = disable_transport
        self.vacuum_tol = vacuum_tol
        self.kernel = kernel_matrix(phi, grid)
        self._cfl_warned = False

    def initial_state(self, f0: Callable, omega0=1.0) -> RescaledState:
        return rescale_initial(f0, omega0, self.grid, model=self.model,
                               phi=self.phi, theta_mcu=self.theta_mcu)

    # -- one explicit step: moments/alignment, g, u, omega ------------------

    def step(self, state: RescaledState, dt: float) -> RescaledState:
        grid = self.grid
        g, u, omega, t = state.g, state.u, state.omega, state.t
        mom = moments_of(g, grid)
        rho = mom.rho
        align = compute_alignment(self.model, self.phi, rho, u, grid,
                                  kernel=self.kernel)

        if self.disable_transport:
            # homogeneous dynamics: g is an exact steady state, u follows B
            g_new = g
            u_new = u + dt * align.B
        else:
            dudx = _ddx_central_periodic(u, grid.dx)
            u_if = _interface_mean(u)
            F1 = flux_F1(g, u_if)
            F3 = flux_F3(g, dudx, grid, self.theta_mcu)
            if self.model == "MT":
                w_if = np.full(grid.Nx, float(np.mean(omega)))
                F2 = flux_F2(g, w_if, grid)
                F4 = flux_F4(g, rho, omega, grid, "MT",
                             vacuum_tol=self.vacuum_tol)
                F5 = None
            else:
                w_if = _interface_mean(omega)
                F2 = flux_F2(g, w_if, grid)
                F4 = flux_F4(g, rho, omega, grid, "CS",
                             vacuum_tol=self.vacuum_tol)
                F5 = flux_F5(g, omega, grid, variant=self.f5_variant)
            self._monitor_cfl(g, u, omega, dudx, dt)
            g_new = (g
                     - dt / grid.dx * (_diff_x(F1) + _diff_x(F2))
                     - dt / grid.dxi * np.diff(F3 + F4, axis=1))
            if F5 is not None:
                g_new = g_new - dt / grid.dxi * np.diff(F5, axis=1)
            _, u_new = claw.step_macro_u(
                rho, u, mom.P, omega, align.B, grid.xgrid, dt,
                cfl_mode=self.cfl_mode,
                rho_floor=(self.vacuum_tol or 0.0) * float(np.max(rho)))

        if self.model == "MT":
            omega_new = omega * np.exp(dt)   # omega(t) = omega0 e^t exactly
        else:
            omega_new = claw.step_omega_cs(omega, u, align.A, grid.xgrid, dt,
                                           cfl_mode=self.cfl_mode)
        return replace(state, g=g_new, u=u_new, omega=omega_new, t=t + dt)

    def _monitor_cfl(self, g, u, omega, dudx, dt):
        """Support-aware CFL monitor (cells where g is negligible carry no
        signal, so formal grid-extreme speeds overstate the constraint)."""
        if self._cfl_warned or self.cfl_mode == "off":
            return
        gmax = float(np.max(g))
        if gmax <= 0:
            return
        grid = self.grid
        xi = grid.xi_centers()
        live = g > 1e-10 * gmax
        if not np.any(live):
            return
        xi_live = np.abs(xi)[np.any(live, axis=0)].max()
        vx = np.max(np.abs(u)) + xi_live / np.min(omega)
        vxi = np.max(np.abs(dudx)) * xi_live
        nu = dt * (vx / grid.dx + vxi / grid.dxi)
        if nu > 1.0:
            msg = (f"effective CFL number {nu:.2f} > 1 at t where support "
                   f"reaches |xi| = {xi_live:.2f}")
            if self.cfl_mode == "error":
                raise CFLViolation(msg)
            warnings.warn(msg)
            self._cfl_warned = True


def _project_zero_momentum(g, grid):
    """Remove the per-cell momentum residual of sampled data.

    Multiplicative correction g <- g (1 - xi M_i / P_i), clipped at 0 and
    iterated; exact to roundoff after one pass when no clipping occurs.
    """
    xi = grid.xi_centers()
    for _ in range(3):
        mom = moments_of(g, grid)
        scale = grid.dxi * np.sum(np.abs(xi) * g, axis=1) + 1e-300
        if np.all(np.abs(mom.M) <= 8 * np.finfo(float).eps * scale):
            break
        ok = mom.P > 0
        corr = np.where(ok, mom.M / np.where(ok, mom.P, 1.0), 0.0)
        g = np.maximum(g * (1.0 - xi[None, :] * corr[:, None]), 0.0)
    return g


def rescale_initial(f0: Callable, omega0, grid: PhaseGrid, model="MT",
                    phi: Optional[InfluenceFunction] = None, theta_mcu=0.0,
                    v_grid: Optional[PhaseGrid] = None) -> RescaledState:
    """Build the rescaled initial state from a sampler f0(x, v).

    rho0 and u0 come from quadrature of f0 on a velocity grid (by default
    the xi-grid reused as a v-grid); g is sampled through the change of
    variables g(0,x,xi) = f0(x, u0 + xi/omega0) / omega0, then projected to
    exactly zero per-cell momentum.
    """
    x = grid.x_centers()
    vg = v_grid if v_grid is not None else grid
    v = vg.xi_centers()
    fv = np.asarray(f0(x[:, None], v[None, :]), dtype=float)
    if np.any(fv < 0):
        raise FlockkitError("f0 must be nonnegative")
    rho0 = vg.dxi * fv.sum(axis=1)
    if model == "MT" and np.any(rho0 <= 0):
        raise VacuumError("vacuum cell in the initial data (MT needs rho > 0)")
    live = rho0 > 0
    u0 = np.where(live, vg.dxi * (fv @ v) / np.where(live, rho0, 1.0), 0.0)
    omega0 = np.broadcast_to(np.asarray(omega0, dtype=float), x.shape).astype(float)
    if np.any(omega0 <= 0):
        raise FlockkitError("omega0 must be strictly positive")
    if model == "MT" and not np.allclose(omega0, omega0[0]):
        raise FlockkitError("MT runs require a spatially uniform omega0")
    xi = grid.xi_centers()
    g0 = np.asarray(f0(x[:, None], u0[:, None] + xi[None, :] / omega0[:, None]),
                    dtype=float) / omega0[:, None]
    g0 = _project_zero_momentum(g0, grid)
    return RescaledState(g=g0, u=u0, omega=omega0.copy(), t=0.0, model=model,
                         grid=grid, phi=phi, theta_mcu=theta_mcu)


def _solver_for(state: RescaledState, **kw) -> KineticSolver:
    return KineticSolver(state.grid, state.model, state.phi,
                         theta_mcu=state.theta_mcu, **kw)


def step_mt(state: RescaledState, dt: float, **kw) -> RescaledState:
    """One MT step (convenience wrapper; long runs should reuse a
    KineticSolver to keep the influence kernel cached)."""
    if state.model != "MT":
        raise FlockkitError("step_mt requires an MT state")
    return _solver_for(state, **kw).step(state, dt)


def step_cs(state: RescaledState, dt: float, **kw) -> RescaledState:
    if state.model != "CS":
        raise FlockkitError("step_cs requires a CS state")
    return _solver_for(state, **kw).step(state, dt)


def stable_dt(state: RescaledState, cfl_number: float, dt_max: float = 1.0,
              vacuum_tol: float = 1e-12) -> float:
    """Largest admissible dt from the joint transport + drift CFL bound.

    The forward-Euler update sums separate flux divergences, so stability
    needs  dt * (v_x/dx + v_xi/dxi) <= 1  with the x-speed
    v_x = max |u| + |xi|_max / min omega and the xi-speed the sum of the
    actual drift-coefficient magnitudes (anti-drift |du/dx| * |xi|_max, the
    pressure-gradient coefficient, and the CS omega-gradient term).
    Returns cfl_number times that bound, capped at dt_max.
    """
    if not 0 < cfl_number <= 1:
        raise FlockkitError("cfl_number must lie in (0, 1]")
    grid = state.grid
    g, u, omega = state.g, state.u, state.omega
    xi_ext = max(abs(grid.xi_min), abs(grid.xi_max))
    vx = float(np.max(np.abs(u))) + xi_ext / float(np.min(omega))
    c3 = float(np.max(np.abs(_ddx_central_periodic(u, grid.dx))))
    rho = moments_of(g, grid).rho
    if state.model == "CS":
        num = _pressure_drift_cs(g, grid, _interface_mean(omega))
        w_if = _interface_mean(omega)
        c5 = float(np.max(np.abs(w_if - np.roll(w_if, 1)) / grid.dx
                          / np.minimum(w_if, np.roll(w_if, 1)) ** 2))
    else:
        num = _pressure_drift_mt(g, grid, np.broadcast_to(omega, rho.shape))
        c5 = 0.0
    live = rho > vacuum_tol * max(float(np.max(rho)), 1e-300)
    c4 = float(np.max(np.abs(np.where(live, num / np.where(live, rho, 1.0), 0.0))))
    denom = vx / grid.dx + (c3 * xi_ext + c4 + c5 * xi_ext ** 2) / grid.dxi
    if denom <= 0:
        return dt_max
    return min(dt_max, cfl_number / denom)
