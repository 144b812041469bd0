"""Reconstruction of f from the rescaled state and time-series diagnostics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import FlockkitError
from .grid import PhaseGrid, moments_of

__all__ = ["DiagRecord", "reconstruct_f", "support_diameters", "diagnostics",
           "default_v_grid"]

SUPPORT_THRESHOLD = 1e-4


@dataclass(frozen=True)
class DiagRecord:
    """One row of the diagnostics time series."""

    t: float
    mass: float
    max_f: float
    max_g: float
    momentum_residual: float
    S: float  # position-support diameter
    V: float  # velocity-support diameter


def default_v_grid(state) -> np.ndarray:
    """Velocity sample points covering the reachable v-range of a state.

    v = u + xi/omega, so the range [u_min - |xi|_max/omega_min,
    u_max + |xi|_max/omega_min] with Nxi points covers the support.
    """
    grid = state.grid
    xi_ext = max(abs(grid.xi_min), abs(grid.xi_max))
    w = xi_ext / float(np.min(state.omega))
    return np.linspace(float(np.min(state.u)) - w, float(np.max(state.u)) + w,
                       grid.Nxi)


def reconstruct_f(g: np.ndarray, u: np.ndarray, omega: np.ndarray,
                  grid: PhaseGrid, v_grid: np.ndarray) -> np.ndarray:
    """Map the rescaled distribution back to physical velocities.

    f(x_i, v_m) = omega_i * g(x_i, omega_i (v_m - u_i)), with linear
    interpolation between xi-cell centers and zero outside the xi-box.
    """
    if np.any(omega <= 0):
        raise FlockkitError("omega must be strictly positive")
    xi = grid.xi_centers()
    f = np.empty((grid.Nx, v_grid.size))
    for i in range(grid.Nx):
        target = omega[i] * (v_grid - u[i])
        f[i] = omega[i] * np.interp(target, xi, g[i], left=0.0, right=0.0)
    return f


def _extent(mask_1d: np.ndarray, h: float, periodic: bool) -> float:
    """Diameter of the marked cells: center-to-center span of the support.

    On a periodic axis the diameter is the total length minus the largest
    run of unmarked cells (complement gap), so a support wrapping the seam
    is measured correctly.
    """
    idx = np.flatnonzero(mask_1d)
    if idx.size == 0:
        return 0.0
    if not periodic:
        return float((idx[-1] - idx[0]) * h)
    n = mask_1d.size
    if idx.size == n:
        return float((n - 1) * h)
    # largest circular run of unmarked cells
    gaps = np.diff(idx)
    wrap_gap = idx[0] + n - idx[-1]
    biggest = max(int(gaps.max(initial=0)), int(wrap_gap))
    return float((n - biggest) * h)


def support_diameters(f: np.ndarray, grid: PhaseGrid,
                      threshold_frac: float = SUPPORT_THRESHOLD,
                      dv: float | None = None) -> tuple[float, float]:
    """(S, V): max extents of {f >= threshold_frac * max f} in x and v."""
    if not 0 < threshold_frac < 1:
        raise FlockkitError("threshold_frac must lie in (0, 1)")
    fmax = float(np.max(f))
    if fmax <= 0:
        return 0.0, 0.0
    mask = f >= threshold_frac * fmax
    S = _extent(mask.any(axis=1), grid.dx, grid.bc_x == "periodic")
    V = _extent(mask.any(axis=0), dv if dv is not None else grid.dxi, False)
    return S, V


def diagnostics(state, v_grid: np.ndarray | None = None) -> DiagRecord:
    """Assemble one DiagRecord from a rescaled or a direct state."""
    grid = state.grid
    if hasattr(state, "omega"):  # rescaled
        g = state.g
        if v_grid is None:
            v_grid = default_v_grid(state)
        f = reconstruct_f(g, state.u, state.omega, grid, v_grid)
        dv = float(v_grid[1] - v_grid[0]) if v_grid.size > 1 else grid.dxi
        mom = moments_of(g, grid)
        residual = float(np.max(np.abs(mom.M)))
        mass = grid.dx * grid.dxi * float(g.sum())
        max_g = float(np.max(g))
    else:  # direct state: f lives on the grid itself
        f = state.f
        dv = grid.dxi
        mom = moments_of(f, grid)
        residual = float(np.max(np.abs(mom.M)))
        mass = grid.dx * grid.dxi * float(f.sum())
        max_g = float(np.max(f))
    S, V = support_diameters(f, grid, dv=dv)
    return DiagRecord(t=float(state.t), mass=mass, max_f=float(np.max(f)),
                      max_g=max_g, momentum_residual=residual, S=S, V=V)
