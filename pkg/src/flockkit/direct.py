"""Brute-force solver in the original (x, v) variables.

Solves  df/dt + v df/dx + d/dv (D f) = 0  where D is the nonlocal alignment
drift, on small grids only.  This is the cross-validation reference for the
rescaled method: first-order, simple, and deliberately slow (the drift can
be evaluated with the naive quadruple loop to expose its cost).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np

from .errors import CFLViolation, FlockkitError, VacuumError
from .grid import PhaseGrid
from .operators import InfluenceFunction, kernel_matrix

__all__ = ["DirectState", "drift_field", "step_direct"]

MASS_LOSS_THRESHOLD = 1e-6


@dataclass(frozen=True)
class DirectState:
    """Distribution f on an (x, v) grid with its model and influence."""

    f: np.ndarray
    t: float
    model: str
    phi: InfluenceFunction
    grid: PhaseGrid

    def mass(self) -> float:
        return self.grid.dx * self.grid.dxi * float(self.f.sum())

    def momentum(self) -> float:
        v = self.grid.xi_centers()
        return self.grid.dx * self.grid.dxi * float(self.f @ v @ np.ones(self.grid.Nx))


def drift_field(f: np.ndarray, phi: InfluenceFunction, model: str,
                grid: PhaseGrid, kernel: np.ndarray | None = None,
                naive: bool = False) -> np.ndarray:
    """Alignment drift D_ij = dx dv sum_kl phi(d_ik) (v_l - v_j) f_kl.

    MT divides by the influence-weighted mass dx dv sum_kl phi(d_ik) f_kl.
    The default path reduces the double velocity integral to precomputed
    per-x moments (cost O(Nx^2 Nv)); `naive=True` runs the literal quadruple
    loop for testing the reduction and for cost measurements.
    """
    v = grid.xi_centers()
    W = kernel if kernel is not None else kernel_matrix(phi, grid)
    dx, dv = grid.dx, grid.dxi
    if naive:
        D = np.empty_like(f)
        for i in range(grid.Nx):
            for j in range(grid.Nxi):
                acc = 0.0
                for k in range(grid.Nx):
                    w = W[i, k]
                    if w == 0.0:
                        continue
                    for l in range(grid.Nxi):
                        acc += w * (v[l] - v[j]) * f[k, l]
                D[i, j] = dx * dv * acc
    else:
        rho = dv * f.sum(axis=1)
        mom = dv * (f @ v)
        D = dx * ((W @ mom)[:, None] - np.outer(W @ rho, v))
    if model == "MT":
        rho = dv * f.sum(axis=1)
        norm = dx * (W @ rho)
        if np.any(norm <= 0):
            raise VacuumError("vacuum in influence range (MT normalization)")
        D = D / norm[:, None]
    elif model != "CS":
        raise FlockkitError(f"unknown model {model!r}")
    return D


def _transport_x(f: np.ndarray, v: np.ndarray, dx: float) -> np.ndarray:
    """Upwind x-flux divergence of v f per row (periodic)."""
    fl = np.roll(f, 1, axis=0)
    fr = np.roll(f, -1, axis=0)
    pos = v[None, :] >= 0
    F_right = np.where(pos, v * f, v * fr)     # flux at i+1/2
    F_left = np.where(pos, v * fl, v * f)      # flux at i-1/2
    return (F_right - F_left) / dx


def _drift_v(f: np.ndarray, D: np.ndarray, dv: float) -> np.ndarray:
    """Flux divergence of D f in v with zero boundary fluxes.

    Interfaces carry the centered flux (D_j f_j + D_{j+1} f_{j+1})/2 with a
    per-column Rusanov dissipation lam_i = max_j |D_ij|.  The centered part
    is antisymmetric under exchange of interacting cells and the constant
    lam telescopes, so the total momentum error reduces to the (compactly
    supported) edge cells.
    """
    lam = np.max(np.abs(D), axis=1, keepdims=True)
    Ff = D * f
    F_int = 0.5 * (Ff[:, :-1] + Ff[:, 1:]) - 0.5 * lam * (f[:, 1:] - f[:, :-1])
    z = np.zeros((f.shape[0], 1))
    F = np.concatenate([z, F_int, z], axis=1)
    return np.diff(F, axis=1) / dv


def step_direct(state: DirectState, dt: float, kernel: np.ndarray | None = None,
                naive: bool = False) -> DirectState:
    """One forward-Euler step; raises CFLViolation beyond the stability bound."""
    grid = state.grid
    v = grid.xi_centers()
    D = drift_field(state.f, state.phi, state.model, grid, kernel=kernel,
                    naive=naive)
    vmax = float(np.max(np.abs(v)))
    dmax = float(np.max(np.abs(D)))
    limit = 0.9 * min(grid.dx / vmax if vmax > 0 else np.inf,
                      grid.dxi / dmax if dmax > 0 else np.inf)
    if dt > limit:
        raise CFLViolation(f"dt = {dt:g} exceeds the stability bound {limit:g}")
    f_new = state.f - dt * (_transport_x(state.f, v, grid.dx)
                            + _drift_v(state.f, D, grid.dxi))
    edge = grid.dx * grid.dxi * float(np.abs(f_new[:, 0]).sum()
                                      + np.abs(f_new[:, -1]).sum())
    total = grid.dx * grid.dxi * float(np.abs(f_new).sum())
    if total > 0 and edge > MASS_LOSS_THRESHOLD * total:
        warnings.warn("distribution support is reaching the v-boundary; "
                      "mass is about to leak out of the box")
    return replace(state, f=f_new, t=state.t + dt)
