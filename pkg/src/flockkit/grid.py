"""Phase-space meshes, cell-averaged fields and discrete moments.

Grids are uniform and cell-centered in both the position variable x and the
(rescaled) velocity variable xi.  The xi-grid always carries a cell center
exactly at xi = 0; every sign-split flux in this package relies on it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GridError

__all__ = ["XGrid", "PhaseGrid", "Field", "MomentSet", "make_grid", "moments"]


@dataclass(frozen=True)
class XGrid:
    """Uniform 1D mesh in the position variable."""

    Nx: int
    x_min: float
    x_max: float
    bc: str  # "periodic" | "outflow"

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.Nx

    @property
    def length(self) -> float:
        return self.x_max - self.x_min

    def centers(self) -> np.ndarray:
        return self.x_min + (np.arange(self.Nx) + 0.5) * self.dx


@dataclass(frozen=True)
class PhaseGrid:
    """Uniform 1D x 1D phase-space mesh with a velocity cell center at 0.

    `J` is the index of the xi-cell whose center is exactly 0; the centers
    returned by :meth:`xi_centers` are built as (j - J) * dxi so that
    xi[J] == 0.0 holds bitwise.
    """

    Nx: int
    Nxi: int
    x_min: float
    x_max: float
    xi_min: float
    xi_max: float
    J: int
    bc_x: str

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.Nx

    @property
    def dxi(self) -> float:
        return (self.xi_max - self.xi_min) / self.Nxi

    @property
    def Lx(self) -> float:
        return self.x_max - self.x_min

    @property
    def xgrid(self) -> XGrid:
        return XGrid(self.Nx, self.x_min, self.x_max, self.bc_x)

    def x_centers(self) -> np.ndarray:
        return self.x_min + (np.arange(self.Nx) + 0.5) * self.dx

    def xi_centers(self) -> np.ndarray:
        return (np.arange(self.Nxi) - self.J) * self.dxi


@dataclass(frozen=True)
class Field:
    """Cell-averaged distribution on a PhaseGrid, shape (Nx, Nxi)."""

    grid: PhaseGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.grid.Nx, self.grid.Nxi):
            raise GridError(
                f"field shape {v.shape} does not match grid "
                f"({self.grid.Nx}, {self.grid.Nxi})"
            )
        if not np.all(np.isfinite(v)):
            raise GridError("field contains non-finite values")
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class MomentSet:
    """Per-x-cell density, momentum and second moment ("pressure")."""

    rho: np.ndarray
    M: np.ndarray
    P: np.ndarray


def make_grid(Nx, Nxi, x_min, x_max, xi_min, xi_max, bc_x="periodic") -> PhaseGrid:
    """Build a phase grid, requiring a velocity cell center exactly at 0.

    The caller must supply xi bounds and Nxi such that a cell center falls
    on 0 (up to rounding); the bounds are never adjusted silently.
    """
    if Nx < 3 or Nxi < 3:
        raise GridError("Nx and Nxi must both be >= 3")
    if not (x_min < x_max and xi_min < xi_max):
        raise GridError("grid bounds must be ordered")
    if not (xi_min < 0.0 < xi_max):
        raise GridError("xi bounds must straddle 0")
    if bc_x not in ("periodic", "outflow"):
        raise GridError(f"unknown x boundary kind {bc_x!r}")

    dxi = (xi_max - xi_min) / Nxi
    centers = xi_min + (np.arange(Nxi) + 0.5) * dxi
    J = int(np.argmin(np.abs(centers)))
    scale = max(abs(xi_min), abs(xi_max))
    if abs(centers[J]) > 4.0 * np.finfo(float).eps * scale:
        raise GridError(
            "no xi-cell center falls on 0 for these bounds: the offset of the "
            f"closest center is {centers[J]:.3e}. Choose Nxi and xi bounds such "
            "that (xi_min + (j + 1/2) * dxi) == 0 for some integer j, e.g. "
            "symmetric bounds with an odd Nxi."
        )
    return PhaseGrid(Nx, Nxi, float(x_min), float(x_max),
                     float(xi_min), float(xi_max), J, bc_x)


def _folded_order(Nxi: int, J: int) -> np.ndarray:
    """Summation order J, J+1, J-1, J+2, J-2, ...

    Adjacent symmetric pairs cancel exactly in floating point for fields even
    in xi, which keeps the discrete momentum of even data at exactly 0.
    """
    order = [J]
    for k in range(1, max(Nxi - J, J + 1)):
        if J + k < Nxi:
            order.append(J + k)
        if J - k >= 0:
            order.append(J - k)
    return np.asarray(order)


def _ordered_sum(a: np.ndarray) -> np.ndarray:
    # strictly sequential along the last axis (cumsum is not pairwise)
    return np.cumsum(a, axis=-1)[..., -1]


def moments(field: Field) -> MomentSet:
    """Zeroth, first and second xi-moments by the first-order quadrature.

    rho_i = dxi * sum_j g_ij, M_i = dxi * sum_j xi_j g_ij,
    P_i = dxi * sum_j xi_j^2 g_ij.  Summation order is fixed for bitwise
    reproducibility; the momentum sum is folded around xi = 0 so that even
    fields have M_i == 0 exactly.
    """
    g = field.values
    grid = field.grid
    return moments_of(g, grid)


def moments_of(g: np.ndarray, grid: PhaseGrid) -> MomentSet:
    """Moments of a bare value array on `grid` (fast path used by solvers)."""
    g = np.asarray(g, dtype=float)
    if not np.all(np.isfinite(g)):
        raise GridError("non-finite input to moments")
    xi = grid.xi_centers()
    dxi = grid.dxi
    rho = dxi * _ordered_sum(g)
    order = _folded_order(grid.Nxi, grid.J)
    M = dxi * _ordered_sum((g * xi)[..., order])
    P = dxi * _ordered_sum(g * xi**2)
    return MomentSet(rho=rho, M=M, P=P)
