"""Influence functions and the nonlocal alignment fields A(t,x), B(t,x).

Both flocking models share the same Cucker-Smale building blocks:

    A_CS,i = dx * sum_j phi(d(x_i, x_j)) rho_j
    B_CS,i = dx * sum_j phi(d(x_i, x_j)) (u_j - u_i) rho_j

The Motsch-Tadmor fields are A_MT = 1 and B_MT = B_CS / A_CS.  Distances on
a periodic domain use the minimal image on the torus.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import FlockkitError, VacuumError
from .grid import PhaseGrid, XGrid

__all__ = [
    "InfluenceFunction",
    "AlignmentFields",
    "indicator",
    "inverse_sqrt",
    "custom_influence",
    "influence_eval",
    "torus_distance",
    "distance_matrix",
    "kernel_matrix",
    "compute_alignment",
]

MODELS = ("CS", "MT")


@dataclass(frozen=True)
class InfluenceFunction:
    """Nonnegative kernel weighting pairwise alignment by distance."""

    kind: str  # "indicator" | "inverse_sqrt" | "custom"
    radius: float = 0.0
    func: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __call__(self, r):
        return influence_eval(self, r)


def indicator(radius: float) -> InfluenceFunction:
    """phi(r) = 1 if |r| <= radius else 0 (a local influence)."""
    if radius <= 0:
        raise FlockkitError("indicator radius must be positive")
    return InfluenceFunction(kind="indicator", radius=float(radius))


def inverse_sqrt() -> InfluenceFunction:
    """phi(r) = (1 + r)^(-1/2) (a global, everywhere positive influence)."""
    return InfluenceFunction(kind="inverse_sqrt")


def custom_influence(func: Callable[[np.ndarray], np.ndarray]) -> InfluenceFunction:
    return InfluenceFunction(kind="custom", func=func)


def influence_eval(phi: InfluenceFunction, r):
    """Evaluate phi at nonnegative distances (scalar or array)."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise FlockkitError("influence functions take nonnegative distances")
    if phi.kind == "indicator":
        out = np.where(r <= phi.radius, 1.0, 0.0)
    elif phi.kind == "inverse_sqrt":
        out = (1.0 + r) ** -0.5
    elif phi.kind == "custom":
        out = np.asarray(phi.func(r), dtype=float)
        if np.any(out < 0):
            raise FlockkitError("custom influence returned negative weights")
    else:
        raise FlockkitError(f"unknown influence kind {phi.kind!r}")
    return out if out.ndim else float(out)


def torus_distance(x_i, x_j, grid) -> np.ndarray:
    """Distance respecting the grid's boundary kind.

    Periodic: minimal image min_k |x_i - x_j + k*Lx|, k in {-1, 0, 1}.
    Outflow: plain |x_i - x_j|.
    """
    xg = grid.xgrid if isinstance(grid, PhaseGrid) else grid
    d = np.abs(np.asarray(x_i, dtype=float) - np.asarray(x_j, dtype=float))
    if xg.bc == "periodic":
        L = xg.length
        d = np.minimum(d, np.abs(d - L))
    return d


def distance_matrix(grid) -> np.ndarray:
    xg = grid.xgrid if isinstance(grid, PhaseGrid) else grid
    x = xg.centers()
    return torus_distance(x[:, None], x[None, :], xg)


def kernel_matrix(phi: InfluenceFunction, grid) -> np.ndarray:
    """phi evaluated on all pairwise grid distances, shape (Nx, Nx)."""
    return influence_eval(phi, distance_matrix(grid))


@dataclass(frozen=True)
class AlignmentFields:
    """Per-x-cell scaling rate A and alignment acceleration B."""

    A: np.ndarray
    B: np.ndarray
    model: str


def compute_alignment(model, phi, rho, u, grid, kernel=None) -> AlignmentFields:
    """Alignment fields by the first-order quadrature on the x-grid.

    `kernel` may carry a precomputed phi-distance matrix (it only depends on
    the grid and phi, both static over a run).
    """
    if model not in MODELS:
        raise FlockkitError(f"unknown model {model!r}")
    rho = np.asarray(rho, dtype=float)
    u = np.asarray(u, dtype=float)
    if np.any(rho < 0):
        raise FlockkitError("negative density in alignment quadrature")
    xg = grid.xgrid if isinstance(grid, PhaseGrid) else grid
    W = kernel_matrix(phi, xg) if kernel is None else kernel
    dx = xg.dx
    A_cs = dx * (W @ rho)
    B_cs = dx * (W @ (u * rho)) - u * A_cs
    if model == "CS":
        return AlignmentFields(A=A_cs, B=B_cs, model="CS")
    if np.any(A_cs <= 0.0):
        raise VacuumError(
            "vacuum in influence range: the Motsch-Tadmor normalization "
            "requires sum_j phi(d_ij) rho_j > 0 for every cell"
        )
    return AlignmentFields(A=np.ones_like(A_cs), B=B_cs / A_cs, model="MT")
