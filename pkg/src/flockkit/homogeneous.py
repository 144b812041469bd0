"""Analytic oracle for the transport-free (spatially homogeneous) dynamics.

When x-transport is switched off, each position decouples up to the nonlocal
alignment integrals, and the full distribution admits the closed form

    f(t, x, v) = e^{t A(x)} f0(x,  e^{t A(x)} v  +  u(0,x) - e^{t A(x)} u(t,x))

in one velocity dimension, where A(x) is the (time-independent) alignment
rate and u(t,x) solves the ODE system du/dt = B(t,x).  This module computes
u by a classical 4th-order one-step method and evaluates f pointwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import FlockkitError
from .grid import XGrid
from .operators import InfluenceFunction, compute_alignment, kernel_matrix

__all__ = ["HomogSolution", "propagate_u_homog", "exact_f_homog"]


@dataclass(frozen=True)
class HomogSolution:
    """Exact transport-free solution data: rates A(x) and the u trajectory.

    `u_traj` has shape (n_steps + 1, Nx) with rows at times k*dt; `times`
    holds those instants.
    """

    A: np.ndarray
    u_traj: np.ndarray
    times: np.ndarray
    f0: Callable | None = None
    omega0: float = 1.0

    def u_at(self, t: float) -> np.ndarray:
        """u(t, .) by linear interpolation between stored steps."""
        t0, t1 = self.times[0], self.times[-1]
        if not t0 - 1e-12 <= t <= t1 + 1e-12:
            raise FlockkitError(f"t = {t} outside the integrated range [{t0}, {t1}]")
        out = np.empty(self.u_traj.shape[1])
        for i in range(out.size):
            out[i] = np.interp(t, self.times, self.u_traj[:, i])
        return out


def propagate_u_homog(u0: np.ndarray, rho: np.ndarray, phi: InfluenceFunction,
                      model: str, grid: XGrid, t_end: float, dt: float
                      ) -> HomogSolution:
    """Integrate du/dt = B(u) with frozen density rho by RK4.

    The alignment operators are evaluated with the same quadrature as the
    solvers (consistency over accuracy), so A is computed once (it does not
    depend on u) and B is re-evaluated at every stage.
    """
    if dt <= 0 or t_end < 0:
        raise FlockkitError("need dt > 0 and t_end >= 0")
    kernel = kernel_matrix(phi, grid)
    A = compute_alignment(model, phi, rho, u0, grid, kernel=kernel).A

    def Bdot(u):
        return compute_alignment(model, phi, rho, u, grid, kernel=kernel).B

    n = max(1, int(round(t_end / dt)))
    h = t_end / n if t_end > 0 else dt
    traj = np.empty((n + 1, u0.size))
    traj[0] = u0
    u = np.asarray(u0, dtype=float).copy()
    for k in range(n):
        k1 = Bdot(u)
        k2 = Bdot(u + 0.5 * h * k1)
        k3 = Bdot(u + 0.5 * h * k2)
        k4 = Bdot(u + h * k3)
        u = u + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        traj[k + 1] = u
    times = np.linspace(0.0, t_end, n + 1) if t_end > 0 else np.array([0.0, dt])
    if t_end == 0:
        traj = np.vstack([traj, traj[-1]])
    return HomogSolution(A=A, u_traj=traj, times=times)


def exact_f_homog(f0: Callable, A, u0, u_t, t: float, x, v) -> np.ndarray:
    """Evaluate the closed-form transport-free solution at time t.

    `x` and `v` are scalars or arrays (broadcastable against each other);
    `A`, `u0` and `u_t` are the alignment rate and the velocity fields at
    times 0 and t, aligned with `x`.  `f0(x, v)` is the initial sampler.
    """
    e = np.exp(t * np.asarray(A, dtype=float))
    arg = e * np.asarray(v, dtype=float) + np.asarray(u0) - e * np.asarray(u_t)
    return e * np.asarray(f0(x, arg), dtype=float)
