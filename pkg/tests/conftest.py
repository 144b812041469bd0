"""Shared fixtures and helpers for the flockkit test suite."""

import numpy as np
import pytest

from flockkit import RescaledState, indicator, make_grid


@pytest.fixture
def rng():
    return np.random.default_rng(20260826)


@pytest.fixture
def small_grid():
    """A modest periodic phase grid with a velocity center at zero."""
    return make_grid(12, 33, -0.5, 0.5, -4.0, 4.0)


def random_compact_state(grid, rng, model="MT", phi=None, pad=4,
                         symmetrize=True):
    """Random nonnegative state with compact velocity support.

    With `symmetrize=True` the velocity profile in each cell is made even
    in xi, so the per-cell momentum vanishes exactly (pairwise cancellation
    on the symmetric grid).  `pad` cells at each xi end are zeroed so the
    data is compactly supported away from the velocity boundaries.

    The scaling factor is spatially uniform for the model with normalized
    alignment (it evolves a single global factor) and an arbitrary positive
    field for the unnormalized model.
    """
    g = rng.random((grid.Nx, grid.Nxi))
    g[:, :pad] = 0.0
    g[:, -pad:] = 0.0
    if symmetrize:
        g = 0.5 * (g + g[:, ::-1])
    u = rng.normal(0.0, 1.0, grid.Nx)
    if model == "MT":
        omega = np.full(grid.Nx, float(np.exp(rng.normal(0.0, 0.5))))
    else:
        omega = np.exp(rng.normal(0.0, 0.5, grid.Nx))
    if phi is None:
        phi = indicator(0.25)
    return RescaledState(g=g, u=u, omega=omega, t=0.0, model=model,
                         grid=grid, phi=phi)
