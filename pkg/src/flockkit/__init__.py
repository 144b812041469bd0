"""Finite-volume solvers for kinetic flocking models (Cucker-Smale and
Motsch-Tadmor) using a velocity rescaling that keeps the distribution from
concentrating, with momentum-conservative upwind (MCU-theta) fluxes."""

from .errors import (CFLViolation, ConfigError, FlockkitError, GridError,
                     VacuumError)
from .grid import Field, MomentSet, PhaseGrid, XGrid, make_grid, moments, moments_of
from .operators import (AlignmentFields, InfluenceFunction, compute_alignment,
                        custom_influence, indicator, inverse_sqrt, kernel_matrix)
from .mcu import (DriftFluxSpec, discrete_momentum_law_check, drift_fluxes,
                  mcu_drift_flux, step_toy, upwind_drift_flux)
from .kinetic import (KineticSolver, RescaledState, rescale_initial, stable_dt,
                      step_cs, step_mt)
from .homogeneous import HomogSolution, exact_f_homog, propagate_u_homog
from .direct import DirectState, drift_field, step_direct
from .diagnostics import (DiagRecord, diagnostics, reconstruct_f,
                          support_diameters)

__version__ = "1.0.0"
