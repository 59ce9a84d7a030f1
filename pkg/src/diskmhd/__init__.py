"""Exact spectral calculus and ill-posedness experiments for the rotating
magnetized column on the unit disk."""

from .field import (
    BoundaryTrace,
    DegreeCapError,
    MonomialField,
    boundary_trace,
    compose,
    compose_rotation,
    divergence,
    grad,
    jacobian,
    l2_inner,
    l2_norm,
    laplacian,
    trace_of_square,
)
from .operators import (
    ConjugatedOperator,
    advect,
    commutator_residual,
    dirichlet_inverse,
    harmonic_projection,
    neumann_harmonic,
)
from .steady import (
    SteadyState,
    frozen_flux,
    steady_residual,
    steady_state,
    taylor_sign,
)
from .linear import (
    LinState,
    ModeSolution,
    closed_form_residual,
    integrate_linearized,
    integrate_mode,
    linearized_rhs,
    mode_closed_form,
)
from .decomp import (
    DecompState,
    EnergyReport,
    HarmonicGradient,
    a_power,
    decompose,
    energies,
    integrate_decomposed,
    invariant_check,
    sobolev_norm,
    sobolev_norm_field,
)
from .experiments import (
    ScanConfig,
    ScanRow,
    growth_scan,
    illposedness_table,
    initial_energy,
)

__all__ = [name for name in dir() if not name.startswith("_")]
