"""Numerical laboratory for the financial Harry Dym equation.

Builds, validates and evolves travelling-wave (soliton) solutions of
v_t = v^3 (v_xxx - v_x) and verifies the zero-curvature structure behind it.
"""

from .core import (
    Field,
    Grid1D,
    NumericalError,
    SolitonParams,
    Trajectory,
    derivative,
    make_grid,
)
from .evolution import (
    EvolutionAborted,
    EvolveConfig,
    conservation_drift,
    conserved_functional,
    evolve,
    measure_speed,
    rhs_fhd,
    shape_error,
    shift_field,
)
from .lax import (
    LaxPair,
    LaxResidualReport,
    ReductionReport,
    build_M,
    build_N,
    reduction_check,
    zc_residual,
)
from .pseudopotential import (
    ExistenceReport,
    TurningPoints,
    eval_S,
    existence_check,
    phase_branch,
    turning_points,
)
from .profiles import (
    Profile,
    ProfileMetrics,
    decay_rate,
    profile_by_quadrature,
    profile_by_shooting,
    profile_metrics,
    translated_trajectory,
)

__all__ = [
    "Field",
    "Grid1D",
    "NumericalError",
    "SolitonParams",
    "Trajectory",
    "derivative",
    "make_grid",
    "EvolutionAborted",
    "EvolveConfig",
    "conservation_drift",
    "conserved_functional",
    "evolve",
    "measure_speed",
    "rhs_fhd",
    "shape_error",
    "shift_field",
    "LaxPair",
    "LaxResidualReport",
    "ReductionReport",
    "build_M",
    "build_N",
    "reduction_check",
    "zc_residual",
    "ExistenceReport",
    "TurningPoints",
    "eval_S",
    "existence_check",
    "phase_branch",
    "turning_points",
    "Profile",
    "ProfileMetrics",
    "decay_rate",
    "profile_by_quadrature",
    "profile_by_shooting",
    "profile_metrics",
    "translated_trajectory",
]

__version__ = "0.1.0"
