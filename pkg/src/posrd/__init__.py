"""Positivity-preserving solvers for ``u' = -F(u) u + g(u)`` and the 1-D BZ reaction-diffusion system."""

from .analysis import (
    Region,
    ViolationReport,
    check_region,
    convergence_order,
    first_entry_step,
    forward_euler_counterexample,
    ubar,
)
from .errors import (
    ConfigError,
    DimensionError,
    DomainError,
    NonConvergenceError,
    PosrdError,
    PreconditionError,
    StabilityError,
)
from .model import PAPER_PARAMS, BZParams, ModelSpec, bz_reaction_model, evaluate_rhs, max_norm
from .picard import ExistenceEstimate, TimeGrid, Trajectory, existence_horizon, picard_step, solve_picard
from .semi_implicit import DEConfig, de_step, solve_de
from .splitting import (
    BC,
    Grid1D,
    SplitState,
    cell_average,
    diffusion_substep,
    reaction_substep,
    run_splitting,
    stability_limit,
    unsplit_step,
)

__version__ = "0.1.0"
