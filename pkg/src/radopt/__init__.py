"""Two-material conductor layouts minimizing the Dirichlet energy under radiation boundaries.

P1 finite elements on structured triangulations, a Newton solver for the
Stefan-Boltzmann boundary condition, adjoint sensitivities, and two design
loops: projected gradient on a volume fraction and a level-set update by
an implicit doubly nonlinear diffusion step.
"""

from .config import RunConfig, dump_config, parse_config, parse_config_text
from .errors import (
    ConfigError,
    IllPosedAdjoint,
    InfeasibleVolume,
    InternalConsistencyError,
    InvalidArgument,
    InvalidOperator,
    NoConvergence,
    RadoptError,
    ToleranceNotMet,
)
from .mesh import INSULATED, RADIATIVE, Mesh, build_rect_mesh, mark_boundary
from .state import PhysicsParams, solve_state
from .adjoint import SensitivityMode, sensitivity, solve_adjoint
from .opt_density import optimize_density, project_volume
from .opt_levelset import optimize_levelset

__version__ = "0.1.0"
