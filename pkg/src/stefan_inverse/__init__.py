"""Inverse Stefan problem solver: adjoint-based reconstruction of the free
boundary s(t) and the left-boundary heat flux g(t) of a one-phase parabolic
free boundary problem from final-time and phase-front temperature data.
"""

from .exceptions import (
    ConstraintViolationError,
    DegenerateBoundaryError,
    GridMismatchError,
    InvalidConfigError,
    MissingMeasurementsError,
    OutOfRangeError,
    SingularSystemError,
    StefanInverseError,
)
from .grid import GridConfig, SpaceGrid, TimeGrid, build_space_grid, build_time_grid, interp_linear
from .models import (
    BenchmarkModel,
    Measurements,
    NoiseSpec,
    add_noise,
    get_model,
    model1,
    model2,
    model3,
    piecewise_guess,
    regular_guess,
    synthesize_measurements,
)
from .forward import StateField, extend_reflect, solve_forward, steklov_average
from .adjoint import AdjointField, solve_adjoint
from .functional import Control, CostBreakdown, RawGradient, boundary_trace, evaluate_cost, gradient_L2
from .precond import H1Gradient, smooth_gradient
from .optimize import DescentConfig, OptimizationTrace, convex_comb_guess, descend, line_search, project
from .verify import KappaRecord, fd_gradient, kappa, kappa_sweep

__version__ = "0.1.0"
