"""Linearly-implicit and half-explicit one-step integrators for index-1 DAEs.

The package bundles

* coefficient tableaus (:mod:`rowdae.tableau`) with a plain-text exchange
  format,
* a rooted-tree order-condition verifier (:mod:`rowdae.conditions`),
* the steppers and drivers (:mod:`rowdae.steppers`),
* benchmark problems with exact solutions (:mod:`rowdae.problems`),
* golden-table reproduction (:mod:`rowdae.golden`) and a CLI
  (``rowdae --help``).
"""

from .errors import (
    RowdaeError,
    DimensionMismatch,
    SingularMatrix,
    ParseError,
    ShapeError,
    InvariantError,
    SingularIterationMatrix,
    NonFiniteState,
    StepUnderflow,
    MissingDenseCoefficients,
    MissingExactSolution,
    InconsistentInitialState,
)
from .tableau import (
    RowTableau,
    tsit5da,
    linearly_implicit_euler,
    ros2,
    BUILTIN,
    check_stiffly_accurate,
    load_tableau,
    save_tableau,
)
from .conditions import (
    Condition,
    ConditionReport,
    ROW_TABLE,
    HALF_EXPLICIT_TABLE,
    row_condition_residuals,
    half_explicit_condition_residuals,
    simplifying_residuals,
    stability_function,
    r_infinity,
)
from .steppers import (
    MassMatrixProblem,
    SemiExplicitDAE,
    IntegrationStats,
    StepOutcome,
    DenseSegment,
    Trajectory,
    row_step,
    half_explicit_step,
    integrate_fixed,
    integrate_adaptive,
    interpolate,
    fd_jacobian,
    fd_time_derivative,
)
from .problems import (
    Benchmark,
    ErrorMetrics,
    BENCHMARKS,
    prob1,
    prothero_robinson,
    parabolic,
    hyperbolic,
    pendulum,
    error_metrics,
)

__version__ = "0.1.0"

__all__ = [
    "RowdaeError",
    "DimensionMismatch",
    "SingularMatrix",
    "ParseError",
    "ShapeError",
    "InvariantError",
    "SingularIterationMatrix",
    "NonFiniteState",
    "StepUnderflow",
    "MissingDenseCoefficients",
    "MissingExactSolution",
    "InconsistentInitialState",
    "RowTableau",
    "tsit5da",
    "linearly_implicit_euler",
    "ros2",
    "BUILTIN",
    "check_stiffly_accurate",
    "load_tableau",
    "save_tableau",
    "Condition",
    "ConditionReport",
    "ROW_TABLE",
    "HALF_EXPLICIT_TABLE",
    "row_condition_residuals",
    "half_explicit_condition_residuals",
    "simplifying_residuals",
    "stability_function",
    "r_infinity",
    "MassMatrixProblem",
    "SemiExplicitDAE",
    "IntegrationStats",
    "StepOutcome",
    "DenseSegment",
    "Trajectory",
    "row_step",
    "half_explicit_step",
    "integrate_fixed",
    "integrate_adaptive",
    "interpolate",
    "fd_jacobian",
    "fd_time_derivative",
    "Benchmark",
    "ErrorMetrics",
    "BENCHMARKS",
    "prob1",
    "prothero_robinson",
    "parabolic",
    "hyperbolic",
    "pendulum",
    "error_metrics",
    "__version__",
]
