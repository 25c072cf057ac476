"""Exception types shared across the package."""


class RowdaeError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(RowdaeError):
    """Operands have incompatible shapes."""


class SingularMatrix(RowdaeError):
    """Matrix is singular to working precision."""


class ParseError(RowdaeError):
    """Tableau file is syntactically malformed."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ShapeError(RowdaeError):
    """Tableau block has the wrong number of rows or entries."""


class InvariantError(RowdaeError):
    """Tableau coefficients violate a structural requirement."""


class SingularIterationMatrix(RowdaeError):
    """The per-step linear system could not be factorized."""


class NonFiniteState(RowdaeError):
    """A stage or solution value became NaN or infinite."""


class StepUnderflow(RowdaeError):
    """Adaptive step size shrank below the representable minimum."""


class MissingDenseCoefficients(RowdaeError):
    """Tableau carries no continuous-extension coefficients."""


class MissingExactSolution(RowdaeError):
    """Benchmark problem has no reference solution for this metric."""


class InconsistentInitialState(RowdaeError):
    """Initial values do not satisfy the algebraic constraints."""
