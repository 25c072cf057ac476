"""Dense LU factorization with an explicit singularity report.

Thin wrapper around LAPACK's partial-pivoting LU (via scipy) that adds the
singularity test the steppers rely on: a factorization is rejected when any
pivot is smaller than ``1e-14 * max|A|``.  Keeping this in one place means
every iteration matrix in the package goes through the same check.
"""

from __future__ import annotations

import warnings

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch, SingularMatrix

__all__ = ["LUFactors", "lu_factor", "lu_solve", "invert"]

#: relative pivot threshold below which a matrix is declared singular
PIVOT_RTOL = 1e-14


class LUFactors:
    """Opaque handle returned by :func:`lu_factor`, consumed by :func:`lu_solve`."""

    __slots__ = ("lu", "piv", "n")

    def __init__(self, lu, piv):
        self.lu = lu
        self.piv = piv
        self.n = lu.shape[0]

    def solve(self, rhs):
        # hot path for the steppers: no shape validation (rhs comes from
        # matching-dimension arithmetic there); external callers should use
        # module-level lu_solve
        return scipy.linalg.lu_solve((self.lu, self.piv), rhs, check_finite=False)


def lu_factor(a):
    """Factor a square matrix as P A = L U with partial pivoting.

    Raises
    ------
    DimensionMismatch
        if ``a`` is not square.
    SingularMatrix
        if any pivot of U falls below ``1e-14 * max|A|`` (for the zero
        matrix the threshold degenerates to an absolute one).
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"expected square matrix, got shape {a.shape}")
    scale = np.max(np.abs(a)) if a.size else 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(a, check_finite=False)
    pivots = np.abs(np.diag(lu))
    if a.size and (not np.all(np.isfinite(lu)) or np.min(pivots) <= PIVOT_RTOL * max(scale, 1e-300)):
        raise SingularMatrix(
            f"pivot {np.min(pivots):.3e} below threshold {PIVOT_RTOL * scale:.3e}"
        )
    return LUFactors(lu, piv)


def lu_solve(factors, rhs):
    """Solve ``A x = rhs`` given the factorization of A.

    ``rhs`` may be a vector or a matrix of stacked right-hand-side columns.
    """
    rhs = np.asarray(rhs, dtype=float)
    if rhs.shape[0] != factors.n:
        raise DimensionMismatch(
            f"rhs has leading dimension {rhs.shape[0]}, expected {factors.n}"
        )
    return factors.solve(rhs)


def invert(a):
    """Inverse of a square matrix via its LU factorization."""
    factors = lu_factor(a)
    return lu_solve(factors, np.eye(factors.n))
