"""Exception types raised by the solvers and linear algebra kernels."""

from __future__ import annotations


class SingularMatrixError(ValueError):
    """LU factorization hit a zero pivot.

    Carries the rank reached before breakdown and the pivot rows chosen so
    far, so callers can see how far elimination got.
    """

    def __init__(self, message: str, *, rank: int, pivot_rows: tuple[int, ...]):
        super().__init__(message)
        self.rank = rank
        self.pivot_rows = pivot_rows


class SingularSystemError(ValueError):
    """The permutation-coefficient matrix is singular; no unique solution.

    ``report`` is the :class:`~tensolve.coeffmat.DegeneracyReport` describing
    which factors vanish and which coefficient combinations are unconstrained.
    """

    def __init__(self, message: str, report):
        super().__init__(message)
        self.report = report


class GammaSingularError(ValueError):
    """The 3x3 trace-coupling matrix is singular; traces cannot be eliminated."""

    def __init__(self, message: str, gamma):
        super().__init__(message)
        self.gamma = gamma


class SymmetryViolationError(ValueError):
    """Input tensor does not carry the (anti)symmetry declared for a reduced solve."""
