"""Solvers for the permutation-sum tensor equation, plus a direct oracle.

Every solver returns a :class:`Solution` whose residual is recomputed through
the forward map :func:`~tensolve.tensors.lhs_apply`, independently of how the
solution was obtained.  Degenerate systems raise structured errors carrying a
:class:`~tensolve.coeffmat.DegeneracyReport` instead of returning a partial
answer; the one exception is :func:`brute_force`, whose least-squares path is
explicitly tagged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import linalg
from .coeffmat import (
    DegeneracyReport,
    build_A,
    build_gamma,
    coeff_array,
    coeff_mode,
    det_factors3,
    matrix_report,
    reduce_symmetric,
)
from .exceptions import GammaSingularError, SingularSystemError, SymmetryViolationError
from .perms import canonical_order
from .tensors import (
    RATIONAL_MODE,
    Metric,
    TraceCoeffs,
    abs_max,
    check_cubical,
    lhs_apply,
    permute_tensor,
    symmetrize,
    symmetry_check,
    trace_term,
    traces3,
    zeros_like_mode,
)

#: largest supported coefficient-matrix size (n! at rank 6)
MATRIX_SIZE_CEILING = 720

#: largest flattened-operator size the brute-force oracle will assemble
ORACLE_SCALE_LIMIT = 4096


@dataclass(frozen=True)
class Solution:
    """A solved instance.

    ``inverse_first_row`` holds the reconstruction weights actually used
    (length n! for the plain/traced paths, 3 for the reduced path, ``None``
    when the oracle fell back to least squares on a degenerate system).
    ``residual_inf`` is ``max |lhs_apply(N) - B|``, always recomputed from
    scratch.  ``operator_nullity`` is set by the oracle path only;
    ``rank_exceeds_dim`` records tensors of rank above their dimension, which
    the solvers handle identically but callers may care about.
    """

    N: np.ndarray
    inverse_first_row: tuple | None
    residual_inf: object
    degeneracy: DegeneracyReport
    path: str
    operator_nullity: int | None = None
    rank_exceeds_dim: bool = False


def _checked_pair(coeffs, B, expect_rank: int | None = None):
    a, n = coeff_array(coeffs)
    if expect_rank is not None and n != expect_rank:
        raise ValueError(f"expected rank-{expect_rank} coefficients, got rank {n}")
    if math.factorial(n) > MATRIX_SIZE_CEILING:
        raise ValueError(
            f"rank {n} needs a {math.factorial(n)}x{math.factorial(n)} matrix, "
            f"above the supported ceiling of {MATRIX_SIZE_CEILING}"
        )
    B = check_cubical(B, n)
    return a, n, B


def _nonsingular_system(a, n):
    """Build A, diagnose it, and return reconstruction weights or raise."""
    A = build_A(a)
    report = matrix_report(A, sigma=det_factors3(a) if n == 3 else None)
    if report.singular:
        detail = ""
        if report.vanishing_factors:
            detail = f" (vanishing determinant factor(s): {report.vanishing_factors})"
        raise SingularSystemError(
            f"coefficient matrix is singular, no unique solution{detail}", report
        )
    return linalg.inverse_first_row(A), report


def _reconstruct(weights, B, order):
    out = weights[0] * permute_tensor(B, order[0])
    for w, p in zip(weights[1:], order[1:]):
        if w != 0:
            out = out + w * permute_tensor(B, p)
    return out


def solve_rankn(coeffs, B) -> Solution:
    """Unique solution of the rank-n equation for nonsingular coefficients.

    ``N = sum_k w_k * permute_tensor(B, order[k])`` with ``w`` the first row
    of the inverse coefficient matrix.
    """
    a, n, B = _checked_pair(coeffs, B)
    weights, report = _nonsingular_system(a, n)
    order = canonical_order(n)
    N = _reconstruct(weights, B, order)
    residual = abs_max(lhs_apply(a, N) - B)
    return Solution(
        N=N,
        inverse_first_row=tuple(weights),
        residual_inf=residual,
        degeneracy=report,
        path="plain",
        rank_exceeds_dim=n > B.shape[0],
    )


def solve_rank3(coeffs, B) -> Solution:
    """Rank-3 specialization of :func:`solve_rankn`."""
    a, n = coeff_array(coeffs)
    if n != 3:
        raise ValueError(f"solve_rank3 needs 6 coefficients, got rank {n}")
    return solve_rankn(a, B)


def solve_with_traces(coeffs, trace_coeffs: TraceCoeffs, B, metric: Metric) -> Solution:
    """Solve the rank-3 equation extended with the nine metric-trace terms.

    Eliminates the unknown's traces first: the 3x3 trace-coupling matrix
    gamma maps traces of N to traces of B, so ``traces3(N) = gamma^-1 @
    traces3(B)``; substituting back turns the equation into the plain rank-3
    one with a trace-corrected source, solved as usual.  The residual is
    checked against the original traced equation.
    """
    a, n, B = _checked_pair(coeffs, B, expect_rank=3)
    d = B.shape[0]
    if d != metric.dim:
        raise ValueError(f"tensor dimension {d} does not match metric dimension {metric.dim}")
    gamma = build_gamma(a, trace_coeffs, d)
    gamma_report = matrix_report(gamma)
    if gamma_report.singular:
        raise GammaSingularError(
            "trace-coupling matrix is singular; traces cannot be eliminated", gamma
        )
    weights, report = _nonsingular_system(a, n)
    gamma_inv = linalg.inverse(gamma)
    a7 = np.asarray(trace_coeffs.a7)
    a8 = np.asarray(trace_coeffs.a8)
    a9 = np.asarray(trace_coeffs.a9)
    b_traces = traces3(B, metric)
    B_hat = B - trace_term(b_traces, a7 @ gamma_inv, a8 @ gamma_inv, a9 @ gamma_inv, metric.g)
    N = _reconstruct(weights, B_hat, canonical_order(3))
    residual = abs_max(lhs_apply(a, N, trace_coeffs, metric) - B)
    return Solution(
        N=N,
        inverse_first_row=tuple(weights),
        residual_inf=residual,
        degeneracy=report,
        path="traced",
        rank_exceeds_dim=3 > d,
    )


def solve_reduced(coeffs, B, pair, sign: int, tol=None) -> Solution:
    """Solve for an unknown declared (anti)symmetric in a slot pair.

    Requires the source to carry the matching symmetry (checked); solves the
    folded 3x3 system over the three even-arrangement rows and reconstructs N
    with the declared symmetry imposed exactly.  The residual against the
    full equation is attached as always; it vanishes whenever the coefficient
    vector is compatible with the declared symmetry (zero
    :func:`~tensolve.coeffmat.fold_defect`).
    """
    a, n, B = _checked_pair(coeffs, B, expect_rank=3)
    if tol is None:
        tol = 0 if coeff_mode(a) == RATIONAL_MODE else 1e-8 * max(1.0, abs_max(B))
    if not symmetry_check(B, pair, sign, tol):
        raise SymmetryViolationError(
            f"source tensor is not {'' if sign == 1 else 'anti'}symmetric "
            f"in slot pair {tuple(pair)} to tolerance {tol}"
        )
    R, red = reduce_symmetric(a, pair, sign)
    report = matrix_report(R)
    if report.singular:
        raise SingularSystemError("reduced 3x3 system is singular", report)
    weights = linalg.inverse_first_row(R)
    order = canonical_order(3)
    N = _reconstruct(weights, B, [order[k] for k in red.representatives])
    N = symmetrize(N, pair, sign)
    residual = abs_max(lhs_apply(a, N) - B)
    return Solution(
        N=N,
        inverse_first_row=tuple(weights),
        residual_inf=residual,
        degeneracy=report,
        path="reduced",
        rank_exceeds_dim=3 > B.shape[0],
    )


def assemble_operator(coeffs, d: int, trace_coeffs: TraceCoeffs | None = None,
                      metric: Metric | None = None) -> np.ndarray:
    """The full d^n x d^n matrix of the forward map on flattened tensors."""
    a, n = coeff_array(coeffs)
    m = d**n
    if m > ORACLE_SCALE_LIMIT:
        raise ValueError(
            f"operator size d^n = {m} exceeds the oracle scale guard {ORACLE_SCALE_LIMIT}"
        )
    mode = coeff_mode(a)
    M = zeros_like_mode((m, m), mode)
    idx = np.indices((d,) * n).reshape(n, m).T  # row r is the multi-index of flat r
    strides = np.array([d ** (n - 1 - i) for i in range(n)])
    rows = np.arange(m)
    for c, p in zip(a, canonical_order(n)):
        if c != 0:
            cols = idx[:, list(p)] @ strides
            M[rows, cols] = M[rows, cols] + c
    if trace_coeffs is not None and not trace_coeffs.is_zero():
        if metric is None:
            raise ValueError("trace terms require a metric")
        if n != 3:
            raise ValueError("trace terms are defined for rank 3 only")
        one = Fraction(1) if mode == RATIONAL_MODE else 1.0
        for y in range(m):
            e = zeros_like_mode((d,) * n, mode)
            e[tuple(idx[y])] = one
            col = trace_term(
                traces3(e, metric), trace_coeffs.a7, trace_coeffs.a8, trace_coeffs.a9, metric.g
            ).ravel()
            M[:, y] = M[:, y] + col
    return M


def brute_force(coeffs, B, trace_coeffs: TraceCoeffs | None = None,
                metric: Metric | None = None) -> Solution:
    """Independent oracle: assemble the full linear operator and solve directly.

    On a singular operator the result is the floating least-squares
    representative together with the operator's nullity; rational inputs keep
    an exact nullity but the representative itself is floating point.
    """
    a, n, B = _checked_pair(coeffs, B)
    d = B.shape[0]
    M = assemble_operator(a, d, trace_coeffs, metric)
    A = build_A(a)
    report = matrix_report(A, sigma=det_factors3(a) if n == 3 else None)
    rhs = B.ravel()
    mode = coeff_mode(a)
    if mode == RATIONAL_MODE:
        singular = linalg.determinant(M) == 0
        op_nullity = linalg.nullspace(M)[0] if singular else 0
    else:
        op_nullity, _ = linalg.nullspace(M)
        singular = op_nullity > 0
    if not singular:
        N = linalg.lu_solve(M, rhs).reshape(B.shape)
        weights = tuple(linalg.inverse_first_row(A)) if not report.singular else None
        residual = abs_max(lhs_apply(a, N, trace_coeffs, metric) - B)
    else:
        # least-squares representative, always in floating point
        x, *_ = np.linalg.lstsq(M.astype(float), rhs.astype(float), rcond=None)
        N = x.reshape(B.shape)
        weights = None
        a_f = a.astype(float)
        B_f = B.astype(float)
        tc_f = trace_coeffs
        metric_f = metric
        if mode == RATIONAL_MODE:
            if trace_coeffs is not None:
                tc_f = TraceCoeffs(
                    tuple(float(v) for v in trace_coeffs.a7),
                    tuple(float(v) for v in trace_coeffs.a8),
                    tuple(float(v) for v in trace_coeffs.a9),
                )
            if metric is not None:
                metric_f = Metric(metric.g.astype(float))
        residual = abs_max(lhs_apply(a_f, N, tc_f, metric_f) - B_f)
    return Solution(
        N=N,
        inverse_first_row=weights,
        residual_inf=residual,
        degeneracy=report,
        path="oracle",
        operator_nullity=int(op_nullity),
        rank_exceeds_dim=n > d,
    )
