"""Permutation-coefficient matrices and their degeneracy structure.

Given coefficients ``a`` indexed by the canonical enumeration of S_n, the
equation ``sum_k a_k N[order[k] . x] = B[x]`` relabels (substitute
``order[r] . x`` for ``x``) into an n! x n! linear system

    A[r][c] = a[invert(order[r]) . order[c]]

whose row 0 is ``a`` itself.  Equivalently ``A = sum_k a_k R(order[k])`` for
the regular representation ``R``, so ``A(a) @ A(b) = A(a * b)`` with ``*``
the group-algebra convolution.  This constructed matrix is the normative
object; it is validated by substitution rather than copied from anywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import linalg
from .perms import compose, identity, perm_table
from .tensors import (
    FLOAT_MODE,
    RATIONAL_MODE,
    Metric,
    TraceCoeffs,
    lhs_apply,
    traces3,
)


def rank_of_coeff_count(m: int) -> int:
    """The n with n! == m, or raise."""
    n, f = 1, 1
    while f < m:
        n += 1
        f *= n
    if f != m:
        raise ValueError(f"coefficient count {m} is not a factorial")
    return n


def coeff_array(coeffs) -> tuple[np.ndarray, int]:
    """Normalize a coefficient sequence to a 1-D array plus its rank."""
    a = np.asarray(list(coeffs) if not isinstance(coeffs, np.ndarray) else coeffs)
    if a.ndim != 1:
        raise ValueError(f"coefficients must be one-dimensional, got shape {a.shape}")
    return a, rank_of_coeff_count(a.shape[0])


def coeff_mode(a: np.ndarray) -> str:
    return RATIONAL_MODE if a.dtype == object else FLOAT_MODE


def build_A(coeffs) -> np.ndarray:
    """The n! x n! matrix A[r][c] = a[inverse(order[r]) . order[c]]."""
    a, n = coeff_array(coeffs)
    table = perm_table(n)
    m = len(table)
    A = np.empty((m, m), dtype=a.dtype if a.dtype == object else float)
    for r in range(m):
        rinv = table.inverse_index[r]
        row = table.compose_index[rinv]
        for c in range(m):
            A[r, c] = a[row[c]]
    return A


def det_factors3(coeffs):
    """The rank-3 determinant factors (s1, s2, s3) with det(A) = s1*s2*s3^2.

    s1 sums all six coefficients, s2 weights them by permutation parity, and
    s3 is the quadratic form of the two-dimensional sector.
    """
    a, n = coeff_array(coeffs)
    if n != 3:
        raise ValueError(f"determinant factors are defined for rank 3 only, got rank {n}")
    s1 = a[0] + a[1] + a[2] + a[3] + a[4] + a[5]
    s2 = a[0] + a[1] + a[2] - a[3] - a[4] - a[5]
    s3 = (
        sum(a[i] * a[i] - a[i + 3] * a[i + 3] for i in range(3))
        - sum(a[i] * a[j] - a[i + 3] * a[j + 3] for i in range(3) for j in range(i + 1, 3))
    )
    return s1, s2, s3


# Global sign in det(A) = DET_SIGN * s1 * s2 * s3^2 at rank 3, fixed once by
# the exact-arithmetic oracle (see tests) and asserted there ever since.
DET_SIGN = 1


@dataclass(frozen=True)
class DegeneracyReport:
    """Diagnosis of the coefficient matrix.

    ``sigma`` and ``vanishing_factors`` (1-based factor numbers with value 0)
    are present at rank 3 only.  ``null_basis`` rows span ker(A): the
    coefficient combinations of permuted unknowns the equation does not
    constrain.  In rational mode every field is exact; in floating mode
    singularity means the smallest singular value is at most
    ``1e-12 * max(1, ||A||_inf)`` (equivalently |det| below roughly
    ``1e-12 * ||A||_inf^m``).
    """

    size: int
    det: object
    singular: bool
    nullity: int
    null_basis: tuple
    sigma: tuple | None = None
    vanishing_factors: tuple = ()

    def to_json_obj(self, scalar=lambda v: v) -> dict:
        obj = {
            "size": self.size,
            "det": scalar(self.det),
            "singular": self.singular,
            "nullity": self.nullity,
            "null_basis": [[scalar(v) for v in row] for row in self.null_basis],
        }
        if self.sigma is not None:
            obj["sigma"] = [scalar(v) for v in self.sigma]
            obj["vanishing_factors"] = list(self.vanishing_factors)
        return obj


def matrix_report(M: np.ndarray, sigma=None) -> DegeneracyReport:
    """Degeneracy report for an arbitrary square matrix.

    Rational mode decides singularity exactly; floating mode flags it when a
    singular value falls below ``1e-12 * max(1, ||M||_inf)`` or the
    determinant below ``1e-12 * ||M||_inf^m``.
    """
    m = M.shape[0]
    det = linalg.determinant(M)
    if coeff_mode(M) == RATIONAL_MODE and det != 0:
        nullity, basis = 0, ()  # exact nonzero determinant settles it
    else:
        nullity, basis = linalg.nullspace(M)
        if coeff_mode(M) == FLOAT_MODE and nullity == 0:
            norm = float(np.max(np.sum(np.abs(M), axis=1)))
            if abs(det) <= 1e-12 * norm**m:
                _, s, vt = np.linalg.svd(M)
                nullity, basis = 1, vt[-1:]
    singular = nullity > 0
    vanishing = ()
    if sigma is not None:
        vanishing = tuple(i + 1 for i, s in enumerate(sigma) if s == 0)
    return DegeneracyReport(
        size=m,
        det=det,
        singular=singular,
        nullity=nullity,
        null_basis=tuple(tuple(row) for row in basis),
        sigma=tuple(sigma) if sigma is not None else None,
        vanishing_factors=vanishing,
    )


def degeneracy_report(coeffs) -> DegeneracyReport:
    """Build A, compute its determinant, and diagnose any degeneracy."""
    a, n = coeff_array(coeffs)
    A = build_A(a)
    sigma = det_factors3(a) if n == 3 else None
    return matrix_report(A, sigma=sigma)


@dataclass(frozen=True)
class SymmetryReduction:
    """How the six rank-3 arrangement classes fold under a pair symmetry.

    ``representatives`` are the canonical indices of the kept classes (the
    three even arrangements); ``partner[k]`` is the arrangement ``order[k]``
    composed with the slot transposition; ``class_of[k]`` maps every
    arrangement to its reduced class and ``fold_sign[k]`` is the factor
    relating it to the class representative.
    """

    pair: tuple[int, int]
    sign: int
    representatives: tuple[int, int, int]
    partner: tuple[int, ...]
    class_of: tuple[int, ...]
    fold_sign: tuple[int, ...]


def _slot_transposition(pair, sign):
    i, j = pair
    if i == j or not {i, j} <= {0, 1, 2}:
        raise ValueError(f"slot pair must be two distinct slots among (0, 1, 2), got {pair}")
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    t = list(identity(3))
    t[i], t[j] = t[j], t[i]
    return tuple(t)


def symmetry_reduction(pair, sign: int) -> SymmetryReduction:
    t = _slot_transposition(pair, sign)
    table = perm_table(3)
    partner = tuple(table.index[compose(p, t)] for p in table.order)
    reps = (0, 1, 2)
    class_of = [0] * 6
    fold_sign = [1] * 6
    for r, k in enumerate(reps):
        class_of[k] = r
        class_of[partner[k]] = r
        fold_sign[partner[k]] = sign
    return SymmetryReduction(
        pair=tuple(pair),
        sign=sign,
        representatives=reps,
        partner=partner,
        class_of=tuple(class_of),
        fold_sign=tuple(fold_sign),
    )


def reduce_symmetric(coeffs, pair, sign: int):
    """Fold the 6x6 matrix to 3x3 for an unknown (anti)symmetric in a slot pair.

    Columns whose arrangements differ by the slot transposition carry equal
    unknowns (up to ``sign``) and are summed; the rows kept are the three even
    arrangements, matching right sides B, B[order[1].x], B[order[2].x].
    Returns ``(reduced_matrix, SymmetryReduction)``.
    """
    a, n = coeff_array(coeffs)
    if n != 3:
        raise ValueError(f"symmetry reduction is defined for rank 3 only, got rank {n}")
    red = symmetry_reduction(pair, sign)
    A = build_A(a)
    R = np.empty((3, 3), dtype=A.dtype)
    for r, row in enumerate(red.representatives):
        for c, col in enumerate(red.representatives):
            R[r, c] = A[row, col] + sign * A[row, red.partner[col]]
    return R, red


def fold_defect(coeffs, pair, sign: int) -> np.ndarray:
    """How far the forward map is from preserving the declared pair symmetry.

    Zero defect means the permutation-sum operator maps (anti)symmetric
    tensors to (anti)symmetric ones, which is exactly when the reduced 3x3
    solve agrees with the full 6x6 solve.  Linear in the coefficients.
    """
    a, n = coeff_array(coeffs)
    if n != 3:
        raise ValueError(f"fold defect is defined for rank 3 only, got rank {n}")
    t = _slot_transposition(pair, sign)
    table = perm_table(3)
    out = []
    for k in (0, 1, 2):
        tau = table.order[k]
        t_tau = compose(t, tau)
        out.append(
            a[table.index[t_tau]]
            + sign * a[table.index[compose(t_tau, t)]]
            - sign * a[k]
            - a[table.index[compose(tau, t)]]
        )
    return np.asarray(out)


def _ones_vector(d: int, mode: str) -> np.ndarray:
    if mode == RATIONAL_MODE:
        return np.full(d, Fraction(1), dtype=object)
    return np.ones(d)


def build_gamma(coeffs, trace_coeffs: TraceCoeffs, dim: int) -> np.ndarray:
    """The 3x3 matrix relating traces of the forward map to traces of N.

    Defined by ``traces3(lhs_apply(N)) == gamma @ traces3(N)`` for every
    rank-3 N and every metric; it depends on the 15 coefficients and the
    dimension only.  Computed by probing with the three tensors ``g (x) w``
    placed on each slot pair: their trace triples form
    ``[[d,1,1],[1,d,1],[1,1,d]]`` (invertible for d >= 2), from which gamma
    follows by a 3x3 solve.  Exact in rational mode.
    """
    a, n = coeff_array(coeffs)
    if n != 3:
        raise ValueError(f"gamma is defined for rank 3 only, got rank {n}")
    if dim < 2:
        raise ValueError(f"dimension must be >= 2 (probe matrix is singular at d={dim})")
    mode = coeff_mode(a)
    metric = Metric.euclidean(dim, mode)
    g = metric.g
    w = _ones_vector(dim, mode)
    probes = (
        np.einsum("ab,c->abc", g, w),
        np.einsum("ac,b->abc", g, w),
        np.einsum("bc,a->abc", g, w),
    )
    one = Fraction(1) if mode == RATIONAL_MODE else 1.0
    P = np.full((3, 3), one, dtype=g.dtype)
    for i in range(3):
        P[i, i] = one * dim
    C = np.empty((3, 3), dtype=g.dtype)
    denom = w @ w
    for k, probe in enumerate(probes):
        y = traces3(lhs_apply(a, probe, trace_coeffs, metric), metric)
        for i in range(3):
            C[i, k] = (y[i] @ w) / denom
    # gamma @ P = C and P is symmetric, so solve P x = C^T columnwise.
    return np.ascontiguousarray(linalg.lu_solve(P, np.ascontiguousarray(C.T)).T)


def gamma_closed_form(coeffs, trace_coeffs: TraceCoeffs, dim: int) -> np.ndarray:
    """Closed form for :func:`build_gamma`, derived by contracting the
    forward map slot by slot; kept as an independent cross-check of the probe
    construction."""
    a, n = coeff_array(coeffs)
    if n != 3:
        raise ValueError(f"gamma is defined for rank 3 only, got rank {n}")
    a1, a2, a3, a4, a5, a6 = a
    a7, a8, a9 = trace_coeffs.a7, trace_coeffs.a8, trace_coeffs.a9
    d = dim
    rows = [
        [a1 + a6 + a7[0] + d * a8[0] + a9[0],
         a3 + a4 + a7[1] + d * a8[1] + a9[1],
         a2 + a5 + a7[2] + d * a8[2] + a9[2]],
        [a2 + a4 + d * a7[0] + a8[0] + a9[0],
         a1 + a5 + d * a7[1] + a8[1] + a9[1],
         a3 + a6 + d * a7[2] + a8[2] + a9[2]],
        [a3 + a5 + a7[0] + a8[0] + d * a9[0],
         a2 + a6 + a7[1] + a8[1] + d * a9[1],
         a1 + a4 + a7[2] + a8[2] + d * a9[2]],
    ]
    G = np.empty((3, 3), dtype=object if coeff_mode(a) == RATIONAL_MODE else float)
    for i in range(3):
        for j in range(3):
            G[i, j] = rows[i][j]
    return G
