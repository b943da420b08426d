"""Small dense linear algebra in two scalar modes.

Matrices are square numpy arrays: ``float64`` for floating work, ``object``
dtype holding :class:`fractions.Fraction` for exact work.  Sizes stay tiny
(at most 720x720, the rank-6 coefficient matrix), so the kernels are written
for clarity and reproducibility rather than speed.

Pivoting rule everywhere: largest absolute value, ties broken by the lowest
row index, which makes floating results bit-reproducible run to run.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .exceptions import SingularMatrixError

FLOAT_MODE = "float"
RATIONAL_MODE = "rational"


def matrix_mode(M: np.ndarray) -> str:
    return RATIONAL_MODE if M.dtype == object else FLOAT_MODE


def _check_square(M: np.ndarray) -> int:
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    return M.shape[0]


def lu_factor(M: np.ndarray):
    """Factor P.M = L.U with partial pivoting.

    Returns ``(lu, piv, sign)`` where ``lu`` packs L (unit diagonal, below)
    and U (on and above), ``piv`` is the pivot row chosen at each step, and
    ``sign`` is the permutation sign.  Raises :class:`SingularMatrixError` on
    an exactly-zero pivot, carrying the rank reached and pivot history.
    """
    m = _check_square(M)
    rational = matrix_mode(M) == RATIONAL_MODE
    lu = M.astype(object).copy() if rational else M.astype(float).copy()
    perm = list(range(m))
    piv: list[int] = []
    sign = 1
    for k in range(m):
        col = [abs(lu[i, k]) for i in range(k, m)]
        best = k + max(range(len(col)), key=lambda i: (col[i], -i))
        if lu[best, k] == 0:
            raise SingularMatrixError(
                f"singular matrix: zero pivot at elimination step {k}",
                rank=k,
                pivot_rows=tuple(piv),
            )
        if best != k:
            lu[[k, best]] = lu[[best, k]]
            perm[k], perm[best] = perm[best], perm[k]
            sign = -sign
        piv.append(perm[k])
        pivot = lu[k, k]
        if rational:
            for i in range(k + 1, m):
                f = lu[i, k] / pivot
                lu[i, k] = f
                if f != 0:
                    for j in range(k + 1, m):
                        lu[i, j] = lu[i, j] - f * lu[k, j]
        else:
            lu[k + 1 :, k] /= pivot
            lu[k + 1 :, k + 1 :] -= np.outer(lu[k + 1 :, k], lu[k, k + 1 :])
    return lu, perm, sign


def lu_solve(M: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve M.x = rhs (rhs a vector or a matrix of columns)."""
    m = _check_square(M)
    rhs = np.asarray(rhs)
    if rhs.shape[0] != m:
        raise ValueError(f"rhs height {rhs.shape[0]} does not match matrix size {m}")
    lu, perm, _ = lu_factor(M)
    vector = rhs.ndim == 1
    b = rhs.reshape(m, -1)[perm, :].astype(lu.dtype).copy()
    for k in range(m):  # forward, unit lower
        for i in range(k + 1, m):
            if lu[i, k] != 0:
                b[i, :] = b[i, :] - lu[i, k] * b[k, :]
    for k in range(m - 1, -1, -1):  # backward
        b[k, :] = b[k, :] / lu[k, k]
        for i in range(k):
            if lu[i, k] != 0:
                b[i, :] = b[i, :] - lu[i, k] * b[k, :]
    return b[:, 0] if vector else b


def identity_matrix(m: int, mode: str = FLOAT_MODE) -> np.ndarray:
    if mode == RATIONAL_MODE:
        out = np.full((m, m), Fraction(0), dtype=object)
        for i in range(m):
            out[i, i] = Fraction(1)
        return out
    return np.eye(m)


def inverse(M: np.ndarray) -> np.ndarray:
    return lu_solve(M, identity_matrix(_check_square(M), matrix_mode(M)))


def inverse_first_row(M: np.ndarray) -> np.ndarray:
    """First row of M^-1, via the single transposed solve M^T x = e1."""
    m = _check_square(M)
    e1 = identity_matrix(m, matrix_mode(M))[:, 0]
    return lu_solve(np.ascontiguousarray(M.T), e1)


def _bareiss_determinant(M: np.ndarray):
    """Fraction-free elimination on an integer-scaled copy of M."""
    m = M.shape[0]
    scale = Fraction(1)
    rows = []
    for i in range(m):
        dens = [Fraction(M[i, j]).denominator for j in range(m)]
        lcm = 1
        for d in dens:
            lcm = lcm * d // math.gcd(lcm, d)
        scale *= lcm
        rows.append([int(Fraction(M[i, j]) * lcm) for j in range(m)])
    sign = 1
    prev = 1
    for k in range(m - 1):
        if rows[k][k] == 0:
            swap = next((i for i in range(k + 1, m) if rows[i][k] != 0), None)
            if swap is None:
                return Fraction(0)
            rows[k], rows[swap] = rows[swap], rows[k]
            sign = -sign
        for i in range(k + 1, m):
            for j in range(k + 1, m):
                rows[i][j] = (rows[i][j] * rows[k][k] - rows[i][k] * rows[k][j]) // prev
            rows[i][k] = 0
        prev = rows[k][k]
    return Fraction(sign * rows[m - 1][m - 1], 1) / scale


def determinant(M: np.ndarray):
    """det(M): LU pivot product (float) or fraction-free elimination (rational)."""
    _check_square(M)
    if matrix_mode(M) == RATIONAL_MODE:
        return _bareiss_determinant(M)
    try:
        lu, _, sign = lu_factor(M)
    except SingularMatrixError:
        return 0.0
    return float(sign) * float(np.prod(np.diag(lu)))


def condition_estimate(M: np.ndarray) -> float:
    """Infinity-norm condition number; +inf when singular (float mode only)."""
    _check_square(M)
    if matrix_mode(M) == RATIONAL_MODE:
        raise ValueError("condition_estimate expects a floating-point matrix")
    try:
        Minv = inverse(M)
    except SingularMatrixError:
        return float("inf")
    norm = float(np.max(np.sum(np.abs(M), axis=1)))
    norm_inv = float(np.max(np.sum(np.abs(Minv), axis=1)))
    return norm * norm_inv


def nullspace(M: np.ndarray, tol: float | None = None):
    """Kernel of M: ``(nullity, basis)`` with basis rows spanning ker(M).

    Rational mode is exact (reduced row echelon form); float mode thresholds
    singular values at ``tol`` (default ``1e-12 * max(1, ||M||_inf)``).
    """
    m = _check_square(M)
    if matrix_mode(M) == RATIONAL_MODE:
        R = [[Fraction(M[i, j]) for j in range(m)] for i in range(m)]
        pivots: list[int] = []
        r = 0
        for c in range(m):
            p = next((i for i in range(r, m) if R[i][c] != 0), None)
            if p is None:
                continue
            R[r], R[p] = R[p], R[r]
            pv = R[r][c]
            R[r] = [v / pv for v in R[r]]
            for i in range(m):
                if i != r and R[i][c] != 0:
                    f = R[i][c]
                    R[i] = [vi - f * vr for vi, vr in zip(R[i], R[r])]
            pivots.append(c)
            r += 1
            if r == m:
                break
        free = [c for c in range(m) if c not in pivots]
        basis = np.full((len(free), m), Fraction(0), dtype=object)
        for b, c in enumerate(free):
            basis[b, c] = Fraction(1)
            for row, pc in enumerate(pivots):
                basis[b, pc] = -R[row][c]
        return len(free), basis
    if tol is None:
        scale = float(np.max(np.sum(np.abs(M), axis=1))) if m else 0.0
        tol = 1e-12 * max(1.0, scale)
    _, s, vt = np.linalg.svd(M)
    small = s <= tol
    return int(np.count_nonzero(small)), vt[small]


def residual_inf(M: np.ndarray, x: np.ndarray, rhs: np.ndarray):
    """Infinity norm of M.x - rhs (exact Fraction in rational mode)."""
    diff = M @ x - rhs
    if diff.dtype == object:
        return max((abs(v) for v in diff.ravel()), default=Fraction(0))
    return float(np.max(np.abs(diff))) if diff.size else 0.0
