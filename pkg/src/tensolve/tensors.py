"""Dense tensors, metric contraction, rank-3 traces, and the forward map.

Tensors are plain numpy arrays with every axis of the same length ``d``:
``float64`` in floating mode, ``object`` dtype of :class:`fractions.Fraction`
in exact mode.  All functions are pure; nothing here mutates its inputs.

Slot pairs are 0-based axis pairs ``(0, 1)``, ``(0, 2)``, ``(1, 2)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import linalg
from .perms import Perm, canonical_order, invert

FLOAT_MODE = linalg.FLOAT_MODE
RATIONAL_MODE = linalg.RATIONAL_MODE


def tensor_mode(T: np.ndarray) -> str:
    return RATIONAL_MODE if np.asarray(T).dtype == object else FLOAT_MODE


def zeros_like_mode(shape, mode: str) -> np.ndarray:
    if mode == RATIONAL_MODE:
        return np.full(shape, Fraction(0), dtype=object)
    return np.zeros(shape)


def check_cubical(T: np.ndarray, rank: int | None = None) -> np.ndarray:
    """Validate that T has equal axis lengths (and the given rank, if any)."""
    T = np.asarray(T)
    if rank is not None and T.ndim != rank:
        raise ValueError(f"expected a rank-{rank} tensor, got rank {T.ndim}")
    if T.ndim == 0 or len(set(T.shape)) != 1:
        raise ValueError(f"expected equal axis lengths, got shape {T.shape}")
    return T


def abs_max(T: np.ndarray):
    """Infinity norm over all entries (exact Fraction in rational mode)."""
    T = np.asarray(T)
    if T.dtype == object:
        return max((abs(v) for v in T.ravel()), default=Fraction(0))
    return float(np.max(np.abs(T))) if T.size else 0.0


def permute_tensor(T: np.ndarray, p: Perm) -> np.ndarray:
    """Index rearrangement: result[x] = T[apply_to_index(p, x)].

    numpy's transpose uses the opposite convention, hence the inverse image.
    """
    T = np.asarray(T)
    if T.ndim != len(p):
        raise ValueError(f"rank-{T.ndim} tensor does not match size-{len(p)} permutation")
    return np.transpose(T, axes=invert(p)).copy()


def _swap_axes(pair) -> tuple[int, int]:
    i, j = pair
    if i == j or not {i, j} <= {0, 1, 2}:
        raise ValueError(f"slot pair must be two distinct slots among (0, 1, 2), got {pair}")
    return (min(i, j), max(i, j))


def symmetry_check(T: np.ndarray, pair, sign: int, tol) -> bool:
    """True iff max |T[x] - sign * T[swap(x)]| <= tol over the slot pair."""
    T = check_cubical(T, 3)
    i, j = _swap_axes(pair)
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    return abs_max(T - sign * np.swapaxes(T, i, j)) <= tol


def symmetrize(T: np.ndarray, pair, sign: int) -> np.ndarray:
    """(T + sign * swap(T)) / 2 over the slot pair."""
    i, j = _swap_axes(pair)
    half = Fraction(1, 2) if tensor_mode(T) == RATIONAL_MODE else 0.5
    return (T + sign * np.swapaxes(T, i, j)) * half


class Metric:
    """Symmetric invertible d x d bilinear form with a cached inverse.

    Floating metrics must be symmetric to ``sym_tol`` (relative); a condition
    estimate above 1e12 triggers a warning because the traces amplify any
    inverse-metric error.  Rational metrics are checked exactly.
    """

    def __init__(self, g, sym_tol: float = 1e-9):
        g = np.asarray(g)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise ValueError(f"metric must be a square matrix, got shape {g.shape}")
        self.mode = RATIONAL_MODE if g.dtype == object else FLOAT_MODE
        if self.mode == FLOAT_MODE:
            g = g.astype(float)
            scale = max(1.0, float(np.max(np.abs(g))))
            if float(np.max(np.abs(g - g.T))) > sym_tol * scale:
                raise ValueError("metric is not symmetric to tolerance")
            cond = linalg.condition_estimate(g)
            if not math.isfinite(cond):
                raise ValueError("metric is singular")
            if cond > 1e12:
                warnings.warn(
                    f"metric condition estimate {cond:.3e} exceeds 1e12; "
                    "trace contractions may lose accuracy",
                    RuntimeWarning,
                    stacklevel=2,
                )
        else:
            if any(g[i, j] != g[j, i] for i in range(g.shape[0]) for j in range(i)):
                raise ValueError("metric is not symmetric")
            if linalg.determinant(g) == 0:
                raise ValueError("metric is singular")
        self.g = g
        self.g_inv = linalg.inverse(g)

    @property
    def dim(self) -> int:
        return self.g.shape[0]

    @classmethod
    def euclidean(cls, d: int, mode: str = FLOAT_MODE) -> "Metric":
        return cls(linalg.identity_matrix(d, mode))


@dataclass(frozen=True)
class TraceCoeffs:
    """The nine trace-term coefficients: three each multiplying the trace
    vectors placed on (free-slot, metric-pair) patterns 7, 8, 9."""

    a7: tuple
    a8: tuple
    a9: tuple

    def __post_init__(self):
        for name in ("a7", "a8", "a9"):
            if len(getattr(self, name)) != 3:
                raise ValueError(f"{name} must have exactly 3 entries")
        object.__setattr__(self, "a7", tuple(self.a7))
        object.__setattr__(self, "a8", tuple(self.a8))
        object.__setattr__(self, "a9", tuple(self.a9))

    @classmethod
    def zero(cls, mode: str = FLOAT_MODE) -> "TraceCoeffs":
        z = Fraction(0) if mode == RATIONAL_MODE else 0.0
        return cls((z, z, z), (z, z, z), (z, z, z))

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.a7 + self.a8 + self.a9)


def traces3(N: np.ndarray, metric: Metric) -> np.ndarray:
    """The three metric traces of a rank-3 tensor, as a (3, d) array.

    Row i contracts the inverse metric over slot pair (0,1), (0,2), (1,2)
    respectively, leaving the remaining slot free.
    """
    N = check_cubical(N, 3)
    if N.shape[0] != metric.dim:
        raise ValueError(f"tensor dimension {N.shape[0]} does not match metric dimension {metric.dim}")
    gi = metric.g_inv
    t1 = np.einsum("ab,abm->m", gi, N)
    t2 = np.einsum("ab,amb->m", gi, N)
    t3 = np.einsum("ab,mab->m", gi, N)
    return np.stack([t1, t2, t3])


def trace_term(tvecs: np.ndarray, c7, c8, c9, g: np.ndarray) -> np.ndarray:
    """Assemble sum_i (c7_i t_i[mu] g[al,nu] + c8_i t_i[nu] g[al,mu] + c9_i t_i[al] g[mu,nu])
    for three d-vectors ``tvecs`` and a d x d matrix ``g``."""
    d = g.shape[0]
    out = zeros_like_mode((d, d, d), tensor_mode(np.asarray(tvecs)))
    for i in range(3):
        t = tvecs[i]
        out = out + c7[i] * np.einsum("m,an->amn", t, g)
        out = out + c8[i] * np.einsum("n,am->amn", t, g)
        out = out + c9[i] * np.einsum("a,mn->amn", t, g)
    return out


def lhs_apply(
    coeffs,
    N: np.ndarray,
    trace_coeffs: TraceCoeffs | None = None,
    metric: Metric | None = None,
) -> np.ndarray:
    """Forward map: the equation's left side evaluated on a candidate N.

    Computes ``sum_k coeffs[k] * permute_tensor(N, order[k])`` over the
    canonical enumeration, plus the nine trace terms when ``trace_coeffs``
    and ``metric`` are given (rank 3 only).  This is the substitution oracle
    every solver's residual is measured against.
    """
    N = check_cubical(N)
    n = N.ndim
    coeffs = np.asarray(list(coeffs))
    if len(coeffs) != math.factorial(n):
        raise ValueError(
            f"coefficient count {len(coeffs)} does not match rank {n} (need {math.factorial(n)})"
        )
    out = zeros_like_mode(N.shape, tensor_mode(N))
    for c, p in zip(coeffs, canonical_order(n)):
        if c != 0:
            out = out + c * permute_tensor(N, p)
    if trace_coeffs is not None:
        if metric is None:
            raise ValueError("trace terms require a metric")
        if n != 3:
            raise ValueError("trace terms are defined for rank 3 only")
        if not trace_coeffs.is_zero():
            out = out + trace_term(
                traces3(N, metric), trace_coeffs.a7, trace_coeffs.a8, trace_coeffs.a9, metric.g
            )
    return out
