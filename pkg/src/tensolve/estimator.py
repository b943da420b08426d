"""scikit-learn style front end.

:class:`LinearTensorSolver` is configured with the equation's coefficients;
``fit`` factors the permutation-coefficient system once, and ``transform``
maps batches of flattened source tensors B to the corresponding solutions N.
``inverse_transform`` is the forward map, so
``est.inverse_transform(est.transform(X)) == X`` for nonsingular systems.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from . import linalg
from .coeffmat import (
    build_A,
    build_gamma,
    coeff_array,
    det_factors3,
    matrix_report,
    reduce_symmetric,
)
from .exceptions import GammaSingularError, SingularSystemError, SymmetryViolationError
from .perms import canonical_order
from .tensors import (
    FLOAT_MODE,
    RATIONAL_MODE,
    Metric,
    TraceCoeffs,
    abs_max,
    lhs_apply,
    symmetrize,
    symmetry_check,
    trace_term,
    traces3,
)


def _coerce_scalar(value, arithmetic: str):
    if arithmetic == RATIONAL_MODE:
        if isinstance(value, float):
            raise ValueError("rational arithmetic takes ints, Fractions, or 'p/q' strings, not floats")
        return Fraction(value)
    return float(value)


def _coerce_vector(values, arithmetic: str) -> np.ndarray:
    vals = [_coerce_scalar(v, arithmetic) for v in values]
    if arithmetic == RATIONAL_MODE:
        out = np.empty(len(vals), dtype=object)
        out[:] = vals
        return out
    return np.asarray(vals, dtype=float)


class LinearTensorSolver(BaseEstimator, TransformerMixin):
    """Solve ``sum_k a_k N[p_k . x] (+ trace terms) = B`` for batches of B.

    Parameters
    ----------
    coefficients : sequence of length n!
        Equation coefficients in canonical permutation order; fixes the rank.
    trace_coefficients : {"a7": [...], "a8": [...], "a9": [...]} or TraceCoeffs, optional
        Enables the nine rank-3 trace terms; requires ``metric``.
    metric : (d, d) array-like, optional
        Symmetric invertible bilinear form used by the trace terms.
    symmetry : ((i, j), sign), optional
        Declares the unknown (anti)symmetric in 0-based slot pair (i, j);
        solves the folded 3x3 system instead of the 6x6 one.
    arithmetic : "float" or "rational"
        Scalar mode.  Rational mode is exact and accepts ints, Fractions,
        and "p/q" strings.

    Attributes
    ----------
    rank_ : int
    weights_ : tuple
        Reconstruction weights (first row of the relevant inverse matrix).
    degeneracy_ : DegeneracyReport
    gamma_ : ndarray of shape (3, 3), traced configurations only
    """

    def __init__(
        self,
        coefficients=None,
        *,
        trace_coefficients=None,
        metric=None,
        symmetry=None,
        arithmetic=FLOAT_MODE,
    ):
        self.coefficients = coefficients
        self.trace_coefficients = trace_coefficients
        self.metric = metric
        self.symmetry = symmetry
        self.arithmetic = arithmetic

    # ------------------------------------------------------------------ fit

    def _coerced_trace_coeffs(self) -> TraceCoeffs:
        tc = self.trace_coefficients
        if isinstance(tc, TraceCoeffs):
            rows = (tc.a7, tc.a8, tc.a9)
        elif isinstance(tc, dict):
            rows = (tc["a7"], tc["a8"], tc["a9"])
        else:
            rows = tuple(tc)
            if len(rows) != 3:
                raise ValueError("trace_coefficients must give the three rows a7, a8, a9")
        return TraceCoeffs(*(tuple(_coerce_vector(r, self.arithmetic)) for r in rows))

    def fit(self, X=None, y=None):
        """Factor the coefficient system; ``X`` and ``y`` are ignored."""
        if self.arithmetic not in (FLOAT_MODE, RATIONAL_MODE):
            raise ValueError(f"arithmetic must be 'float' or 'rational', got {self.arithmetic!r}")
        if self.coefficients is None:
            raise ValueError("coefficients must be provided before fitting")
        a, rank = coeff_array(_coerce_vector(self.coefficients, self.arithmetic))
        if self.symmetry is not None and self.trace_coefficients is not None:
            raise ValueError("symmetry reduction and trace terms are exclusive")
        self.rank_ = rank
        self.coefficients_ = a
        self.trace_coeffs_ = None
        self.metric_ = None
        self.reduction_ = None
        if self.trace_coefficients is not None:
            if rank != 3:
                raise ValueError("trace terms are defined for rank 3 only")
            if self.metric is None:
                raise ValueError("trace terms require a metric")
            g = np.asarray(self.metric)
            self.metric_ = Metric(
                _coerce_vector(g.ravel(), self.arithmetic).reshape(g.shape)
            )
            self.trace_coeffs_ = self._coerced_trace_coeffs()
            gamma = build_gamma(a, self.trace_coeffs_, self.metric_.dim)
            if matrix_report(gamma).singular:
                raise GammaSingularError(
                    "trace-coupling matrix is singular; traces cannot be eliminated", gamma
                )
            self.gamma_ = gamma
            gamma_inv = linalg.inverse(gamma)
            self._trace_corr_ = tuple(
                np.asarray(row) @ gamma_inv
                for row in (self.trace_coeffs_.a7, self.trace_coeffs_.a8, self.trace_coeffs_.a9)
            )
        if self.symmetry is not None:
            if rank != 3:
                raise ValueError("symmetry reduction requires rank 3")
            pair, sign = self.symmetry
            M, red = reduce_symmetric(a, tuple(pair), sign)
            self.reduction_ = red
            report = matrix_report(M)
            if report.singular:
                raise SingularSystemError("reduced 3x3 system is singular", report)
            self._recon_perms_ = tuple(canonical_order(3)[k] for k in red.representatives)
        else:
            M = build_A(a)
            report = matrix_report(M, sigma=det_factors3(a) if rank == 3 else None)
            if report.singular:
                raise SingularSystemError(
                    "coefficient matrix is singular, no unique solution", report
                )
            self._recon_perms_ = canonical_order(rank)
        self.degeneracy_ = report
        self.weights_ = tuple(linalg.inverse_first_row(M))
        self._flat_index_cache_ = {}
        if X is not None:
            X = np.asarray(X)
            if X.ndim == 2:
                self.n_features_in_ = X.shape[1]
        return self

    # ------------------------------------------------------------ transform

    def _check_batch(self, X) -> tuple[np.ndarray, int]:
        if self.arithmetic == RATIONAL_MODE:
            X = np.asarray(X, dtype=object)
            if X.ndim != 2:
                raise ValueError(f"expected a 2-D batch of flattened tensors, got shape {X.shape}")
        else:
            X = check_array(X, dtype=float)
        length = X.shape[1]
        d = round(length ** (1.0 / self.rank_))
        for cand in (d - 1, d, d + 1):
            if cand >= 1 and cand**self.rank_ == length:
                d = cand
                break
        else:
            raise ValueError(
                f"row length {length} is not d^{self.rank_} for any integer dimension d"
            )
        if self.metric_ is not None and d != self.metric_.dim:
            raise ValueError(f"tensor dimension {d} does not match metric dimension {self.metric_.dim}")
        return X, d

    def _flat_indices(self, d: int) -> tuple[np.ndarray, ...]:
        cached = self._flat_index_cache_.get(d)
        if cached is None:
            n = self.rank_
            idx = np.indices((d,) * n).reshape(n, d**n).T
            strides = np.array([d ** (n - 1 - i) for i in range(n)])
            cached = tuple(idx[:, list(p)] @ strides for p in self._recon_perms_)
            self._flat_index_cache_[d] = cached
        return cached

    def transform(self, X):
        """Solve one equation per row of flattened B tensors; returns flattened N."""
        check_is_fitted(self, "weights_")
        X, d = self._check_batch(X)
        fidx = self._flat_indices(d)
        out = self.weights_[0] * X[:, fidx[0]]
        for w, ix in zip(self.weights_[1:], fidx[1:]):
            if w != 0:
                out = out + w * X[:, ix]
        if self.trace_coeffs_ is not None:
            # correct each source by its trace image before reconstruction
            shape = (d,) * 3
            c7, c8, c9 = self._trace_corr_
            rows = []
            for row in X:
                B = row.reshape(shape)
                B_hat = B - trace_term(traces3(B, self.metric_), c7, c8, c9, self.metric_.g)
                rows.append(B_hat.ravel())
            Xh = np.stack(rows)
            out = self.weights_[0] * Xh[:, fidx[0]]
            for w, ix in zip(self.weights_[1:], fidx[1:]):
                if w != 0:
                    out = out + w * Xh[:, ix]
        if self.reduction_ is not None:
            pair, sign = self.symmetry
            tol = 0 if self.arithmetic == RATIONAL_MODE else None
            rows = []
            for i, row in enumerate(X):
                B = row.reshape((d,) * 3)
                row_tol = tol if tol is not None else 1e-8 * max(1.0, abs_max(B))
                if not symmetry_check(B, tuple(pair), sign, row_tol):
                    raise SymmetryViolationError(
                        f"row {i} is not (anti)symmetric in slot pair {tuple(pair)}"
                    )
                rows.append(symmetrize(out[i].reshape((d,) * 3), tuple(pair), sign).ravel())
            out = np.stack(rows)
        return out

    def inverse_transform(self, X):
        """Forward map: rows of flattened N back to the equation's left side."""
        check_is_fitted(self, "weights_")
        X, d = self._check_batch(X)
        rows = [
            lhs_apply(
                self.coefficients_, row.reshape((d,) * self.rank_),
                self.trace_coeffs_, self.metric_,
            ).ravel()
            for row in X
        ]
        return np.stack(rows)
