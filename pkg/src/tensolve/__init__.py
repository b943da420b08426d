"""tensolve: solve linear tensor equations written as coefficient-weighted
sums over all index permutations of an unknown tensor.

The equation ``sum_k a_k N[p_k . x] = B[x]`` (optionally extended by metric
trace terms at rank 3) has a unique solution exactly when the n! x n!
permutation-coefficient matrix built from ``a`` is nonsingular; this package
constructs that matrix, solves the equation in floating or exact rational
arithmetic, and diagnoses the degenerate cases precisely.
"""

from .coeffmat import (
    DegeneracyReport,
    SymmetryReduction,
    build_A,
    build_gamma,
    degeneracy_report,
    det_factors3,
    fold_defect,
    gamma_closed_form,
    reduce_symmetric,
)
from .estimator import LinearTensorSolver
from .exceptions import (
    GammaSingularError,
    SingularMatrixError,
    SingularSystemError,
    SymmetryViolationError,
)
from .perms import apply_to_index, canonical_order, compose, invert, parity, perm_table
from .solver import (
    Solution,
    assemble_operator,
    brute_force,
    solve_rank3,
    solve_rankn,
    solve_reduced,
    solve_with_traces,
)
from .tensors import (
    Metric,
    TraceCoeffs,
    lhs_apply,
    permute_tensor,
    symmetrize,
    symmetry_check,
    traces3,
)

__version__ = "0.1.0"

__all__ = [
    "DegeneracyReport",
    "GammaSingularError",
    "LinearTensorSolver",
    "Metric",
    "SingularMatrixError",
    "SingularSystemError",
    "Solution",
    "SymmetryReduction",
    "SymmetryViolationError",
    "TraceCoeffs",
    "apply_to_index",
    "assemble_operator",
    "brute_force",
    "build_A",
    "build_gamma",
    "canonical_order",
    "compose",
    "degeneracy_report",
    "det_factors3",
    "fold_defect",
    "gamma_closed_form",
    "invert",
    "lhs_apply",
    "parity",
    "perm_table",
    "permute_tensor",
    "reduce_symmetric",
    "solve_rank3",
    "solve_rankn",
    "solve_reduced",
    "solve_with_traces",
    "symmetrize",
    "symmetry_check",
    "traces3",
]
