"""Command-line interface: solve, analyze, coeffs, verify.

Exit codes: 0 success, 1 verification residual exceeded, 2 mathematically
singular system (solve still writes the degeneracy report), 3 invalid input
(the diagnostic names the malformed field).
"""

from __future__ import annotations

import argparse
import math
import sys
from fractions import Fraction

import numpy as np

from .coeffmat import build_A, degeneracy_report, det_factors3, matrix_report, reduce_symmetric
from .exceptions import GammaSingularError, SingularSystemError, SymmetryViolationError
from .linalg import inverse, inverse_first_row
from .problem import (
    Problem,
    ProblemFormatError,
    arrangements_out,
    degeneracy_to_obj,
    dump_json,
    load_json,
    load_problem,
    parse_solution_tensors,
    scalar_out,
    solution_to_obj,
    write_json,
)
from .solver import solve_rankn, solve_reduced, solve_with_traces
from .tensors import RATIONAL_MODE, abs_max, lhs_apply

VERIFY_REL_TOL = 1e-8


def _solve_one(problem: Problem, B):
    if problem.mode == "traced":
        return solve_with_traces(problem.coefficients, problem.trace_coeffs, B, problem.metric)
    if problem.symmetry is not None:
        pair, sign = problem.symmetry
        return solve_reduced(problem.coefficients, B, pair, sign)
    return solve_rankn(problem.coefficients, B)


def cmd_solve(args) -> int:
    try:
        problem = load_problem(args.input)
    except ProblemFormatError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return 3
    solutions = []
    try:
        for B in problem.tensors:
            solutions.append(_solve_one(problem, B))
    except (SingularSystemError, GammaSingularError) as exc:
        obj = {"singular": True, "error": str(exc)}
        if isinstance(exc, SingularSystemError):
            obj["degeneracy"] = degeneracy_to_obj(exc.report)
        write_json(args.output, obj)
        print(f"singular system: {exc}", file=sys.stderr)
        return 2
    except SymmetryViolationError as exc:
        print(f"invalid input: B: {exc}", file=sys.stderr)
        return 3
    if problem.is_batch:
        write_json(args.output, {"solutions": [solution_to_obj(s) for s in solutions]})
    else:
        write_json(args.output, solution_to_obj(solutions[0]))
    for i, sol in enumerate(solutions):
        label = f"[{i}] " if problem.is_batch else ""
        print(
            f"{label}path={sol.path} residual_inf={scalar_out(sol.residual_inf)} "
            f"det={scalar_out(sol.degeneracy.det)}",
            file=sys.stderr,
        )
    return 0


def cmd_analyze(args) -> int:
    try:
        problem = load_problem(args.input, require_b=False)
    except ProblemFormatError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return 3
    report = degeneracy_report(problem.coefficients)
    print(dump_json(degeneracy_to_obj(report)), end="")
    return 0


def _parse_cli_coeffs(text: str, rational: bool):
    out = []
    for i, part in enumerate(text.split(",")):
        part = part.strip()
        try:
            out.append(Fraction(part) if rational else float(part))
        except (ValueError, ZeroDivisionError):
            raise ProblemFormatError(f"--coefficients[{i}]", f"not a number: {part!r}") from None
    return out


def _parse_cli_symmetry(text: str):
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 3:
        raise ProblemFormatError("--symmetry", "expected p1,p2,+1 or p1,p2,-1")
    try:
        i, j, sign = int(parts[0]), int(parts[1]), int(parts[2])
    except ValueError:
        raise ProblemFormatError("--symmetry", f"not integers: {text!r}") from None
    if not ({i, j} <= {1, 2, 3}) or i == j or sign not in (1, -1):
        raise ProblemFormatError("--symmetry", "pair must be two distinct slots among 1..3, sign +1/-1")
    return (i - 1, j - 1), sign


def cmd_coeffs(args) -> int:
    try:
        if args.rank < 1:
            raise ProblemFormatError("--rank", f"expected a positive integer, got {args.rank}")
        coeffs = _parse_cli_coeffs(args.coefficients, args.rational)
        expected = math.factorial(args.rank)
        if len(coeffs) != expected:
            raise ProblemFormatError("--coefficients", f"rank {args.rank} needs {expected} values, got {len(coeffs)}")
        symmetry = _parse_cli_symmetry(args.symmetry) if args.symmetry else None
        if symmetry is not None and args.rank != 3:
            raise ProblemFormatError("--symmetry", "symmetry reduction requires rank 3")
    except ProblemFormatError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return 3
    a = np.empty(len(coeffs), dtype=object) if args.rational else np.asarray(coeffs, dtype=float)
    if args.rational:
        a[:] = coeffs
    if symmetry is not None:
        pair, sign = symmetry
        M, _ = reduce_symmetric(a, pair, sign)
        report = matrix_report(M)
    else:
        M = build_A(a)
        report = matrix_report(M, sigma=det_factors3(a) if args.rank == 3 else None)
    if report.singular:
        print(dump_json(degeneracy_to_obj(report)), end="", file=sys.stderr)
        print("singular system: no inverse", file=sys.stderr)
        return 2
    out = {
        "rank": args.rank,
        "coefficients": [scalar_out(v) for v in a],
        "inverse_first_row": [scalar_out(v) for v in inverse_first_row(M)],
        "arrangements": arrangements_out(args.rank, M.shape[0]),
        "det": scalar_out(report.det),
    }
    if report.sigma is not None:
        out["sigma"] = [scalar_out(v) for v in report.sigma]
    if symmetry is not None:
        out["symmetry"] = {"pair": [symmetry[0][0] + 1, symmetry[0][1] + 1], "sign": symmetry[1]}
    if args.full_inverse:
        out["full_inverse"] = [[scalar_out(v) for v in row] for row in inverse(M)]
    print(dump_json(out), end="")
    return 0


def cmd_verify(args) -> int:
    try:
        problem = load_problem(args.input)
        sol_obj = load_json(args.solution)
        tensors = parse_solution_tensors(
            sol_obj, "", problem.arithmetic, rank=problem.rank, dim=problem.dim
        )
    except ProblemFormatError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return 3
    if len(tensors) != len(problem.tensors):
        print(
            f"invalid input: solution count {len(tensors)} does not match problem count "
            f"{len(problem.tensors)}",
            file=sys.stderr,
        )
        return 3
    worst_ok = True
    for i, (B, N) in enumerate(zip(problem.tensors, tensors)):
        recomputed = lhs_apply(problem.coefficients, N, problem.trace_coeffs, problem.metric)
        residual = float(abs_max(recomputed - B))
        tol = VERIFY_REL_TOL * max(1.0, float(abs_max(B)))
        ok = residual <= tol
        worst_ok = worst_ok and ok
        label = f"[{i}] " if problem.is_batch else ""
        print(f"{label}residual_inf={residual!r} tol={tol!r} {'OK' if ok else 'EXCEEDED'}")
    return 0 if worst_ok else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="tensolve",
        description="Solve linear tensor equations given as coefficient-weighted sums "
        "over all index permutations of the unknown.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve a problem file, write the solution JSON")
    p_solve.add_argument("-i", "--input", required=True, help="problem JSON file")
    p_solve.add_argument("-o", "--output", required=True, help="solution JSON file to write")
    p_solve.set_defaults(func=cmd_solve)

    p_analyze = sub.add_parser("analyze", help="degeneracy analysis of the coefficient matrix")
    p_analyze.add_argument("-i", "--input", required=True, help="problem JSON file (B optional)")
    p_analyze.set_defaults(func=cmd_analyze)

    p_coeffs = sub.add_parser("coeffs", help="emit the inverse first row for given coefficients")
    p_coeffs.add_argument("--rank", type=int, required=True)
    p_coeffs.add_argument("--coefficients", required=True, help="comma-separated, rank! values")
    p_coeffs.add_argument("--symmetry", help="p1,p2,+1 or p1,p2,-1 (rank 3 only)")
    p_coeffs.add_argument("--rational", action="store_true", help="exact fraction arithmetic")
    p_coeffs.add_argument("--full-inverse", action="store_true", help="also emit the full inverse")
    p_coeffs.set_defaults(func=cmd_coeffs)

    p_verify = sub.add_parser("verify", help="recompute the residual of a solution file")
    p_verify.add_argument("-i", "--input", required=True, help="problem JSON file")
    p_verify.add_argument("-s", "--solution", required=True, help="solution JSON file")
    p_verify.set_defaults(func=cmd_verify)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
