"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines; every tolerance is pinned here, nothing is deferred to calibration.
"""

import itertools
import json
import math
import time
from fractions import Fraction

import numpy as np
import pytest

from tensolve import linalg
from tensolve.cli import main
from tensolve.coeffmat import (
    DET_SIGN,
    build_A,
    build_gamma,
    degeneracy_report,
    det_factors3,
    fold_defect,
    gamma_closed_form,
    reduce_symmetric,
)
from tensolve.exceptions import GammaSingularError, SingularSystemError
from tensolve.perms import canonical_order
from tensolve.problem import dump_json
from tensolve.solver import (
    brute_force,
    solve_rank3,
    solve_rankn,
    solve_reduced,
    solve_with_traces,
)
from tensolve.tensors import (
    Metric,
    TraceCoeffs,
    abs_max,
    lhs_apply,
    permute_tensor,
    symmetrize,
)


def report(num, ok, detail):
    marker = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE {num:>2} {marker} - {detail}")
    assert ok, f"criterion {num}: {detail}"


def frac_vec(vals):
    out = np.empty(len(vals), dtype=object)
    out[:] = [Fraction(v) for v in vals]
    return out


def rand_frac_vec(rng, m, lo=-9, hi=9, den=9):
    return frac_vec(
        [Fraction(int(rng.integers(lo, hi + 1)), int(rng.integers(1, den + 1))) for _ in range(m)]
    )


def test_criterion_1_matrix_ground_truth():
    start = time.perf_counter()
    # symbolic markers: rows 1, 5, 6 in their agreed form, the rest derived
    A_sym = build_A(np.array(["a1", "a2", "a3", "a4", "a5", "a6"], dtype=object))
    rows_ok = (
        list(A_sym[0]) == ["a1", "a2", "a3", "a4", "a5", "a6"]
        and list(A_sym[4]) == ["a5", "a4", "a6", "a2", "a1", "a3"]
        and list(A_sym[5]) == ["a6", "a5", "a4", "a3", "a2", "a1"]
    )
    rng = np.random.default_rng(101)
    d = 3
    order = canonical_order(3)
    worst = 0.0
    for _ in range(200):
        a = rng.standard_normal(6)
        N = rng.standard_normal((d, d, d))
        B = lhs_apply(a, N)
        A = build_A(a)
        stacked = np.stack([permute_tensor(N, p).ravel() for p in order])
        lhs_rows = A @ stacked
        for r, rho in enumerate(order):
            worst = max(worst, float(np.max(np.abs(lhs_rows[r] - permute_tensor(B, rho).ravel()))))
    elapsed = time.perf_counter() - start
    report(
        1,
        rows_ok and worst <= 1e-12 and elapsed < 1.0,
        f"substitution identity on 200 instances, max residual {worst:.3e}, "
        f"fixed rows verbatim, {elapsed:.2f}s",
    )


def test_criterion_2_determinant_factorization():
    start = time.perf_counter()
    rng = np.random.default_rng(102)
    ok = DET_SIGN in (1, -1)
    for _ in range(1000):
        a = rand_frac_vec(rng, 6)
        s1, s2, s3 = det_factors3(a)
        if linalg.determinant(build_A(a)) != DET_SIGN * s1 * s2 * s3**2:
            ok = False
            break
    # analytic probes: identity, one 3-cycle, one transposition
    probes = {
        (1, 0, 0, 0, 0, 0): Fraction(1),
        (0, 1, 0, 0, 0, 0): Fraction(1),
        (0, 0, 0, 1, 0, 0): Fraction(-1),
    }
    for coeffs, want in probes.items():
        if linalg.determinant(build_A(frac_vec(coeffs))) != want:
            ok = False
    elapsed = time.perf_counter() - start
    report(
        2,
        ok and elapsed < 10.0,
        f"det == {DET_SIGN:+d} * s1*s2*s3^2 exactly on 1000 rational vectors "
        f"plus analytic probes, {elapsed:.2f}s",
    )


def test_criterion_3_example1_degeneracy(tmp_path):
    a = frac_vec([1, 0, -1, 0, 0, 0])
    rep = degeneracy_report(a)
    flags_ok = rep.singular and rep.sigma[0] == 0 and 1 in rep.vanishing_factors
    raised = False
    try:
        solve_rank3(a, np.full((2, 2, 2), Fraction(1), dtype=object))
    except SingularSystemError:
        raised = True
    prob = tmp_path / "ex1.json"
    prob.write_text(
        dump_json(
            {
                "rank": 3,
                "dimension": 2,
                "coefficients": [1, 0, -1, 0, 0, 0],
                "B": {"rank": 3, "dim": 2, "values": [1.0] * 8},
            }
        )
    )
    exit_code = main(["solve", "-i", str(prob), "-o", str(tmp_path / "out.json")])
    report(
        3,
        flags_ok and raised and exit_code == 2,
        f"singular flagged with sigma1 = 0, solver refuses, CLI exit {exit_code}",
    )


def test_criterion_4_example2_levi_civita():
    rng = np.random.default_rng(104)
    d = 4
    a = [0.0, 1.0, 1.0, 0.0, 0.0, 0.0]
    order = canonical_order(3)
    worst = 0.0
    for _ in range(20):
        B = symmetrize(rng.standard_normal((d, d, d)), (1, 2), 1)
        sol = solve_reduced(a, B, (1, 2), 1)
        want = 0.5 * (-B + permute_tensor(B, order[1]) + permute_tensor(B, order[2]))
        worst = max(worst, float(np.max(np.abs(sol.N - want))))
    B_exact = symmetrize(
        np.array([[[Fraction(i + 2 * j - k, 3) for k in range(2)] for j in range(2)]
                  for i in range(2)], dtype=object),
        (1, 2), 1,
    )
    sol_exact = solve_reduced(frac_vec([0, 1, 1, 0, 0, 0]), B_exact, (1, 2), 1)
    weights_ok = sol_exact.inverse_first_row == (
        Fraction(-1, 2), Fraction(1, 2), Fraction(1, 2),
    )
    report(
        4,
        worst <= 1e-12 and weights_ok,
        f"20 symmetric d=4 sources, max error {worst:.3e}, exact weights (-1/2, 1/2, 1/2)",
    )


def test_criterion_5_rank4_solves():
    rng = np.random.default_rng(105)
    d = 4
    worst_rel = 0.0
    worst_time = 0.0
    done = 0
    while done < 5:
        a = rng.standard_normal(24)
        if degeneracy_report(a).singular:
            continue
        B = rng.standard_normal((d,) * 4)
        start = time.perf_counter()
        sol = solve_rankn(a, B)
        worst_time = max(worst_time, time.perf_counter() - start)
        worst_rel = max(worst_rel, float(sol.residual_inf) / max(1.0, float(abs_max(B))))
        done += 1
    report(
        5,
        worst_rel <= 1e-10 and worst_time < 1.0,
        f"5 rank-4 d=4 instances, worst relative residual {worst_rel:.3e}, "
        f"slowest solve {worst_time * 1000:.0f}ms",
    )


def test_criterion_6_traced_solves():
    rng = np.random.default_rng(106)
    d = 4
    worst_rel = 0.0
    done = 0
    while done < 100:
        a = rng.standard_normal(6)
        tc = TraceCoeffs(*rng.standard_normal((3, 3)))
        M = rng.standard_normal((d, d))
        metric = Metric(M @ M.T + d * np.eye(d))
        B = rng.standard_normal((d, d, d))
        try:
            sol = solve_with_traces(a, tc, B, metric)
        except (SingularSystemError, GammaSingularError):
            continue
        worst_rel = max(worst_rel, float(sol.residual_inf) / max(1.0, float(abs_max(B))))
        done += 1
    # zeroed trace coefficients reduce to the plain solver
    a = rng.standard_normal(6)
    while degeneracy_report(a).singular:
        a = rng.standard_normal(6)
    B = rng.standard_normal((d, d, d))
    M = rng.standard_normal((d, d))
    metric = Metric(M @ M.T + d * np.eye(d))
    gap = float(
        np.max(np.abs(solve_with_traces(a, TraceCoeffs.zero(), B, metric).N - solve_rank3(a, B).N))
    )
    report(
        6,
        worst_rel <= 1e-10 and gap <= 1e-14,
        f"100 traced d=4 instances, worst relative residual {worst_rel:.3e}, "
        f"zero-trace gap {gap:.1e}",
    )


# Historical variant of the closed-form trace-coupling table.  Its
# pure-coefficient pairs do not follow from the equation's displayed term
# order (the probe construction refutes them); it is retained here, with its
# dimension symbol fixed and its last-row labeling de-duplicated, to pin down
# the exact deviation so it is reported rather than silently absorbed.
def _gamma_variant(a, tc, d):
    a1, a2, a3, a4, a5, a6 = a
    rows = [
        [a1 + a3, a2 + a4, a5 + a6],
        [a2 + a5, a1 + a6, a3 + a4],
        [a5 + a6, a3 + a4, a1 + a2],
    ]
    G = np.empty((3, 3), dtype=object)
    for i in range(3):
        for j in range(3):
            G[i, j] = rows[i][j]
    trace_weights = [(1, d, 1), (d, 1, 1), (1, 1, d)]
    for i, (w7, w8, w9) in enumerate(trace_weights):
        for j in range(3):
            G[i, j] = G[i, j] + w7 * tc.a7[j] + w8 * tc.a8[j] + w9 * tc.a9[j]
    return G


def test_criterion_7_gamma_cross_check():
    rng = np.random.default_rng(107)
    ok = True
    variant_deviations = 0
    for trial in range(100):
        d = int(rng.integers(2, 6))
        a = rand_frac_vec(rng, 6)
        tc = TraceCoeffs(
            tuple(rand_frac_vec(rng, 3)),
            tuple(rand_frac_vec(rng, 3)),
            tuple(rand_frac_vec(rng, 3)),
        )
        probe = build_gamma(a, tc, d)
        closed = gamma_closed_form(a, tc, d)
        if not all(probe[i, j] == closed[i, j] for i in range(3) for j in range(3)):
            ok = False
        variant = _gamma_variant(a, tc, d)
        diff = probe - variant
        if any(diff[i, j] != 0 for i in range(3) for j in range(3)):
            variant_deviations += 1
            # documented deviation pattern: confined to the pure-coefficient
            # pairs (independent of the nine trace coefficients and of d)
            tc2 = TraceCoeffs(
                tuple(rand_frac_vec(rng, 3)),
                tuple(rand_frac_vec(rng, 3)),
                tuple(rand_frac_vec(rng, 3)),
            )
            diff2 = build_gamma(a, tc2, d) - _gamma_variant(a, tc2, d)
            if not all(diff[i, j] == diff2[i, j] for i in range(3) for j in range(3)):
                ok = False
            # both tables share row sums, so each deviation row sums to zero
            if any(sum(diff[i, :]) != 0 for i in range(3)):
                ok = False
    report(
        7,
        ok and variant_deviations > 0,
        "probe gamma == validated closed form exactly on 100 rational sets; "
        f"variant table deviated on {variant_deviations} (deviation confined to "
        "pure-coefficient pairs, as documented)",
    )


def test_criterion_8_oracle_equivalence():
    rng = np.random.default_rng(108)
    worst = 0.0
    for d in (2, 3):
        done = 0
        while done < 50:
            a = rng.standard_normal(6)
            if degeneracy_report(a).singular:
                continue
            B = rng.standard_normal((d, d, d))
            direct = solve_rank3(a, B)
            oracle = brute_force(a, B)
            worst = max(worst, float(np.max(np.abs(direct.N - oracle.N))))
            done += 1
    report(8, worst <= 1e-10, f"100 instances at d=2,3: max solver-vs-oracle gap {worst:.3e}")


def test_criterion_9_zero_input_law():
    rng = np.random.default_rng(109)
    d = 3
    zero = np.zeros((d, d, d))
    a = rng.standard_normal(6)
    while degeneracy_report(a).singular:
        a = rng.standard_normal(6)
    M = rng.standard_normal((d, d))
    metric = Metric(M @ M.T + d * np.eye(d))
    tc = TraceCoeffs(*(0.2 * rng.standard_normal((3, 3))))
    a24 = np.zeros(24)
    a24[0], a24[3] = 1.5, 0.25
    # compatible coefficients for the reduced path
    C = np.stack([fold_defect(e, (1, 2), 1) for e in np.eye(6)], axis=1)
    a_sym = a - C.T @ np.linalg.pinv(C @ C.T) @ (C @ a)
    outputs = [
        solve_rank3(a, zero).N,
        solve_rankn(a24, np.zeros((2,) * 4)).N,
        solve_with_traces(a, tc, zero, metric).N,
        solve_reduced(a_sym, zero, (1, 2), 1).N,
        brute_force(a, zero).N,
    ]
    ok = all(np.count_nonzero(np.asarray(N, dtype=float)) == 0 for N in outputs)
    report(9, ok, "zero source returns exactly zero N through every path")


def test_criterion_10_cli_end_to_end(tmp_path):
    rng = np.random.default_rng(110)
    d = 3
    fixtures = {}
    B = rng.standard_normal((d, d, d))
    fixtures["plain"] = {
        "rank": 3,
        "dimension": d,
        "coefficients": [1.0, 0.25, -0.5, 0.125, 0.0, 2.0],
        "B": {"rank": 3, "dim": d, "values": [float(v) for v in B.ravel()]},
    }
    B_sym = symmetrize(rng.standard_normal((d, d, d)), (1, 2), 1)
    fixtures["reduced"] = {
        "rank": 3,
        "dimension": d,
        "coefficients": [0.0, 1.0, 1.0, 0.0, 0.0, 0.0],
        "symmetry": {"pair": [2, 3], "sign": 1},
        "B": {"rank": 3, "dim": d, "values": [float(v) for v in B_sym.ravel()]},
    }
    M = rng.standard_normal((d, d))
    g = M @ M.T + d * np.eye(d)
    fixtures["traced"] = {
        "rank": 3,
        "dimension": d,
        "mode": "traced",
        "coefficients": [1.0, 0.25, -0.5, 0.125, 0.0, 2.0],
        "trace_coefficients": {
            "a7": [0.1, -0.2, 0.3],
            "a8": [0.0, 0.4, -0.1],
            "a9": [0.2, 0.0, 0.1],
        },
        "metric": [[float(v) for v in row] for row in g],
        "B": {"rank": 3, "dim": d, "values": [float(v) for v in B.ravel()]},
    }
    coeffs4 = [0.0] * 24
    coeffs4[0], coeffs4[9], coeffs4[16] = 2.0, -0.5, 0.25
    B4 = rng.standard_normal((d,) * 4)
    fixtures["rank4"] = {
        "rank": 4,
        "dimension": d,
        "coefficients": coeffs4,
        "B": {"rank": 4, "dim": d, "values": [float(v) for v in B4.ravel()]},
    }
    fixtures["rational"] = {
        "rank": 3,
        "dimension": 2,
        "arithmetic": "rational",
        "coefficients": ["1/2", 1, 0, "-1/3", 0, 2],
        "B": {"rank": 3, "dim": 2, "values": ["1/8", 0, 1, "3/4", "-2/5", 1, 0, "7/3"]},
    }
    ok = True
    details = []
    for name, obj in fixtures.items():
        prob = tmp_path / f"{name}.json"
        prob.write_text(dump_json(obj), encoding="utf-8")
        out1 = tmp_path / f"{name}.sol1.json"
        out2 = tmp_path / f"{name}.sol2.json"
        code_solve = main(["solve", "-i", str(prob), "-o", str(out1)])
        code_again = main(["solve", "-i", str(prob), "-o", str(out2)])
        code_verify = main(["verify", "-i", str(prob), "-s", str(out1)])
        identical = out1.read_bytes() == out2.read_bytes()
        ok = ok and code_solve == 0 and code_again == 0 and code_verify == 0 and identical
        details.append(f"{name}:{'ok' if code_solve == code_verify == 0 and identical else 'FAIL'}")
    report(10, ok, "solve->verify round trips exit 0, byte-identical reruns (" + ", ".join(details) + ")")
