"""Reading, validating, and writing problem and solution JSON.

Every validation failure names the exact field path that was malformed
(``"coefficients[3]"``, ``"trace_coefficients.a8[1]"``), so callers can fix
inputs without guessing.  Tensors travel as flat row-major value lists with
explicit rank and dimension; permutation slots and symmetry pairs are 1-based
on disk and 0-based in memory.

Rational mode is an explicit flag (``"arithmetic": "rational"``); values are
then integers or strings like ``"2/3"``, never JSON floats.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .coeffmat import DegeneracyReport
from .perms import canonical_order, perm_to_1based
from .solver import Solution
from .tensors import FLOAT_MODE, RATIONAL_MODE, Metric, TraceCoeffs


class ProblemFormatError(ValueError):
    """Malformed input; ``path`` names the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


def _require(obj: dict, key: str, path: str):
    if key not in obj:
        raise ProblemFormatError(f"{path}{key}" if path else key, "missing required field")
    return obj[key]


def _parse_scalar(value, path: str, arithmetic: str):
    if isinstance(value, bool):
        raise ProblemFormatError(path, "expected a number, got a boolean")
    if arithmetic == RATIONAL_MODE:
        if isinstance(value, int):
            return Fraction(value)
        if isinstance(value, str):
            try:
                return Fraction(value)
            except (ValueError, ZeroDivisionError):
                raise ProblemFormatError(path, f"not a valid fraction string: {value!r}") from None
        raise ProblemFormatError(
            path, "rational mode takes integers or strings like \"2/3\", not floats"
        )
    if isinstance(value, (int, float)):
        v = float(value)
        if not math.isfinite(v):
            raise ProblemFormatError(path, "value must be finite")
        return v
    raise ProblemFormatError(path, f"expected a number, got {type(value).__name__}")


def _parse_scalar_list(values, path: str, length: int, arithmetic: str) -> list:
    if not isinstance(values, list):
        raise ProblemFormatError(path, f"expected a list, got {type(values).__name__}")
    if len(values) != length:
        raise ProblemFormatError(path, f"expected {length} entries, got {len(values)}")
    return [_parse_scalar(v, f"{path}[{i}]", arithmetic) for i, v in enumerate(values)]


def _as_array(values: list, shape, arithmetic: str) -> np.ndarray:
    if arithmetic == RATIONAL_MODE:
        out = np.empty(len(values), dtype=object)
        out[:] = values
        return out.reshape(shape)
    return np.asarray(values, dtype=float).reshape(shape)


def parse_tensor(obj, path: str, arithmetic: str, rank: int | None = None,
                 dim: int | None = None) -> np.ndarray:
    if not isinstance(obj, dict):
        raise ProblemFormatError(path, "expected a tensor object {rank, dim, values}")
    n = _require(obj, "rank", f"{path}.")
    d = _require(obj, "dim", f"{path}.")
    if not isinstance(n, int) or n < 1:
        raise ProblemFormatError(f"{path}.rank", f"expected a positive integer, got {n!r}")
    if not isinstance(d, int) or d < 1:
        raise ProblemFormatError(f"{path}.dim", f"expected a positive integer, got {d!r}")
    if rank is not None and n != rank:
        raise ProblemFormatError(f"{path}.rank", f"expected rank {rank}, got {n}")
    if dim is not None and d != dim:
        raise ProblemFormatError(f"{path}.dim", f"expected dimension {dim}, got {d}")
    values = _parse_scalar_list(_require(obj, "values", f"{path}."), f"{path}.values", d**n, arithmetic)
    return _as_array(values, (d,) * n, arithmetic)


def _parse_metric(obj, path: str, dim: int, arithmetic: str) -> Metric:
    if not isinstance(obj, list) or len(obj) != dim:
        raise ProblemFormatError(path, f"expected a {dim}x{dim} nested array")
    rows = [_parse_scalar_list(row, f"{path}[{i}]", dim, arithmetic) for i, row in enumerate(obj)]
    g = _as_array([v for row in rows for v in row], (dim, dim), arithmetic)
    try:
        return Metric(g)
    except ValueError as exc:
        raise ProblemFormatError(path, str(exc)) from None


def _parse_trace_coeffs(obj, path: str, arithmetic: str) -> TraceCoeffs:
    if not isinstance(obj, dict):
        raise ProblemFormatError(path, "expected an object with fields a7, a8, a9")
    rows = {}
    for name in ("a7", "a8", "a9"):
        rows[name] = tuple(
            _parse_scalar_list(_require(obj, name, f"{path}."), f"{path}.{name}", 3, arithmetic)
        )
    return TraceCoeffs(rows["a7"], rows["a8"], rows["a9"])


def _parse_symmetry(obj, path: str):
    if not isinstance(obj, dict):
        raise ProblemFormatError(path, "expected an object {pair, sign}")
    pair = _require(obj, "pair", f"{path}.")
    if (
        not isinstance(pair, list)
        or len(pair) != 2
        or not all(isinstance(v, int) and 1 <= v <= 3 for v in pair)
        or pair[0] == pair[1]
    ):
        raise ProblemFormatError(f"{path}.pair", "expected two distinct 1-based slots among 1..3")
    sign = _require(obj, "sign", f"{path}.")
    if sign not in (1, -1):
        raise ProblemFormatError(f"{path}.sign", f"expected 1 or -1, got {sign!r}")
    return (pair[0] - 1, pair[1] - 1), sign


@dataclass
class Problem:
    """A fully validated problem instance."""

    rank: int
    dim: int
    mode: str  # "plain" | "traced"
    arithmetic: str  # "float" | "rational"
    coefficients: np.ndarray
    trace_coeffs: TraceCoeffs | None
    metric: Metric | None
    tensors: list[np.ndarray]  # the B tensors; singular problems still parse
    is_batch: bool
    symmetry: tuple | None  # ((i, j) 0-based, sign) or None


def parse_problem(obj, require_b: bool = True) -> Problem:
    if not isinstance(obj, dict):
        raise ProblemFormatError("$", "problem file must contain a JSON object")
    rank = _require(obj, "rank", "")
    if not isinstance(rank, int) or rank < 1:
        raise ProblemFormatError("rank", f"expected a positive integer, got {rank!r}")
    dim = _require(obj, "dimension", "")
    if not isinstance(dim, int) or dim < 1:
        raise ProblemFormatError("dimension", f"expected a positive integer, got {dim!r}")
    arithmetic = obj.get("arithmetic", FLOAT_MODE)
    if arithmetic not in (FLOAT_MODE, RATIONAL_MODE):
        raise ProblemFormatError("arithmetic", f"expected 'float' or 'rational', got {arithmetic!r}")
    mode = obj.get("mode", "plain")
    if mode not in ("plain", "traced"):
        raise ProblemFormatError("mode", f"expected 'plain' or 'traced', got {mode!r}")
    coeffs = _as_array(
        _parse_scalar_list(
            _require(obj, "coefficients", ""), "coefficients", math.factorial(rank), arithmetic
        ),
        (math.factorial(rank),),
        arithmetic,
    )
    trace_coeffs = None
    metric = None
    if mode == "traced":
        if rank != 3:
            raise ProblemFormatError("mode", "traced mode requires rank 3")
        trace_coeffs = _parse_trace_coeffs(
            _require(obj, "trace_coefficients", ""), "trace_coefficients", arithmetic
        )
        metric = _parse_metric(_require(obj, "metric", ""), "metric", dim, arithmetic)
    elif "trace_coefficients" in obj:
        raise ProblemFormatError("trace_coefficients", "only allowed in traced mode")
    elif "metric" in obj:
        raise ProblemFormatError("metric", "only allowed in traced mode")
    symmetry = None
    if "symmetry" in obj:
        if rank != 3:
            raise ProblemFormatError("symmetry", "symmetry reduction requires rank 3")
        if mode == "traced":
            raise ProblemFormatError("symmetry", "symmetry reduction and traced mode are exclusive")
        symmetry = _parse_symmetry(obj["symmetry"], "symmetry")
    tensors: list[np.ndarray] = []
    is_batch = False
    if "batch" in obj:
        if "B" in obj:
            raise ProblemFormatError("batch", "give either B or batch, not both")
        batch = obj["batch"]
        if not isinstance(batch, list) or not batch:
            raise ProblemFormatError("batch", "expected a non-empty list of tensor objects")
        tensors = [
            parse_tensor(t, f"batch[{i}]", arithmetic, rank=rank, dim=dim)
            for i, t in enumerate(batch)
        ]
        is_batch = True
    elif "B" in obj:
        tensors = [parse_tensor(obj["B"], "B", arithmetic, rank=rank, dim=dim)]
    elif require_b:
        raise ProblemFormatError("B", "missing required field (or provide batch)")
    return Problem(
        rank=rank,
        dim=dim,
        mode=mode,
        arithmetic=arithmetic,
        coefficients=coeffs,
        trace_coeffs=trace_coeffs,
        metric=metric,
        tensors=tensors,
        is_batch=is_batch,
        symmetry=symmetry,
    )


def load_json(path) -> object:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ProblemFormatError(str(path), f"cannot read file: {exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemFormatError(str(path), f"not valid JSON: {exc}") from None


def load_problem(path, require_b: bool = True) -> Problem:
    return parse_problem(load_json(path), require_b=require_b)


# ---------------------------------------------------------------------------
# serialization


def scalar_out(value):
    """JSON form of a scalar: floats stay floats (shortest round-trip repr),
    Fractions become exact strings."""
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    return float(value)


def tensor_to_obj(T: np.ndarray) -> dict:
    return {
        "rank": int(T.ndim),
        "dim": int(T.shape[0]) if T.ndim else 0,
        "values": [scalar_out(v) for v in T.ravel()],
    }


def degeneracy_to_obj(report: DegeneracyReport) -> dict:
    return report.to_json_obj(scalar_out)


def arrangements_out(rank: int, count: int | None = None) -> list[list[int]]:
    """The canonical arrangement enumeration as 1-based image arrays, so
    serialized coefficient and weight vectors are self-describing."""
    order = canonical_order(rank)
    if count is not None:
        order = order[:count]
    return [perm_to_1based(p) for p in order]


def solution_to_obj(sol: Solution) -> dict:
    rank = int(sol.N.ndim)
    obj = {
        "N": tensor_to_obj(sol.N),
        "inverse_first_row": None
        if sol.inverse_first_row is None
        else [scalar_out(v) for v in sol.inverse_first_row],
        "arrangements": arrangements_out(
            rank, None if sol.inverse_first_row is None else len(sol.inverse_first_row)
        ),
        "residual_inf": scalar_out(sol.residual_inf),
        "degeneracy": degeneracy_to_obj(sol.degeneracy),
        "path": sol.path,
    }
    if sol.operator_nullity is not None:
        obj["operator_nullity"] = sol.operator_nullity
    if sol.rank_exceeds_dim:
        obj["rank_exceeds_dim"] = True
    return obj


def parse_solution_tensors(obj, path: str, arithmetic: str, rank: int, dim: int) -> list[np.ndarray]:
    """Extract the solved tensor(s) from a solution file (single or batch)."""
    if not isinstance(obj, dict):
        raise ProblemFormatError(path, "solution file must contain a JSON object")
    if "solutions" in obj:
        sols = obj["solutions"]
        if not isinstance(sols, list):
            raise ProblemFormatError(f"{path}solutions", "expected a list")
        return [
            parse_tensor(_require(s, "N", f"{path}solutions[{i}]."),
                         f"{path}solutions[{i}].N", arithmetic, rank=rank, dim=dim)
            for i, s in enumerate(sols)
        ]
    return [parse_tensor(_require(obj, "N", path), f"{path}N", arithmetic, rank=rank, dim=dim)]


def dump_json(obj) -> str:
    """Deterministic serialization: fixed key order, two-space indent,
    shortest round-trip float repr, trailing newline."""
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def write_json(path, obj) -> None:
    Path(path).write_text(dump_json(obj), encoding="utf-8")
