"""Problem files: JSON in, validated witness records out.

See ``docs/format.md`` for the schema. Numbers may be given as JSON numbers
or as strings holding fractions (``"2/3"``); complex entries as ``[re, im]``
pairs or as text like ``"0.5-1i"``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

import numpy as np

from .bounds import MeasureSpec, SearchOptions, WitnessRecord
from .legendre import ProjectorWitness, SolverOptions
from .measures import EntanglementOfFormation, GeometricMeasure, LogBase
from .qla import PureState
from .states import named_state

SOLVER_KEYS = {"restarts": int, "tol": float, "max_iters": int, "seed": int, "log_floor": float}
SEARCH_KEYS = {"compact": bool, "max_slope": float, "box": float, "widen": float, "max_widen": float,
               "grid": int, "xtol": float, "tol": float, "max_passes": int}


class ProblemError(ValueError):
    """Invalid problem file; ``path`` names the offending field."""

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


def _number(value, path) -> float:
    if isinstance(value, bool):
        raise ProblemError(path, "expected a number, got a boolean")
    if isinstance(value, (int, float)):
        out = float(value)
    elif isinstance(value, str):
        try:
            out = float(Fraction(value.strip()))
        except (ValueError, ZeroDivisionError):
            raise ProblemError(path, f"cannot read {value!r} as a number") from None
    else:
        raise ProblemError(path, f"expected a number, got {type(value).__name__}")
    if not math.isfinite(out):
        raise ProblemError(path, "number must be finite")
    return out


def _complex(value, path) -> complex:
    if isinstance(value, list):
        if len(value) != 2:
            raise ProblemError(path, "complex entries are [re, im] pairs")
        return complex(_number(value[0], path + "[0]"), _number(value[1], path + "[1]"))
    if isinstance(value, str):
        text = value.strip().replace(" ", "").replace("i", "j")
        if "j" not in text:
            return complex(_number(value, path), 0.0)
        try:
            return complex(text)
        except ValueError:
            raise ProblemError(path, f"cannot read {value!r} as a complex number") from None
    return complex(_number(value, path), 0.0)


def _pair(z: complex) -> list:
    return [float(z.real), float(z.imag)]


def _amplitudes(value, dims, path) -> tuple[list, PureState]:
    if isinstance(value, dict):
        if set(value) != {"named"}:
            raise ProblemError(path, "state objects need exactly the key 'named'")
        name = value["named"]
        try:
            psi = named_state(name, len(dims))
        except ValueError as exc:
            raise ProblemError(path + ".named", str(exc)) from None
        if psi.dims != tuple(dims):
            raise ProblemError(path + ".named", f"state {name!r} has dims {psi.dims}, problem has {tuple(dims)}")
        return {"named": name}, psi
    if not isinstance(value, list):
        raise ProblemError(path, "expected an amplitude list or {\"named\": ...}")
    amps = [_complex(a, f"{path}[{i}]") for i, a in enumerate(value)]
    if len(amps) != int(np.prod(dims)):
        raise ProblemError(path, f"{len(amps)} amplitudes for dims {list(dims)}")
    try:
        psi = PureState.from_amplitudes(amps, dims)
    except ValueError as exc:
        raise ProblemError(path, str(exc)) from None
    return [_pair(a) for a in psi.amplitudes], psi


@dataclass
class Problem:
    """Validated problem; ``data`` is the canonical JSON-ready form."""

    data: dict
    dims: tuple
    records: list
    measure_spec: MeasureSpec
    search: SearchOptions = field(default_factory=SearchOptions)

    def canonical(self) -> str:
        return dump_canonical(self.data)

    def with_seed(self, seed) -> "Problem":
        data = json.loads(json.dumps(self.data))
        data.setdefault("solver", {})["seed"] = int(seed)
        return parse_problem(data)


def _check_keys(obj, allowed, path, required=()):
    if not isinstance(obj, dict):
        raise ProblemError(path, "expected an object")
    for key in obj:
        if key not in allowed:
            raise ProblemError(f"{path}.{key}" if path else key, "unknown field")
    for key in required:
        if key not in obj:
            raise ProblemError(f"{path}.{key}" if path else key, "missing required field")


def _parse_witness(w, dims, path):
    _check_keys(w, {"label", "matrix", "projector", "measured", "stderr"}, path, ("measured",))
    out = {"label": str(w.get("label", path)), "measured": _number(w["measured"], path + ".measured")}
    out["stderr"] = _number(w.get("stderr", 0.0), path + ".stderr")
    if out["stderr"] < 0:
        raise ProblemError(path + ".stderr", "must be nonnegative")
    d = int(np.prod(dims))
    if ("matrix" in w) == ("projector" in w):
        raise ProblemError(path, "give exactly one of 'matrix' or 'projector'")
    projector = None
    if "matrix" in w:
        rows = w["matrix"]
        if not isinstance(rows, list) or len(rows) != d:
            raise ProblemError(path + ".matrix", f"expected {d} rows")
        m = np.empty((d, d), dtype=complex)
        for i, row in enumerate(rows):
            if not isinstance(row, list) or len(row) != d:
                raise ProblemError(f"{path}.matrix[{i}]", f"expected {d} entries")
            for j, entry in enumerate(row):
                m[i, j] = _complex(entry, f"{path}.matrix[{i}][{j}]")
        out["matrix"] = [[_pair(z) for z in row] for row in m]
    else:
        p = w["projector"]
        _check_keys(p, {"alpha", "chi", "eg_chi"}, path + ".projector", ("alpha", "chi"))
        alpha = _number(p["alpha"], path + ".projector.alpha")
        chi_data, chi = _amplitudes(p["chi"], dims, path + ".projector.chi")
        eg = None
        if p.get("eg_chi") is not None:
            eg = _number(p["eg_chi"], path + ".projector.eg_chi")
            if not 0 <= eg <= 1:
                raise ProblemError(path + ".projector.eg_chi", "must lie in [0, 1]")
        out["projector"] = {"alpha": alpha, "chi": chi_data, "eg_chi": eg}
        projector = ProjectorWitness(alpha, chi, eg)
        m = projector.operator()
    try:
        record = WitnessRecord(m, out["measured"], out["stderr"], out["label"], projector)
    except ValueError as exc:
        raise ProblemError(path, str(exc)) from None
    return out, record


def _parse_measure(m, dims):
    if not isinstance(m, dict) or len(m) != 1:
        raise ProblemError("measure", "expected {\"eof\": {...}} or {\"geometric\": {}}")
    (kind, opts), = m.items()
    opts = opts or {}
    if kind == "eof":
        _check_keys(opts, {"bipartition", "base"}, "measure.eof")
        left = opts.get("bipartition", [0])
        if (not isinstance(left, list) or not left
                or not all(isinstance(p, int) and not isinstance(p, bool) for p in left)):
            raise ProblemError("measure.eof.bipartition", "expected a nonempty list of party indices")
        if any(p < 0 or p >= len(dims) for p in left) or len(set(left)) >= len(dims):
            raise ProblemError("measure.eof.bipartition", f"not a proper party subset of {len(dims)} parties")
        try:
            base = LogBase(opts.get("base", "natural"))
        except ValueError:
            raise ProblemError("measure.eof.base", "expected 'natural' or 'two'") from None
        return {"eof": {"bipartition": sorted(set(left)), "base": base.value}}, EntanglementOfFormation(tuple(left), base)
    if kind == "geometric":
        _check_keys(opts, {"restarts"}, "measure.geometric")
        data = {}
        measure = GeometricMeasure()
        if "restarts" in opts:
            data["restarts"] = _typed(opts["restarts"], int, "measure.geometric.restarts")
            measure = GeometricMeasure(restarts=data["restarts"])
        return {"geometric": data}, measure
    raise ProblemError("measure", f"unknown measure {kind!r}")


def _typed(value, kind, path):
    if kind is bool:
        if not isinstance(value, bool):
            raise ProblemError(path, "expected true or false")
        return value
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ProblemError(path, "expected an integer")
        return value
    return _number(value, path)


def _options(obj, keys, path):
    _check_keys(obj, set(keys), path)
    return {k: _typed(v, keys[k], f"{path}.{k}") for k, v in sorted(obj.items())}


def parse_problem(raw: Any) -> Problem:
    """Validate a decoded JSON object and build the problem."""
    _check_keys(raw, {"dims", "witnesses", "measure", "solver", "search"}, "", ("dims",))
    dims = raw["dims"]
    if (not isinstance(dims, list) or not dims
            or not all(isinstance(x, int) and not isinstance(x, bool) and x >= 2 for x in dims)):
        raise ProblemError("dims", "expected a nonempty list of integers >= 2")
    if int(np.prod(dims)) > 64:
        raise ProblemError("dims", "total dimension above 64 is not supported")
    _check_keys(raw, raw.keys(), "", ("witnesses", "measure"))
    wits = raw["witnesses"]
    if not isinstance(wits, list) or not 1 <= len(wits) <= 4:
        raise ProblemError("witnesses", "expected a list of 1 to 4 witnesses")
    data = {"dims": list(dims), "witnesses": []}
    records = []
    for i, w in enumerate(wits):
        out, rec = _parse_witness(w, dims, f"witnesses[{i}]")
        data["witnesses"].append(out)
        records.append(rec)
    data["measure"], measure = _parse_measure(raw["measure"], dims)
    solver = _options(raw.get("solver", {}), SOLVER_KEYS, "solver")
    search = _options(raw.get("search", {}), SEARCH_KEYS, "search")
    data["solver"], data["search"] = solver, search
    try:
        opts = SolverOptions(**solver)
        search_opts = SearchOptions(**search)
    except ValueError as exc:
        raise ProblemError("solver", str(exc)) from None
    if isinstance(measure, GeometricMeasure):
        measure = GeometricMeasure(restarts=measure.restarts, seed=opts.seed)
    return Problem(data, tuple(dims), records, MeasureSpec(measure, opts), search_opts)


def load_problem(path) -> Problem:
    text = Path(path).read_text()
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemError(f"line {exc.lineno}, column {exc.colno}", exc.msg) from None
    return parse_problem(raw)


def _canon(obj) -> str:
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        # -0.0 would print as "-0" and re-read as the integer 0
        return format(obj + 0.0, ".17g")
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(_canon(x) for x in obj) + "]"
    if isinstance(obj, dict):
        return "{" + ",".join(f"{json.dumps(str(k))}:{_canon(obj[k])}" for k in sorted(obj)) + "}"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dump_canonical(data) -> str:
    """Sorted keys, no whitespace, floats with 17 significant digits."""
    return _canon(data)
