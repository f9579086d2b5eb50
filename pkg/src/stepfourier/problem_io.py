"""Problem documents (JSON) in, solution fields (CSV, gnuplot) out.

A problem document looks like::

    {
      "l": 3.141592653589793,
      "T": 6.283185307179586,
      "time_partition": [0, 3.141592653589793, 6.283185307179586],
      "space_partition": [-3.141592653589793, 3.141592653589793],
      "order": 2,
      "coefficients": [[[0, 0, 1]], [[0, 0, 0.5]]],
      "initial": {"half_c0": 0.0, "modes": [{"k": 1, "c": 0, "d": 1}]},
      "settings": {"grid_nt": 21, "grid_nx": 21},
      "comment": "free text"
    }

``coefficients[i][j][n]`` is ``A_n`` on time row i and space strip j.
Modes not listed are zero.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import jsonschema

from .errors import ProblemSyntaxError, ProblemValidationError
from .solver import Field, StepProblem, problem_violations
from .spectral import MAX_MODE, FourierState

__all__ = [
    "PROBLEM_SCHEMA",
    "Settings",
    "ProblemDocument",
    "parse_document",
    "parse_problem",
    "serialize_document",
    "serialize_problem",
    "format_number",
    "emit_csv",
    "emit_gnuplot",
]

_number = {"type": "number"}
_number_list = {"type": "array", "items": _number}

PROBLEM_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["l", "T", "time_partition", "space_partition", "order",
                 "coefficients", "initial"],
    "additionalProperties": False,
    "properties": {
        "l": _number,
        "T": _number,
        "time_partition": _number_list,
        "space_partition": _number_list,
        "order": {"type": "integer"},
        "coefficients": {
            "type": "array",
            "items": {"type": "array", "items": _number_list},
        },
        "initial": {
            "type": "object",
            "required": ["half_c0", "modes"],
            "additionalProperties": False,
            "properties": {
                "half_c0": _number,
                "modes": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "required": ["k", "c", "d"],
                        "additionalProperties": False,
                        "properties": {
                            "k": {"type": "integer", "minimum": 1},
                            "c": _number,
                            "d": _number,
                        },
                    },
                },
            },
        },
        "settings": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "truncation": {"type": "integer", "minimum": 1},
                "grid_nt": {"type": "integer", "minimum": 2},
                "grid_nx": {"type": "integer", "minimum": 2},
            },
        },
        "comment": {"type": "string"},
    },
}

_validator = jsonschema.Draft202012Validator(PROBLEM_SCHEMA)


@dataclass(frozen=True)
class Settings:
    truncation: Optional[int] = None
    grid_nt: Optional[int] = None
    grid_nx: Optional[int] = None


@dataclass(frozen=True)
class ProblemDocument:
    problem: StepProblem
    settings: Settings = field(default_factory=Settings)
    comment: Optional[str] = None


class _NonFinite:
    """Placeholder for NaN / Infinity literals so they can be reported by path."""

    def __init__(self, literal):
        self.literal = literal


def _path(parts) -> str:
    out = "$"
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else f".{p}"
    return out


def _scrub_non_finite(node, parts, found):
    """Replace non-finite numbers by 0 in place, recording where they were."""
    if isinstance(node, dict):
        items = node.items()
    elif isinstance(node, list):
        items = enumerate(node)
    else:
        return node
    for key, value in list(items):
        if isinstance(value, _NonFinite) or (
                isinstance(value, float) and not math.isfinite(value)):
            literal = value.literal if isinstance(value, _NonFinite) else repr(value)
            found.append(f"{_path(parts + [key])}: non-finite number {literal}")
            node[key] = 0.0
        else:
            _scrub_non_finite(value, parts + [key], found)
    return node


def _load_json(text):
    if isinstance(text, (bytes, bytearray)):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ProblemSyntaxError(f"document is not valid UTF-8: {exc}") from None
    if not text.strip():
        raise ProblemSyntaxError("empty document", 1, 1)
    try:
        return json.loads(text, parse_constant=_NonFinite)
    except json.JSONDecodeError as exc:
        raise ProblemSyntaxError(
            f"line {exc.lineno} column {exc.colno}: {exc.msg}", exc.lineno, exc.colno) from None
    except (ValueError, RecursionError) as exc:
        raise ProblemSyntaxError(f"malformed document: {exc}") from None


def _to_float(v):
    try:
        return float(v)
    except OverflowError:
        return math.inf


def _initial_state(initial, settings, errors) -> Optional[FourierState]:
    ks = [m["k"] for m in initial["modes"]]
    for idx in range(1, len(ks)):
        if not ks[idx] > ks[idx - 1]:
            errors.append(f"$.initial.modes[{idx}]: k not strictly increasing ({ks[idx]})")
    if any(k > MAX_MODE for k in ks):
        errors.append(f"$.initial.modes: k above the mode cap {MAX_MODE}")
        return None
    pairs = {m["k"]: (_to_float(m["c"]), _to_float(m["d"])) for m in initial["modes"]}
    highest = max((k for k, (c, d) in pairs.items() if c != 0.0 or d != 0.0), default=0)
    K = max(highest, 1)
    truncation = settings.get("truncation")
    if truncation is not None:
        if truncation < highest:
            errors.append(
                f"$.settings.truncation: {truncation} drops nonzero mode {highest}")
        elif truncation > MAX_MODE:
            errors.append(f"$.settings.truncation: {truncation} above the mode cap {MAX_MODE}")
        else:
            K = truncation
    modes = tuple(pairs.get(k, (0.0, 0.0)) for k in range(1, K + 1))
    try:
        return FourierState(_to_float(initial["half_c0"]), modes)
    except ValueError as exc:
        errors.append(f"$.initial: {exc}")
        return None


def parse_document(text) -> ProblemDocument:
    """Parse and fully validate a problem document.

    Raises
    ------
    ProblemSyntaxError
        The text is empty or not JSON.
    ProblemValidationError
        The JSON breaks the schema or the problem's invariants; every
        violation found is listed.
    """
    doc = _load_json(text)
    errors = []
    try:
        doc = _scrub_non_finite(doc, [], errors)
        schema_errors = [f"{_path(list(e.absolute_path))}: {e.message}"
                         for e in _validator.iter_errors(doc)]
    except RecursionError:
        raise ProblemSyntaxError("document nests too deeply") from None
    if schema_errors:
        raise ProblemValidationError(errors + sorted(schema_errors))

    settings = doc.get("settings", {})
    initial = _initial_state(doc["initial"], settings, errors)
    l, T = _to_float(doc["l"]), _to_float(doc["T"])
    tp = [_to_float(v) for v in doc["time_partition"]]
    sp = [_to_float(v) for v in doc["space_partition"]]
    coeffs = [[[_to_float(v) for v in cell] for cell in row] for row in doc["coefficients"]]
    order = int(doc["order"])
    if initial is not None:
        errors.extend(problem_violations(l, T, tp, sp, order, coeffs, initial))
    if errors:
        raise ProblemValidationError(errors)

    problem = StepProblem(l, T, tuple(tp), tuple(sp), order,
                          tuple(tuple(tuple(cell) for cell in row) for row in coeffs), initial)
    return ProblemDocument(
        problem,
        Settings(settings.get("truncation"), settings.get("grid_nt"), settings.get("grid_nx")),
        doc.get("comment"),
    )


def parse_problem(text) -> StepProblem:
    return parse_document(text).problem


def serialize_document(document: ProblemDocument) -> str:
    problem = document.problem
    out = problem.to_dict()
    settings = {
        "truncation": document.settings.truncation,
        "grid_nt": document.settings.grid_nt,
        "grid_nx": document.settings.grid_nx,
    }
    if problem.initial.K != max(problem.initial.highest_nonzero_mode(), 1):
        settings["truncation"] = problem.initial.K
    settings = {k: v for k, v in settings.items() if v is not None}
    if settings:
        out["settings"] = settings
    if document.comment is not None:
        out["comment"] = document.comment
    return _layout(out)


def _layout(doc: dict) -> str:
    """Pretty-print with one line per key and one line per coefficient time row."""
    def dump(v):
        return json.dumps(v, ensure_ascii=False, separators=(", ", ": "))

    lines = []
    for key, value in doc.items():
        if key == "coefficients":
            rows = ",\n".join(f"    {dump(row)}" for row in value)
            lines.append(f'  "coefficients": [\n{rows}\n  ]')
        else:
            lines.append(f"  {dump(key)}: {dump(value)}")
    return "{\n" + ",\n".join(lines) + "\n}\n"


def serialize_problem(problem: StepProblem) -> str:
    return serialize_document(ProblemDocument(problem))


def format_number(v: float) -> str:
    """Shortest decimal that reads back as the same double; ``5.0`` -> ``5``."""
    text = repr(float(v))
    return text[:-2] if text.endswith(".0") else text


def emit_csv(field: Field) -> str:
    lines = ["t,x,psi"]
    for a, t in enumerate(field.t_values):
        ts = format_number(t)
        for b, x in enumerate(field.x_values):
            psi = "NA" if field.absent[a, b] else format_number(field.values[a, b])
            lines.append(f"{ts},{format_number(x)},{psi}")
    return "\n".join(lines) + "\n"


def _gp_quote(text: str) -> str:
    # single-quoted gnuplot strings do no backquote substitution
    if "\n" in text or "\r" in text:
        raise ValueError("gnuplot strings cannot contain line breaks")
    return "'" + text.replace("'", "''") + "'"


def emit_gnuplot(field: Field, csv_path: str, time_interfaces=()) -> str:
    """Gnuplot script drawing the CSV written by :func:`emit_csv` as a surface.

    ``time_interfaces`` adds labelled grid lines on the t axis where the
    coefficients switch.
    """
    nt, nx = field.t_values.size, field.x_values.size
    if nt == 0 or nx == 0:
        raise ValueError("cannot plot an empty field")
    lines = [
        "# surface of psi(t, x); data rows are t,x,psi with NA for overflowing cells",
        "set encoding utf8",
        "set datafile separator ','",
        "set datafile missing 'NA'",
        f"set title {_gp_quote('psi(t,x) ' + field.provenance)}",
        "set xlabel 't'",
        "set ylabel 'x'",
        "set zlabel 'Ψ' rotate parallel",
        "set key off",
        "set hidden3d",
        "set ticslevel 0",
    ]
    for idx, t in enumerate(time_interfaces, start=1):
        lines.append(f"set xtics add ('t{idx}' {format_number(t)})")
    if time_interfaces:
        lines.append("set grid xtics")
    lines += [
        f"set dgrid3d {nt},{nx} splines",
        f"splot {_gp_quote(csv_path)} using 1:2:3 every ::1 with lines",
    ]
    return "\n".join(lines) + "\n"
