"""JSON problem files and angle literals.

A problem file is one UTF-8 JSON object::

    {"dim": 2,
     "rho":   [[[re, im], [re, im]], [[re, im], [re, im]]],
     "drho1": ...,
     "drho2": ...}

Matrices are row-major lists of rows; each entry is a ``[re, im]`` pair.
"""
import json
import math
import re
from typing import Union

import numpy as np

from .errors import DimensionError, ValidationError
from .model import EstimationProblem

MATRIX_FIELDS = ("rho", "drho1", "drho2")

_ANGLE = re.compile(
    r"^\s*(?P<coef>[+-]?(?:\d+(?:\.\d*)?|\.\d+)?)\s*\*?\s*pi\s*(?:/\s*(?P<den>\d+(?:\.\d*)?))?\s*$"
)


def parse_angle(text: Union[str, float]) -> float:
    """Radians from a number or a ``pi`` literal such as ``pi/4``, ``-3pi/4``, ``2*pi/3``."""
    if not isinstance(text, str):
        return float(text)
    m = _ANGLE.match(text.lower())
    if m:
        coef = m.group("coef")
        c = 1.0 if coef in ("", "+") else -1.0 if coef == "-" else float(coef)
        den = float(m.group("den")) if m.group("den") else 1.0
        if den == 0.0:
            raise ValidationError(f"angle {text!r} divides by zero")
        return c * math.pi / den
    try:
        return float(text)
    except ValueError:
        raise ValidationError(f"cannot parse angle {text!r}; use radians or a literal like 'pi/4'") from None


def _matrix(obj, field: str, dim: int):
    try:
        arr = np.asarray(obj, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"field {field!r}: entries must be [re, im] number pairs ({exc})") from None
    if arr.shape != (dim, dim, 2):
        raise DimensionError(f"field {field!r}: expected shape ({dim}, {dim}, 2), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"field {field!r}: entries must be finite")
    return arr[..., 0] + 1j * arr[..., 1]


def problem_from_dict(data: dict) -> EstimationProblem:
    if not isinstance(data, dict):
        raise ValidationError("problem file must hold one JSON object")
    missing = [k for k in ("dim",) + MATRIX_FIELDS if k not in data]
    if missing:
        raise ValidationError(f"problem file is missing fields {missing}")
    dim = data["dim"]
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 2:
        raise ValidationError(f"field 'dim' must be an integer >= 2, got {dim!r}")
    rho, d1, d2 = (_matrix(data[k], k, dim) for k in MATRIX_FIELDS)
    try:
        return EstimationProblem(rho, (d1, d2))
    except ValidationError as exc:
        raise type(exc)(f"invalid problem: {exc}") from None


def load_problem(path) -> EstimationProblem:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ValidationError(f"cannot read problem file {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ValidationError(f"problem file {path} is not valid JSON: {exc}") from None
    return problem_from_dict(data)


def _pairs(m):
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def problem_to_dict(problem: EstimationProblem) -> dict:
    return {
        "dim": problem.dim,
        "rho": _pairs(problem.rho),
        "drho1": _pairs(problem.drho[0]),
        "drho2": _pairs(problem.drho[1]),
    }


def dump_problem(problem: EstimationProblem, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(problem_to_dict(problem), fh, indent=1)
        fh.write("\n")
