"""JSON encodings of matrices and operator fields.

Matrix object: ``{"dim": n, "re": [[...]], "im": [[...]]}``; ``"im"`` is
optional. Rectangular matrices (Kraus factors) drop ``"dim"`` and are sized
by ``"re"``.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import DimensionError, ParseError


def matrix_from_json(obj: dict, square: bool = True) -> np.ndarray:
    if not isinstance(obj, dict) or "re" not in obj:
        raise ParseError("matrix object needs an 're' entry")
    try:
        re = np.array(obj["re"], dtype=float)
        im = np.array(obj["im"], dtype=float) if obj.get("im") is not None else None
    except (TypeError, ValueError) as exc:
        raise ParseError(f"matrix entries must be numbers: {exc}") from None
    if re.ndim != 2:
        raise DimensionError(f"'re' must be a 2-D array, got {re.ndim}-D")
    if im is not None and im.shape != re.shape:
        raise DimensionError(f"'im' shape {im.shape} differs from 're' shape {re.shape}")
    if square:
        n = obj.get("dim", re.shape[0])
        if re.shape != (n, n):
            raise DimensionError(f"declared dim {n} but entries have shape {re.shape}")
    return re if im is None or not np.any(im) else re + 1j * im


def matrix_to_json(M, precision: int | None = None) -> dict:
    M = np.atleast_2d(np.asarray(M))
    re, im = M.real, M.imag if np.iscomplexobj(M) else None

    def rows(a):
        if precision is not None:
            a = np.round(a, precision) + 0.0  # drop negative zeros
        return [[float(x) for x in row] for row in a]

    out: dict = {}
    if M.shape[0] == M.shape[1]:
        out["dim"] = int(M.shape[0])
    out["re"] = rows(re)
    if im is not None and np.any(im):
        out["im"] = rows(im)
    return out


def field_from_json(items: list):
    from .maps import OperatorField

    if not isinstance(items, list) or not items:
        raise ParseError("a field is a non-empty array of {weight, matrix} objects")
    try:
        return OperatorField.from_pairs((float(it["weight"]), matrix_from_json(it["matrix"])) for it in items)
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed field entry: {exc}") from None


def field_to_json(F, precision: int | None = None) -> list:
    return [{"weight": w, "matrix": matrix_to_json(A, precision)} for w, A in F]


def load_json(path) -> object:
    text = Path(path).read_text(encoding="utf-8")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc.msg} (line {exc.lineno}, column {exc.colno})", exc.pos) from None


def load_matrix(path) -> np.ndarray:
    return matrix_from_json(load_json(path))


def save_matrix(path, M, precision: int | None = None) -> None:
    Path(path).write_text(json.dumps(matrix_to_json(M, precision)), encoding="utf-8")
