"""Operator description files (JSON, schema version 1), hull files, and grid CSV."""
from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Any, List, TextIO, Union

import numpy as np

from ..conjugate import GridFunction
from ..core import DEFAULT_TOL, PairedPoint, TolerancePolicy, format_xreal, parse_xreal
from ..hull import HullGenerators
from ..opmodel import (
    CubicOperator,
    LinearMonotoneOperator,
    LinePiece,
    NotMonotoneError,
    OperatorGraph,
    PointPiece,
    PolygonalOperator,
    RayPiece,
    SegmentPiece,
)

__all__ = [
    "OperatorFileError",
    "SCHEMA_VERSION",
    "load_operator",
    "parse_operator",
    "operator_to_json",
    "dump_operator",
    "load_hull",
    "write_grid_csv",
    "read_grid_csv",
]

SCHEMA_VERSION = 1
KINDS = ("polygonal", "linear", "cubic1d")


class OperatorFileError(ValueError):
    """Malformed operator file; the message names the line or field path."""


def _fail(path: str, msg: str):
    raise OperatorFileError(f"{path}: {msg}")


def _vector(obj: Any, path: str, n: int) -> np.ndarray:
    if not isinstance(obj, list) or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj):
        _fail(path, "expected an array of numbers")
    arr = np.array(obj, dtype=float)
    if arr.shape != (n,):
        _fail(path, f"expected {n} numbers, got {len(obj)}")
    if not np.all(np.isfinite(arr)):
        _fail(path, "numbers must be finite")
    return arr


def _point(obj: Any, path: str, n: int) -> PairedPoint:
    if not isinstance(obj, dict):
        _fail(path, "expected an object with 'x' and 'xstar'")
    for key in ("x", "xstar"):
        if key not in obj:
            _fail(f"{path}.{key}", "missing field")
    return PairedPoint(_vector(obj["x"], f"{path}.x", n), _vector(obj["xstar"], f"{path}.xstar", n))


def _piece(obj: Any, path: str, n: int):
    if not isinstance(obj, dict) or "type" not in obj:
        _fail(path, "expected an object with a 'type' field")
    kind = obj["type"]
    try:
        if kind == "point":
            return PointPiece(_point(obj.get("point"), f"{path}.point", n))
        if kind == "segment":
            return SegmentPiece(_point(obj.get("a"), f"{path}.a", n), _point(obj.get("b"), f"{path}.b", n))
        if kind in ("ray", "line"):
            cls = RayPiece if kind == "ray" else LinePiece
            return cls(_point(obj.get("base"), f"{path}.base", n), _point(obj.get("dir"), f"{path}.dir", n))
    except OperatorFileError:
        raise
    except ValueError as exc:
        _fail(path, str(exc))
    _fail(f"{path}.type", f"unknown piece type {kind!r}")


def parse_operator(obj: Any, tol: TolerancePolicy = DEFAULT_TOL) -> OperatorGraph:
    """Build an operator from decoded JSON."""
    if not isinstance(obj, dict):
        _fail("$", "top level must be an object")
    if obj.get("schema_version") != SCHEMA_VERSION:
        _fail("$.schema_version", f"expected {SCHEMA_VERSION}, got {obj.get('schema_version')!r}")
    kind = obj.get("kind")
    if kind not in KINDS:
        _fail("$.kind", f"expected one of {KINDS}, got {kind!r}")
    n = obj.get("dimension")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        _fail("$.dimension", f"expected a positive integer, got {n!r}")
    if kind == "cubic1d":
        if n != 1:
            _fail("$.dimension", "cubic1d operators are one-dimensional")
        return CubicOperator()
    if kind == "linear":
        rows = obj.get("A")
        if not isinstance(rows, list) or len(rows) != n:
            _fail("$.A", f"expected {n} rows")
        A = np.array([_vector(r, f"$.A[{i}]", n) for i, r in enumerate(rows)])
        b = _vector(obj.get("b", [0.0] * n), "$.b", n)
        try:
            return LinearMonotoneOperator(A, b, tol)
        except NotMonotoneError as exc:
            _fail("$.A", f"not monotone: minimum eigenvalue of the symmetric part is {exc.min_eigenvalue:.6g}")
    pieces = obj.get("pieces")
    if not isinstance(pieces, list) or not pieces:
        _fail("$.pieces", "expected a non-empty array")
    return PolygonalOperator([_piece(p, f"$.pieces[{i}]", n) for i, p in enumerate(pieces)])


def load_operator(path: Union[str, Path], tol: TolerancePolicy = DEFAULT_TOL) -> OperatorGraph:
    """Read an operator description file.

    Raises
    ------
    OperatorFileError
        On malformed JSON (with line and column) or invalid content (with the
        JSON path of the offending field).
    """
    text = Path(path).read_text()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise OperatorFileError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    try:
        return parse_operator(obj, tol)
    except OperatorFileError as exc:
        raise OperatorFileError(f"{path}: {exc}") from None


def _pt(p: PairedPoint) -> dict:
    return p.to_json()


def operator_to_json(T: OperatorGraph) -> dict:
    if isinstance(T, CubicOperator):
        return {"schema_version": SCHEMA_VERSION, "kind": "cubic1d", "dimension": 1}
    if isinstance(T, LinearMonotoneOperator):
        return {"schema_version": SCHEMA_VERSION, "kind": "linear", "dimension": T.n,
                "A": T.A.tolist(), "b": T.b.tolist()}
    pieces = []
    for p in T.pieces:
        if p.kind == "point":
            pieces.append({"type": "point", "point": _pt(p.z)})
        elif p.kind == "segment":
            pieces.append({"type": "segment", "a": _pt(p.a), "b": _pt(p.b)})
        else:
            pieces.append({"type": p.kind, "base": _pt(p.base), "dir": _pt(p.dir)})
    return {"schema_version": SCHEMA_VERSION, "kind": "polygonal", "dimension": T.n, "pieces": pieces}


def dump_operator(T: OperatorGraph, path: Union[str, Path]) -> None:
    Path(path).write_text(json.dumps(operator_to_json(T), indent=2) + "\n")


def load_hull(path: Union[str, Path]) -> HullGenerators:
    """Hull file: ``{"points": [[...], ...], "rays": [[...], ...]}``."""
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise OperatorFileError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    if not isinstance(obj, dict) or "points" not in obj:
        raise OperatorFileError(f"{path}: $.points: missing field")
    try:
        return HullGenerators.from_json(obj)
    except ValueError as exc:
        raise OperatorFileError(f"{path}: {exc}") from None


# ---------------------------------------------------------------------------
# grid CSV

def write_grid_csv(f: GridFunction, out: TextIO) -> None:
    """Header ``x,value`` (1-D) or ``x,y,value`` (2-D); rows in row-major order, LF endings."""
    if f.ndim == 1:
        out.write("x,value\n")
        for x, v in zip(f.coords[0], f.values):
            out.write(f"{format_xreal(x)},{format_xreal(v)}\n")
        return
    out.write("x,y,value\n")
    x1, x2 = f.coords
    for i, a in enumerate(x1):
        for j, b in enumerate(x2):
            out.write(f"{format_xreal(a)},{format_xreal(b)},{format_xreal(f.values[i, j])}\n")


def read_grid_csv(src: TextIO) -> GridFunction:
    reader = csv.reader(src)
    header = next(reader, None)
    if header not in (["x", "value"], ["x", "y", "value"]):
        raise ValueError(f"unexpected grid CSV header {header!r}")
    rows = [[parse_xreal(c) for c in row] for row in reader if row]
    if not rows:
        raise ValueError("grid CSV has no data rows")
    arr = np.array(rows)
    if len(header) == 2:
        return GridFunction(arr[:, 0], arr[:, 1])
    x1 = np.unique(arr[:, 0])
    x2 = np.unique(arr[:, 1])
    if len(arr) != len(x1) * len(x2):
        raise ValueError("2-D grid CSV is not a full tensor grid")
    vals = np.empty((len(x1), len(x2)))
    vals[np.searchsorted(x1, arr[:, 0]), np.searchsorted(x2, arr[:, 1])] = arr[:, 2]
    return GridFunction((x1, x2), vals)
