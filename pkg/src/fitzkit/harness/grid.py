"""Tabulation of ``phi_T``, ``c`` and the gap over a window of ``Z = R^2``."""
from __future__ import annotations

from typing import Iterator, Sequence, TextIO

import numpy as np

from ..core import DEFAULT_TOL, DimensionError, TolerancePolicy, format_xreal
from ..fitz import fitzpatrick_many
from ..opmodel import OperatorGraph

__all__ = ["grid_rows", "grid_dump", "GRID_HEADER"]

GRID_HEADER = "x,xstar,phi,c,gap"


def grid_rows(T: OperatorGraph, window: Sequence[float], resolution: int,
              tol: TolerancePolicy = DEFAULT_TOL) -> Iterator[tuple]:
    """Yield ``(x, xstar, phi, c, gap)`` with ``x`` in the outer loop.

    ``window`` is ``(xmin, xmax, ymin, ymax)``; each axis gets ``resolution``
    equally spaced nodes including the endpoints.
    """
    if T.n != 1:
        raise DimensionError(f"grid dumps need a one-dimensional operator, got n={T.n}")
    if resolution < 1:
        raise ValueError("resolution must be positive")
    xmin, xmax, ymin, ymax = window
    xs = np.linspace(xmin, xmax, resolution)
    ys = np.linspace(ymin, ymax, resolution)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    Z = np.column_stack([X.ravel(), Y.ravel()])
    phi = fitzpatrick_many(T, Z, tol)
    c = Z[:, 0] * Z[:, 1]
    for (x, y), f, cz in zip(Z.tolist(), phi.tolist(), c.tolist()):
        yield x, y, f, cz, f - cz


def grid_dump(T: OperatorGraph, window: Sequence[float], resolution: int, out: TextIO,
              tol: TolerancePolicy = DEFAULT_TOL) -> int:
    """Write the grid as CSV (header plus one row per node); returns the row count."""
    out.write(GRID_HEADER + "\n")
    k = 0
    for row in grid_rows(T, window, resolution, tol):
        out.write(",".join(format_xreal(v) for v in row) + "\n")
        k += 1
    return k
