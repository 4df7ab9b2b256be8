"""Discrete Legendre-Fenchel conjugation on 1-D and 2-D grids.

``fast_conjugate`` is the linear-time transform: build the lower convex hull
of the finite samples (they arrive sorted), then sweep the sorted dual slopes
with a single pointer along the hull.  ``brute_conjugate`` is the O(N M)
reference and serves as the oracle in tests.

Nodes with value ``+inf`` are outside the domain and never attain the max.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .core import DEFAULT_TOL, INF, TolerancePolicy
from .fitz import SlackReport

__all__ = [
    "GridFunction",
    "brute_conjugate",
    "fast_conjugate",
    "biconjugate",
    "default_dual_coords",
    "fenchel_young_check",
    "fenchel_young_slacks",
    "is_discretely_convex",
    "lower_hull",
]


def _check_coords(c) -> np.ndarray:
    c = np.asarray(c, dtype=float)
    if c.ndim != 1 or c.size < 1:
        raise ValueError("grid coordinates must be a non-empty 1-D sequence")
    if not np.all(np.isfinite(c)):
        raise ValueError("grid coordinates must be finite")
    if np.any(np.diff(c) <= 0):
        raise ValueError("grid coordinates must be strictly increasing")
    return c


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Values of a proper function on a tensor grid (1-D or 2-D)."""

    coords: Tuple[np.ndarray, ...]
    values: np.ndarray

    def __init__(self, coords, values):
        if isinstance(coords, np.ndarray) and coords.ndim == 1:
            coords = (coords,)
        elif not isinstance(coords, (tuple, list)) or not coords or np.ndim(coords[0]) == 0:
            coords = (coords,)
        coords = tuple(_check_coords(c) for c in coords)
        if len(coords) > 2:
            raise ValueError("only 1-D and 2-D grids are supported")
        values = np.asarray(values, dtype=float).reshape(tuple(len(c) for c in coords))
        if np.any(np.isnan(values)) or np.any(values == -INF):
            raise ValueError("grid values must be real or +inf")
        if not np.any(np.isfinite(values)):
            raise ValueError("improper grid function: every value is +inf")
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "values", values)

    @property
    def ndim(self) -> int:
        return len(self.coords)

    @classmethod
    def sample(cls, func, *coords) -> "GridFunction":
        mesh = np.meshgrid(*[np.asarray(c, dtype=float) for c in coords], indexing="ij")
        return cls(tuple(coords), func(*mesh))


def _as_dual(f: GridFunction, dual_coords) -> Tuple[np.ndarray, ...]:
    if dual_coords is None:
        return default_dual_coords(f)
    if f.ndim == 1 and (isinstance(dual_coords, np.ndarray) and dual_coords.ndim == 1
                        or np.ndim(dual_coords[0]) == 0):
        dual_coords = (dual_coords,)
    dual = tuple(np.asarray(d, dtype=float) for d in dual_coords)
    if len(dual) != f.ndim:
        raise ValueError("dual grid dimension does not match the function")
    return dual


def _slope_range(x: np.ndarray, v: np.ndarray, axis: int) -> Tuple[float, float]:
    with np.errstate(invalid="ignore"):
        dv = np.diff(v, axis=axis)
    dx = np.diff(x).reshape([-1 if i == axis else 1 for i in range(v.ndim)])
    with np.errstate(invalid="ignore"):
        slopes = dv / dx
    slopes = slopes[np.isfinite(slopes)]
    if slopes.size == 0:
        return -1.0, 1.0
    lo, hi = float(slopes.min()), float(slopes.max())
    w = hi - lo
    if w == 0:
        return lo - 1.0, hi + 1.0
    return lo - 0.05 * w, hi + 0.05 * w


def default_dual_coords(f: GridFunction) -> Tuple[np.ndarray, ...]:
    """Slopes spanning the finite-difference slope range, widened by 10%, one per primal node."""
    out = []
    for axis, x in enumerate(f.coords):
        lo, hi = _slope_range(x, f.values, axis)
        out.append(np.linspace(lo, hi, len(x)))
    return tuple(out)


# ---------------------------------------------------------------------------
# brute force

def _brute_1d(x, v, s):
    fin = np.isfinite(v)
    return np.max(s[:, None] * x[None, fin] - v[None, fin], axis=1)


def brute_conjugate(f: GridFunction, dual_coords=None) -> GridFunction:
    """``f*(s) = max_x <x, s> - f(x)`` over the grid, by enumeration."""
    dual = _as_dual(f, dual_coords)
    if f.ndim == 1:
        return GridFunction(dual, _brute_1d(f.coords[0], f.values, dual[0]))
    x1, x2 = f.coords
    s1, s2 = dual
    v = f.values
    fin = np.isfinite(v)
    inner = s2[None, :, None] * x2[None, None, :] - np.where(fin, v, INF)[:, None, :]
    # inner[i, j2, k] = s2_j2 x2_k - f(x1_i, x2_k)
    total = s1[:, None, None, None] * x1[None, None, :, None] + inner.transpose(1, 0, 2)[None]
    return GridFunction(dual, total.max(axis=(2, 3)))


# ---------------------------------------------------------------------------
# linear-time transform

def lower_hull(x: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Indices of the lower convex hull of points ``(x_i, v_i)`` with sorted ``x``."""
    hull: List[int] = []
    for i in range(len(x)):
        while len(hull) >= 2:
            a, b = hull[-2], hull[-1]
            # drop b unless it lies strictly below the chord a -> i
            if (v[b] - v[a]) * (x[i] - x[a]) >= (v[i] - v[a]) * (x[b] - x[a]):
                hull.pop()
            else:
                break
        hull.append(i)
    return np.array(hull, dtype=int)


def _fast_1d(x, v, s):
    fin = np.isfinite(v)
    if not np.any(fin):
        return np.full(len(s), -INF)
    xf, vf = x[fin], v[fin]
    h = lower_hull(xf, vf)
    hx, hv = xf[h], vf[h]
    order = np.argsort(s, kind="stable")
    out = np.empty(len(s))
    k = 0
    last = len(h) - 1
    for idx in order:
        si = s[idx]
        cur = si * hx[k] - hv[k]
        while k < last:
            nxt = si * hx[k + 1] - hv[k + 1]
            if nxt >= cur:
                k += 1
                cur = nxt
            else:
                break
        out[idx] = cur
    return out


def fast_conjugate(f: GridFunction, dual_coords=None) -> GridFunction:
    """Discrete conjugate in O(N + M) per 1-D pass; 2-D grids are done axis by axis."""
    dual = _as_dual(f, dual_coords)
    if f.ndim == 1:
        return GridFunction(dual, _fast_1d(f.coords[0], f.values, dual[0]))
    x1, x2 = f.coords
    s1, s2 = dual
    # g[i, j] = max_k s2_j x2_k - f(x1_i, x2_k)
    g = np.array([_fast_1d(x2, row, s2) for row in f.values])
    h = np.where(np.isfinite(g), -g, INF)
    out = np.array([_fast_1d(x1, h[:, j], s1) for j in range(len(s2))]).T
    return GridFunction(dual, out)


def biconjugate(f: GridFunction, dual_coords=None) -> GridFunction:
    """``f**`` on the primal grid, going through ``dual_coords`` (default grid if omitted).

    For a fixed dual grid the result is idempotent.
    """
    dual = _as_dual(f, dual_coords)
    fstar = fast_conjugate(f, dual)
    return fast_conjugate(fstar, f.coords)


# ---------------------------------------------------------------------------
# checks

def _value_at(g: GridFunction, idx) -> float:
    return float(g.values[idx])


def _point_at(g: GridFunction, idx) -> np.ndarray:
    idx = (idx,) if np.ndim(idx) == 0 else tuple(idx)
    return np.array([c[i] for c, i in zip(g.coords, idx)])


def fenchel_young_check(f: GridFunction, fstar: GridFunction, samples: Iterable,
                        tol: TolerancePolicy = DEFAULT_TOL) -> List[SlackReport]:
    """Reports for ``<x, s> <= f(x) + f*(s)`` at the given ``(x_index, s_index)`` pairs."""
    reports = []
    for xi, si in samples:
        xi_t = (xi,) if np.ndim(xi) == 0 else tuple(xi)
        si_t = (si,) if np.ndim(si) == 0 else tuple(si)
        lhs = float(_point_at(f, xi_t) @ _point_at(fstar, si_t))
        rhs = _value_at(f, xi_t) + _value_at(fstar, si_t)
        rep = SlackReport.build(lhs, rhs, tol, "fenchel-young")
        rep.passed = rep.slack >= -tol.tol_exact
        reports.append(rep)
    return reports


def fenchel_young_slacks(f: GridFunction, fstar: GridFunction, rng: np.random.Generator,
                         count: int) -> np.ndarray:
    """Vectorised Fenchel-Young slacks at ``count`` random finite node pairs."""
    fin = np.argwhere(np.isfinite(f.values))
    xi = fin[rng.integers(len(fin), size=count)]
    si = np.column_stack([rng.integers(len(c), size=count) for c in fstar.coords])
    X = np.column_stack([c[xi[:, a]] for a, c in enumerate(f.coords)])
    S = np.column_stack([c[si[:, a]] for a, c in enumerate(fstar.coords)])
    fv = f.values[tuple(xi.T)]
    sv = fstar.values[tuple(si.T)]
    return fv + sv - np.einsum("ij,ij->i", X, S)


def is_discretely_convex(g: GridFunction, tol: float = DEFAULT_TOL.tol_exact) -> bool:
    """Finite-difference slopes are nondecreasing along every axis (finite nodes only)."""
    for axis, x in enumerate(g.coords):
        v = np.moveaxis(g.values, axis, 0)
        for line in v.reshape(len(x), -1).T:
            fin = np.isfinite(line)
            xs, ls = x[fin], line[fin]
            if len(xs) < 3:
                continue
            sl = np.diff(ls) / np.diff(xs)
            scale = 1.0 + np.abs(sl[:-1]) + np.abs(sl[1:])
            if np.any(np.diff(sl) < -tol * scale):
                return False
    return True
