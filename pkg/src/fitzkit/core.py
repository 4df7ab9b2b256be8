"""Paired points, the coupling, extended reals and the tolerance policy.

A point of ``Z = R^n x R^n`` is stored as a :class:`PairedPoint`.  Internally
most kernels work on flat ``(..., 2n)`` arrays laid out as ``[x, xstar]``;
the helpers :func:`coupling_flat` and :func:`pair_dot_flat` operate on those.

Extended reals are plain Python floats that may be ``+inf`` or ``-inf``.
Arithmetic that could combine opposite infinities goes through :func:`xadd`,
which raises :class:`IndeterminateError` instead of producing ``nan``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence, Union

import numpy as np

__all__ = [
    "PairedPoint",
    "pp",
    "TolerancePolicy",
    "DEFAULT_TOL",
    "WeightedNorm",
    "IndeterminateError",
    "DimensionError",
    "ExtendedReal",
    "xadd",
    "xscale",
    "coupling",
    "pair_dot",
    "weighted_norm",
    "coupling_flat",
    "pair_dot_flat",
    "swap_flat",
    "format_xreal",
    "parse_xreal",
]

ExtendedReal = float
INF = math.inf


class IndeterminateError(ArithmeticError):
    """Raised when an expression would evaluate ``(+inf) + (-inf)``."""


class DimensionError(ValueError):
    """Operands live in spaces of different dimension."""


@dataclass(frozen=True)
class TolerancePolicy:
    """Numerical thresholds shared by every comparison in the package.

    Attributes
    ----------
    tol_exact : float
        Threshold for closed-form comparisons and sign classification.
    tol_iter : float
        Threshold for results of iterative solvers (projections, bisection).
    tol_slack : float
        Smallest admissible negative slack for an inequality to pass.
    bisect_width : float
        Final bracket width of the boundary-point bisection.
    """

    tol_exact: float = 1e-9
    tol_iter: float = 1e-7
    tol_slack: float = 1e-8
    bisect_width: float = 1e-12

    def __post_init__(self):
        for name in ("tol_exact", "tol_iter", "tol_slack", "bisect_width"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"{name} must be a positive finite number, got {value!r}")

    def with_(self, **changes) -> "TolerancePolicy":
        return replace(self, **changes)


DEFAULT_TOL = TolerancePolicy()


@dataclass(frozen=True)
class WeightedNorm:
    """The pair norm ``sqrt(delta*|x|^2 + |xstar|^2/delta)``."""

    delta: float = 1.0

    def __post_init__(self):
        if not (self.delta > 0 and math.isfinite(self.delta)):
            raise ValueError(f"delta must be positive and finite, got {self.delta!r}")

    def weights(self, n: int) -> np.ndarray:
        """Per-coordinate squared-norm weights for a flat ``2n`` vector."""
        return np.concatenate([np.full(n, self.delta), np.full(n, 1.0 / self.delta)])


def _as_vector(v, name: str) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(v, dtype=float))
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    return arr


@dataclass(frozen=True, eq=False)
class PairedPoint:
    """An element ``(x, xstar)`` of ``R^n x R^n``.

    Supports ``+``, ``-``, negation and multiplication by a real scalar, so
    expressions like ``z + t * p`` read naturally.
    """

    x: np.ndarray
    xstar: np.ndarray = field(repr=True)

    def __post_init__(self):
        x = _as_vector(self.x, "x")
        xs = _as_vector(self.xstar, "xstar")
        if x.shape != xs.shape:
            raise DimensionError(f"x has length {x.size} but xstar has length {xs.size}")
        if x.size < 1:
            raise ValueError("paired points need n >= 1")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(xs))):
            raise ValueError("paired point coordinates must be finite")
        x = x.copy()
        xs = xs.copy()
        x.flags.writeable = False
        xs.flags.writeable = False
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "xstar", xs)

    @property
    def n(self) -> int:
        return self.x.size

    @property
    def flat(self) -> np.ndarray:
        return np.concatenate([self.x, self.xstar])

    @classmethod
    def from_flat(cls, v) -> "PairedPoint":
        v = _as_vector(v, "flat vector")
        if v.size % 2:
            raise DimensionError(f"flat paired vector must have even length, got {v.size}")
        n = v.size // 2
        return cls(v[:n], v[n:])

    @classmethod
    def zeros(cls, n: int) -> "PairedPoint":
        return cls(np.zeros(n), np.zeros(n))

    def _check(self, other: "PairedPoint"):
        if not isinstance(other, PairedPoint):
            return NotImplemented
        if other.n != self.n:
            raise DimensionError(f"dimension mismatch: {self.n} vs {other.n}")
        return None

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return PairedPoint(self.x + other.x, self.xstar + other.xstar)

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return PairedPoint(self.x - other.x, self.xstar - other.xstar)

    def __neg__(self):
        return PairedPoint(-self.x, -self.xstar)

    def __mul__(self, scalar):
        if not np.isscalar(scalar):
            return NotImplemented
        return PairedPoint(scalar * self.x, scalar * self.xstar)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, PairedPoint):
            return NotImplemented
        return bool(np.array_equal(self.x, other.x) and np.array_equal(self.xstar, other.xstar))

    def __hash__(self):
        return hash((self.x.tobytes(), self.xstar.tobytes()))

    def allclose(self, other: "PairedPoint", atol: float = 1e-9) -> bool:
        return self.n == other.n and bool(np.allclose(self.flat, other.flat, rtol=0, atol=atol))

    def to_json(self) -> dict:
        return {"x": self.x.tolist(), "xstar": self.xstar.tolist()}


def pp(x: Union[float, Sequence[float]], xstar: Union[float, Sequence[float]]) -> PairedPoint:
    """Shorthand constructor: ``pp(1, 2)`` or ``pp([1, 2], [3, 4])``."""
    return PairedPoint(x, xstar)


# ---------------------------------------------------------------------------
# flat-array kernels

def coupling_flat(v: np.ndarray) -> np.ndarray:
    """``<x, xstar>`` along the last axis of a ``(..., 2n)`` array."""
    v = np.asarray(v, dtype=float)
    n = v.shape[-1] // 2
    return np.einsum("...i,...i->...", v[..., :n], v[..., n:])


def pair_dot_flat(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """``<u.x, v.xstar> + <v.x, u.xstar>`` along the last axis (broadcasting)."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape[-1] != v.shape[-1]:
        raise DimensionError(f"dimension mismatch: {u.shape[-1]} vs {v.shape[-1]}")
    n = u.shape[-1] // 2
    return (np.einsum("...i,...i->...", u[..., :n], v[..., n:])
            + np.einsum("...i,...i->...", v[..., :n], u[..., n:]))


def swap_flat(v: np.ndarray) -> np.ndarray:
    """Exchange the primal and dual halves, so ``pair_dot(u, v) == u @ swap(v)``."""
    v = np.asarray(v, dtype=float)
    n = v.shape[-1] // 2
    return np.concatenate([v[..., n:], v[..., :n]], axis=-1)


# ---------------------------------------------------------------------------
# public scalar operations

def coupling(z: PairedPoint) -> float:
    """The coupling ``c(z) = <x, xstar>``."""
    return float(np.dot(z.x, z.xstar))


def pair_dot(z: PairedPoint, w: PairedPoint) -> float:
    """The self-duality product ``z.w = <z.x, w.xstar> + <w.x, z.xstar>``."""
    if z.n != w.n:
        raise DimensionError(f"dimension mismatch: {z.n} vs {w.n}")
    return float(np.dot(z.x, w.xstar) + np.dot(w.x, z.xstar))


def weighted_norm(z: PairedPoint, norm: WeightedNorm = WeightedNorm()) -> float:
    d = norm.delta
    return math.sqrt(d * float(np.dot(z.x, z.x)) + float(np.dot(z.xstar, z.xstar)) / d)


# ---------------------------------------------------------------------------
# extended reals

def xadd(*terms: float) -> float:
    """Sum extended reals, refusing to combine ``+inf`` with ``-inf``."""
    pos = any(t == INF for t in terms)
    neg = any(t == -INF for t in terms)
    if pos and neg:
        raise IndeterminateError("(+inf) + (-inf) is undefined")
    if pos:
        return INF
    if neg:
        return -INF
    return float(math.fsum(terms))


def xscale(t: float, v: float) -> float:
    """``t * v`` for ``t >= 0`` with the convex-analysis convention ``0 * inf = 0``."""
    if t < 0:
        raise ValueError("xscale expects a nonnegative factor")
    if t == 0:
        return 0.0
    return t * v


def format_xreal(v: float) -> str:
    """Shortest round-tripping text for an extended real (``inf``/``-inf``)."""
    if v == INF:
        return "inf"
    if v == -INF:
        return "-inf"
    if math.isnan(v):
        raise ValueError("nan is not an extended real")
    text = repr(float(v) + 0.0)
    return text[:-2] if text.endswith(".0") else text


def parse_xreal(s: str) -> float:
    s = s.strip()
    if s in ("inf", "+inf"):
        return INF
    if s == "-inf":
        return -INF
    v = float(s)
    if math.isnan(v):
        raise ValueError("nan is not an extended real")
    return v


def check_same_dim(points: Iterable[PairedPoint]) -> int:
    dims = {p.n for p in points}
    if len(dims) != 1:
        raise DimensionError(f"mixed dimensions {sorted(dims)}")
    return dims.pop()
