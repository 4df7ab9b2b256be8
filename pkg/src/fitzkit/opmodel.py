"""Exact representations of operator graphs in ``Z = R^n x R^n``.

Three families are supported:

* :class:`PolygonalOperator` -- a finite union of points, segments, rays and
  lines in ``Z``.  Every piece is parametrised as ``base + t * dir`` with
  ``t`` in an interval ``[lo, hi]`` (points use ``dir = 0`` and ``lo = hi = 0``).
* :class:`LinearMonotoneOperator` -- ``a -> A a + b`` with ``A + A^T`` positive
  semidefinite.
* :class:`CubicOperator` -- the one-dimensional curve ``{(a, a^3)}``.

Along a piece, both ``alpha -> z.alpha - c(alpha)`` and ``alpha -> c(z - alpha)``
are quadratics in the parameter, so their extrema are computed in closed form
by :func:`quad_sup`.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .core import (
    DEFAULT_TOL,
    INF,
    DimensionError,
    PairedPoint,
    TolerancePolicy,
    coupling_flat,
    pair_dot_flat,
)
from .hull import HullGenerators

__all__ = [
    "PointPiece",
    "SegmentPiece",
    "RayPiece",
    "LinePiece",
    "GraphPiece",
    "PolygonalOperator",
    "LinearMonotoneOperator",
    "CubicOperator",
    "OperatorGraph",
    "NotMonotoneError",
    "MonotonicityResult",
    "quad_sup",
    "quad_box_inf",
    "piece_sup_affine_quadratic",
    "piece_inf_coupling",
    "is_monotone",
    "domain_hull",
    "range_hull",
    "graph_hull",
    "affine_hull_basis",
    "affine_hull_residual",
    "operator_dim",
]


# ---------------------------------------------------------------------------
# pieces

class _Piece:
    kind = ""
    lo = 0.0
    hi = 0.0

    base: PairedPoint
    dir: PairedPoint

    @property
    def n(self) -> int:
        return self.base.n

    def at(self, t: float) -> PairedPoint:
        if not (self.lo <= t <= self.hi):
            raise ValueError(f"parameter {t} outside [{self.lo}, {self.hi}]")
        return PairedPoint.from_flat(self.base.flat + t * self.dir.flat)


@dataclass(frozen=True)
class PointPiece(_Piece):
    z: PairedPoint
    kind = "point"

    @property
    def base(self):
        return self.z

    @property
    def dir(self):
        return PairedPoint.zeros(self.z.n)


@dataclass(frozen=True)
class SegmentPiece(_Piece):
    """The segment ``[a, b]``; degenerate segments are rejected."""

    a: PairedPoint
    b: PairedPoint
    kind = "segment"
    hi = 1.0

    def __post_init__(self):
        if self.a.n != self.b.n:
            raise DimensionError("segment endpoints differ in dimension")
        if self.a == self.b:
            raise ValueError("segment endpoints coincide; use a PointPiece")

    @property
    def base(self):
        return self.a

    @property
    def dir(self):
        return self.b - self.a


@dataclass(frozen=True)
class RayPiece(_Piece):
    base: PairedPoint
    dir: PairedPoint
    kind = "ray"
    hi = INF

    def __post_init__(self):
        if self.base.n != self.dir.n:
            raise DimensionError("ray base and direction differ in dimension")
        if not np.any(self.dir.flat):
            raise ValueError("ray direction must be nonzero")


@dataclass(frozen=True)
class LinePiece(_Piece):
    base: PairedPoint
    dir: PairedPoint
    kind = "line"
    lo = -INF
    hi = INF

    def __post_init__(self):
        if self.base.n != self.dir.n:
            raise DimensionError("line base and direction differ in dimension")
        if not np.any(self.dir.flat):
            raise ValueError("line direction must be nonzero")


GraphPiece = Union[PointPiece, SegmentPiece, RayPiece, LinePiece]


# ---------------------------------------------------------------------------
# operators

class PolygonalOperator:
    """Finite union of graph pieces, stored as parameter arrays.

    ``bases`` and ``dirs`` have shape ``(k, 2n)``; ``lo`` and ``hi`` hold the
    parameter range of each piece.
    """

    def __init__(self, pieces: Sequence[GraphPiece]):
        pieces = tuple(pieces)
        if not pieces:
            raise ValueError("a polygonal operator needs at least one piece")
        dims = {p.n for p in pieces}
        if len(dims) != 1:
            raise DimensionError(f"pieces of mixed dimension {sorted(dims)}")
        self.pieces = pieces
        self.n = dims.pop()
        self.bases = np.array([p.base.flat for p in pieces])
        self.dirs = np.array([p.dir.flat for p in pieces])
        self.lo = np.array([p.lo for p in pieces], dtype=float)
        self.hi = np.array([p.hi for p in pieces], dtype=float)
        for arr in (self.bases, self.dirs, self.lo, self.hi):
            arr.flags.writeable = False

    def __len__(self):
        return len(self.pieces)

    def __repr__(self):
        kinds = ",".join(p.kind for p in self.pieces)
        return f"PolygonalOperator(n={self.n}, pieces=[{kinds}])"

    @classmethod
    def from_points(cls, points: Sequence[PairedPoint]) -> "PolygonalOperator":
        return cls([PointPiece(p) for p in points])


class NotMonotoneError(ValueError):
    def __init__(self, message: str, min_eigenvalue: float):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


class LinearMonotoneOperator:
    """The affine map ``a -> A a + b`` with positive semidefinite symmetric part.

    The eigendecomposition of ``A_s = (A + A^T)/2`` is cached at construction;
    eigenvalues within ``tol_exact`` of zero are clamped to zero.
    """

    def __init__(self, A, b=None, tol: TolerancePolicy = DEFAULT_TOL):
        A = np.atleast_2d(np.asarray(A, dtype=float))
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise DimensionError(f"A must be square, got shape {A.shape}")
        n = A.shape[0]
        b = np.zeros(n) if b is None else np.atleast_1d(np.asarray(b, dtype=float))
        if b.shape != (n,):
            raise DimensionError(f"b must have length {n}, got shape {b.shape}")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
            raise ValueError("A and b must be finite")
        sym = 0.5 * (A + A.T)
        evals, evecs = np.linalg.eigh(sym)
        if evals[0] < -tol.tol_exact:
            raise NotMonotoneError(
                f"symmetric part of A has negative eigenvalue {evals[0]:.6g}", float(evals[0]))
        evals = np.where(evals <= tol.tol_exact, 0.0, evals)
        rebuilt = (evecs * evals) @ evecs.T
        if np.max(np.abs(rebuilt - sym), initial=0.0) > tol.tol_exact * max(1.0, np.abs(sym).max()):
            # only reachable when clamping removed a non-negligible mass
            raise NotMonotoneError("eigendecomposition does not reproduce A_s", float(evals[0]))
        self.n = n
        self.A = A
        self.b = b
        self.A_sym = sym
        self.eigvals = evals
        self.eigvecs = evecs
        pos = evals > 0
        self.range_basis = evecs[:, pos]
        self.A_sym_pinv = (evecs[:, pos] / evals[pos]) @ evecs[:, pos].T
        for arr in (self.A, self.b, self.A_sym, self.eigvals, self.eigvecs,
                    self.range_basis, self.A_sym_pinv):
            arr.flags.writeable = False

    def __repr__(self):
        return f"LinearMonotoneOperator(n={self.n})"

    def apply(self, a) -> np.ndarray:
        return self.A @ np.asarray(a, dtype=float) + self.b

    def range_residual(self, u: np.ndarray) -> np.ndarray:
        """Norm of the component of ``u`` (rows) orthogonal to ``range(A_s)``."""
        u = np.atleast_2d(u)
        proj = (u @ self.range_basis) @ self.range_basis.T
        return np.linalg.norm(u - proj, axis=-1)


class CubicOperator:
    """The maximal monotone curve ``{(a, a^3) : a in R}``."""

    n = 1

    def __repr__(self):
        return "CubicOperator()"


OperatorGraph = Union[PolygonalOperator, LinearMonotoneOperator, CubicOperator]


def operator_dim(T: OperatorGraph) -> int:
    return T.n


# ---------------------------------------------------------------------------
# one-dimensional quadratic kernel

def quad_sup(a2, a1, a0, lo, hi, tol: float = DEFAULT_TOL.tol_exact):
    """Supremum of ``a0 + a1 t + a2 t^2`` over ``t in [lo, hi]`` (vectorised).

    ``lo`` may be ``-inf`` and ``hi`` may be ``+inf``.  On unbounded ranges a
    leading coefficient with ``|a2| <= tol`` is treated as exactly zero, and
    likewise a slope with ``|a1| <= tol`` once the quadratic is affine.

    Returns
    -------
    value : ndarray
        The supremum, possibly ``+inf``.
    argmax : ndarray
        A maximising parameter; ``nan`` where the supremum is infinite.
    """
    a2, a1, a0, lo, hi = (np.array(v, dtype=float) for v in np.broadcast_arrays(a2, a1, a0, lo, hi))
    lo_f = np.isfinite(lo)
    hi_f = np.isfinite(hi)
    bounded = lo_f & hi_f
    best = np.full(a0.shape, -INF)
    arg = np.zeros(a0.shape)

    def consider(mask, t):
        v = a0 + t * (a1 + a2 * t)
        upd = mask & (v > best)
        best[upd] = v[upd]
        arg[upd] = t[upd]

    consider(lo_f, np.where(lo_f, lo, 0.0))
    consider(hi_f, np.where(hi_f, hi, 0.0))
    concave = (a2 < 0) & (bounded | (a2 < -tol))
    safe = np.where(concave, a2, -1.0)
    tc = np.clip(np.where(concave, -a1 / (2.0 * safe), 0.0), lo, hi)
    consider(concave, tc)
    consider(~lo_f & ~hi_f & ~concave, np.zeros(a0.shape))

    flat = np.abs(a2) <= tol
    up = ~hi_f & ((a2 > tol) | (flat & (a1 > tol)))
    down = ~lo_f & ((a2 > tol) | (flat & (a1 < -tol)))
    unb = up | down
    best[unb] = INF
    arg[unb] = np.nan
    return best, arg


def _escape_param(a2, a1, a0, lo, hi, target, tol):
    """A parameter where the quadratic exceeds ``target`` (sup is +inf)."""
    flat = abs(a2) <= tol
    up = not math.isfinite(hi) and (a2 > tol or (flat and a1 > tol))
    sign = 1.0 if up else -1.0
    start = lo if up and math.isfinite(lo) else (hi if not up and math.isfinite(hi) else 0.0)
    step = 1.0
    for _ in range(2000):
        t = start + sign * step
        if a0 + t * (a1 + a2 * t) > target:
            return t
        step *= 2.0
    raise RuntimeError("could not escape along an unbounded piece")


# ---------------------------------------------------------------------------
# per-piece evaluation

def _check_piece_dim(piece: GraphPiece, z: PairedPoint):
    if piece.n != z.n:
        raise DimensionError(f"piece has dimension {piece.n}, point has {z.n}")


def _sup_coeffs(bases, dirs, Z):
    """Coefficients of ``t -> pair_dot(z, b + t d) - c(b + t d)``; rows of Z vs pieces."""
    a2 = -coupling_flat(dirs)
    a1 = pair_dot_flat(Z[:, None, :] - bases[None, :, :], dirs[None, :, :])
    a0 = pair_dot_flat(Z[:, None, :], bases[None, :, :]) - coupling_flat(bases)[None, :]
    return a2, a1, a0


def _inf_coeffs(bases, dirs, Z):
    """Coefficients of ``t -> c(z - b - t d)``; rows of Z vs pieces."""
    diff = Z[:, None, :] - bases[None, :, :]
    b2 = coupling_flat(dirs)
    b1 = -pair_dot_flat(diff, dirs[None, :, :])
    b0 = coupling_flat(diff)
    return b2, b1, b0


def piece_sup_affine_quadratic(piece: GraphPiece, z: PairedPoint,
                               tol: TolerancePolicy = DEFAULT_TOL) -> float:
    """``sup { z.alpha - c(alpha) : alpha in piece }``."""
    _check_piece_dim(piece, z)
    a2, a1, a0 = _sup_coeffs(piece.base.flat[None], piece.dir.flat[None], z.flat[None])
    val, _ = quad_sup(a2, a1, a0, piece.lo, piece.hi, tol.tol_exact)
    return float(val[0, 0])


def piece_inf_coupling(piece: GraphPiece, z: PairedPoint,
                       tol: TolerancePolicy = DEFAULT_TOL) -> float:
    """``inf { c(z - alpha) : alpha in piece }``."""
    _check_piece_dim(piece, z)
    b2, b1, b0 = _inf_coeffs(piece.base.flat[None], piece.dir.flat[None], z.flat[None])
    val, _ = quad_sup(-b2, -b1, -b0, piece.lo, piece.hi, tol.tol_exact)
    return -float(val[0, 0])


def polygonal_sup(T: PolygonalOperator, Z: np.ndarray, tol: float):
    """Vectorised ``max_k sup_piece_k`` for rows of ``Z``; also returns argmax data."""
    a2, a1, a0 = _sup_coeffs(T.bases, T.dirs, Z)
    val, arg = quad_sup(a2, a1, a0, T.lo, T.hi, tol)
    return val, arg


def polygonal_inf_coupling(T: PolygonalOperator, Z: np.ndarray, tol: float):
    b2, b1, b0 = _inf_coeffs(T.bases, T.dirs, Z)
    val, arg = quad_sup(-b2, -b1, -b0, T.lo, T.hi, tol)
    return -val, arg, (b2, b1, b0)


def piece_argmin_coupling(T: PolygonalOperator, z: np.ndarray, k: int, tol: float,
                          target: float = -1.0) -> np.ndarray:
    """A point of piece ``k`` nearly minimising ``c(z - alpha)``.

    If the infimum is ``-inf`` the returned point has ``c(z - alpha) < target``.
    """
    vals, arg, (b2, b1, b0) = polygonal_inf_coupling(T, z[None], tol)
    t = arg[0, k]
    if not np.isfinite(t):
        t = _escape_param(-b2[k], -b1[0, k], -b0[0, k], T.lo[k], T.hi[k], -target, tol)
    return T.bases[k] + t * T.dirs[k]


# ---------------------------------------------------------------------------
# two-variable quadratic minimisation over a (possibly unbounded) box

def _box_generators(lo, hi):
    gens = []
    for i in range(len(lo)):
        e = np.zeros(len(lo))
        e[i] = 1.0
        if not math.isfinite(hi[i]):
            gens.append(e)
        if not math.isfinite(lo[i]):
            gens.append(-e)
    return gens


def _base_corners(lo, hi):
    opts = []
    for l, h in zip(lo, hi):
        if math.isfinite(l) and math.isfinite(h):
            opts.append((l, h) if h != l else (l,))
        elif math.isfinite(l):
            opts.append((l,))
        elif math.isfinite(h):
            opts.append((h,))
        else:
            opts.append((0.0,))
    return [np.array(c, dtype=float) for c in itertools.product(*opts)]


def quad_box_inf(Q, L, c0, lo, hi, tol: float = DEFAULT_TOL.tol_exact, f=None):
    """Infimum of ``x^T Q x + L.x + c0`` over the box ``lo <= x <= hi`` (dim <= 2).

    Bounds may be infinite.  Unboundedness below is decided exactly by a
    recession analysis of ``Q`` on the box's recession cone; otherwise the
    minimum is attained and found by enumerating stationary points of every
    face.  ``f`` optionally overrides the evaluation of the objective.

    Returns ``(value, x)``.  When the value is ``-inf``, ``x`` is a finite
    point with objective below ``-1``.
    """
    Q = np.atleast_2d(np.asarray(Q, dtype=float))
    L = np.atleast_1d(np.asarray(L, dtype=float))
    lo = np.atleast_1d(np.asarray(lo, dtype=float))
    hi = np.atleast_1d(np.asarray(hi, dtype=float))
    k = len(L)
    if k > 2:
        raise ValueError("quad_box_inf supports at most two variables")
    if f is None:
        def f(x):
            return float(x @ Q @ x + L @ x + c0)

    def escape(x0, d):
        lam = 1.0
        for _ in range(2000):
            x = x0 + lam * d
            if f(x) < -1.0:
                return -INF, x
            lam *= 2.0
        raise RuntimeError("failed to certify an unbounded direction")

    gens = _box_generators(lo, hi)
    corners = _base_corners(lo, hi)
    if gens:
        zero_dirs = []
        for g in gens:
            gq = g @ Q @ g
            if gq < -tol:
                return escape(corners[0], g)
            if abs(gq) <= tol:
                zero_dirs.append(g)
        for g1, g2 in itertools.combinations(gens, 2):
            if np.allclose(g1, -g2):
                continue
            A, B, C = g1 @ Q @ g1, g1 @ Q @ g2, g2 @ Q @ g2
            if B >= 0:
                continue
            disc = B * B - A * C
            if disc > tol:
                if C > tol:
                    d = C * g1 - B * g2
                else:
                    d = g1 + (abs(A) / (-2.0 * B) + 1.0) * g2
                if d @ Q @ d < 0:
                    return escape(corners[0], d / np.linalg.norm(d))
            elif abs(disc) <= tol and C > tol and A > tol:
                d = C * g1 - B * g2
                zero_dirs.append(d / np.linalg.norm(d))
        for d in zero_dirs:
            for x0 in corners:
                if (2.0 * Q @ x0 + L) @ d < -tol:
                    return escape(x0, d)

    best, best_x = INF, None
    options = []
    for i in range(k):
        opt = []
        if lo[i] < hi[i]:
            opt.append("free")
        if math.isfinite(lo[i]):
            opt.append("lo")
        if math.isfinite(hi[i]) and hi[i] != lo[i]:
            opt.append("hi")
        options.append(opt)
    for combo in itertools.product(*options):
        x = np.zeros(k)
        free = [i for i, o in enumerate(combo) if o == "free"]
        fixed = [i for i, o in enumerate(combo) if o != "free"]
        for i in fixed:
            x[i] = lo[i] if combo[i] == "lo" else hi[i]
        if free:
            QF = 2.0 * Q[np.ix_(free, free)]
            rhs = -(L[free] + 2.0 * Q[np.ix_(free, fixed)] @ x[fixed])
            sol, *_ = np.linalg.lstsq(QF, rhs, rcond=None)
            if np.linalg.norm(QF @ sol - rhs) > 1e-9 * (1.0 + np.linalg.norm(rhs)):
                continue
            slack = 1e-12 * (1.0 + np.abs(sol))
            if np.any(sol < lo[free] - slack) or np.any(sol > hi[free] + slack):
                continue
            x[free] = np.clip(sol, lo[free], hi[free])
        v = f(x)
        if v < best:
            best, best_x = v, x
    if best_x is None:
        raise RuntimeError("no admissible stationary point; recession analysis missed a direction")
    return best, best_x


@dataclass
class MonotonicityResult:
    """Outcome of :func:`is_monotone`; truthy iff the graph is monotone."""

    monotone: bool
    witness: Optional[Tuple[PairedPoint, PairedPoint]] = None
    min_value: float = 0.0

    def __bool__(self):
        return self.monotone


def is_monotone(T: OperatorGraph, tol: TolerancePolicy = DEFAULT_TOL) -> MonotonicityResult:
    """Decide ``c(z - z') >= 0`` for all graph points by exact pairwise minimisation."""
    if isinstance(T, CubicOperator):
        return MonotonicityResult(True)
    if isinstance(T, LinearMonotoneOperator):
        return MonotonicityResult(bool(T.eigvals[0] >= -tol.tol_exact), None, float(T.eigvals[0]))
    best = INF
    witness = None
    k = len(T)
    for i in range(k):
        for j in range(i, k):
            d = T.bases[i] - T.bases[j]
            u1, u2 = T.dirs[i], -T.dirs[j]
            Q = np.array([[coupling_flat(u1), 0.5 * pair_dot_flat(u1, u2)],
                          [0.5 * pair_dot_flat(u1, u2), coupling_flat(u2)]])
            L = np.array([pair_dot_flat(d, u1), pair_dot_flat(d, u2)])
            lo = np.array([T.lo[i], T.lo[j]])
            hi = np.array([T.hi[i], T.hi[j]])

            def f(x, d=d, u1=u1, u2=u2):
                return float(coupling_flat(d + x[0] * u1 + x[1] * u2))

            val, x = quad_box_inf(Q, L, coupling_flat(d), lo, hi, tol.tol_exact, f)
            if val < best:
                best = val
                witness = (PairedPoint.from_flat(T.bases[i] + x[0] * T.dirs[i]),
                           PairedPoint.from_flat(T.bases[j] + x[1] * T.dirs[j]))
    if best < -tol.tol_exact:
        return MonotonicityResult(False, witness, best)
    return MonotonicityResult(True, None, best)


# ---------------------------------------------------------------------------
# hulls of graphs and of their projections

def _axis_rays(n: int) -> List[np.ndarray]:
    eye = np.eye(n)
    return [r for i in range(n) for r in (eye[i], -eye[i])]


def _project_hull(T: OperatorGraph, sl: slice) -> HullGenerators:
    points, rays = [], []
    for p in T.pieces:
        base = p.base.flat[sl]
        d = p.dir.flat[sl]
        if p.kind == "point":
            points.append(base)
        elif p.kind == "segment":
            points.extend([base, base + d])
        else:
            points.append(base)
            if np.any(d):
                rays.append(d)
                if p.kind == "line":
                    rays.append(-d)
    return HullGenerators(points, rays)


def domain_hull(T: OperatorGraph) -> HullGenerators:
    """Generators of ``conv D(T)``."""
    if isinstance(T, PolygonalOperator):
        return _project_hull(T, slice(0, T.n))
    return HullGenerators([np.zeros(T.n)], _axis_rays(T.n))


def range_hull(T: OperatorGraph) -> HullGenerators:
    """Generators of ``conv R(T)``."""
    if isinstance(T, PolygonalOperator):
        return _project_hull(T, slice(T.n, 2 * T.n))
    if isinstance(T, LinearMonotoneOperator):
        cols = [T.A[:, i] for i in range(T.n) if np.any(T.A[:, i])]
        return HullGenerators([T.b.copy()], [r for c in cols for r in (c, -c)])
    return HullGenerators([np.zeros(1)], _axis_rays(1))


def graph_hull(T: OperatorGraph) -> HullGenerators:
    """Generators of ``conv Graph T`` in flat ``2n`` coordinates."""
    if isinstance(T, PolygonalOperator):
        return _project_hull(T, slice(0, 2 * T.n))
    if isinstance(T, LinearMonotoneOperator):
        n = T.n
        rays = []
        for i in range(n):
            g = np.concatenate([np.eye(n)[i], T.A[:, i]])
            rays.extend([g, -g])
        return HullGenerators([np.concatenate([np.zeros(n), T.b])], rays)
    # conv {(a, a^3)} is the whole plane
    return HullGenerators([np.zeros(2)], _axis_rays(2))


def affine_hull_basis(points: Sequence, tol: TolerancePolicy = DEFAULT_TOL):
    """Base point and a maximal independent subset of differences spanning ``aff(points)``.

    Independence is decided by Gram-Schmidt with pivot threshold ``tol_exact``
    relative to the size of the differences.
    """
    pts = [np.atleast_1d(np.asarray(p, dtype=float)) for p in points]
    if not pts:
        raise ValueError("affine hull of an empty set")
    base = pts[0]
    diffs = [p - base for p in pts[1:]]
    scale = max([1.0] + [float(np.linalg.norm(d)) for d in diffs])
    basis, ortho = [], []
    for d in diffs:
        r = d.copy()
        for q in ortho:
            r -= (r @ q) * q
        for q in ortho:
            r -= (r @ q) * q
        nr = np.linalg.norm(r)
        if nr > tol.tol_exact * scale:
            basis.append(d)
            ortho.append(r / nr)
    return base, basis


def affine_hull_residual(base, basis, x) -> float:
    """Distance from ``x`` to ``base + span(basis)``."""
    r = np.asarray(x, dtype=float) - base
    if not basis:
        return float(np.linalg.norm(r))
    B = np.array(basis).T
    coef, *_ = np.linalg.lstsq(B, r, rcond=None)
    return float(np.linalg.norm(r - B @ coef))


def sample_graph_points(T: OperatorGraph, rng: np.random.Generator, m: int,
                        scale: float = 1.0) -> np.ndarray:
    """``m`` random points of ``Graph T`` as a ``(m, 2n)`` array."""
    if isinstance(T, PolygonalOperator):
        k = rng.integers(len(T), size=m)
        lo, hi = T.lo[k], T.hi[k]
        t = np.where(np.isfinite(hi) & np.isfinite(lo), rng.uniform(size=m) * (hi - lo) + np.where(np.isfinite(lo), lo, 0.0), 0.0)
        ray = np.isfinite(lo) & ~np.isfinite(hi)
        line = ~np.isfinite(lo) & ~np.isfinite(hi)
        t = np.where(ray, lo + scale * rng.exponential(size=m), t)
        t = np.where(line, scale * rng.standard_normal(size=m), t)
        return T.bases[k] + t[:, None] * T.dirs[k]
    if isinstance(T, LinearMonotoneOperator):
        a = scale * rng.standard_normal((m, T.n))
        return np.hstack([a, a @ T.A.T + T.b])
    a = scale * rng.standard_normal((m, 1))
    return np.hstack([a, a ** 3])
