"""Finitely generated convex sets ``conv(points) + cone(rays)`` and projections onto them.

The projection solves

    min || q - (P lam + R mu) ||^2   s.t.  lam in simplex,  mu >= 0

with a primal active-set method in the spirit of Wolfe's minimum-norm-point
algorithm: rays are ordinary generators whose weights are free of the
simplex constraint.  Weighted pair norms are handled by rescaling
coordinates, so the solver itself is Euclidean.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core import DEFAULT_TOL, INF, DimensionError, TolerancePolicy, WeightedNorm

__all__ = [
    "HullGenerators",
    "ProjectionResult",
    "ProjectionError",
    "project",
    "membership",
    "separating_direction",
    "support_value",
    "lemma_argmin_sigma_check",
]

MAX_ITER = 10_000


class ProjectionError(RuntimeError):
    """The active-set solver hit its iteration cap without meeting the KKT tolerance."""


class HullGenerators:
    """``conv(points) + cone(rays)`` in ``R^m``."""

    def __init__(self, points: Sequence, rays: Sequence = ()):
        pts = [np.atleast_1d(np.asarray(p, dtype=float)) for p in points]
        if not pts:
            raise ValueError("a hull needs at least one point")
        m = pts[0].size
        rs = [np.atleast_1d(np.asarray(r, dtype=float)) for r in rays]
        for v in pts + rs:
            if v.shape != (m,):
                raise DimensionError(f"generator of shape {v.shape} in a hull of dimension {m}")
        for r in rs:
            if not np.any(r):
                raise ValueError("rays must be nonzero")
        self.points = np.array(pts)
        self.rays = np.array(rs).reshape(len(rs), m)
        self.dim = m

    def __repr__(self):
        return f"HullGenerators(dim={self.dim}, points={len(self.points)}, rays={len(self.rays)})"

    def to_json(self) -> dict:
        return {"points": self.points.tolist(), "rays": self.rays.tolist()}

    @classmethod
    def from_json(cls, obj: dict) -> "HullGenerators":
        return cls(obj["points"], obj.get("rays", []))


@dataclass
class ProjectionResult:
    point: np.ndarray
    point_weights: np.ndarray
    ray_weights: np.ndarray
    distance: float
    kkt_residual: float
    iterations: int = 0


def _scale_for(norm: Optional[WeightedNorm], m: int) -> np.ndarray:
    if norm is None:
        return np.ones(m)
    if m % 2:
        raise DimensionError("weighted pair norms need an even-dimensional space")
    return np.sqrt(norm.weights(m // 2))


def _solve_eq_ls(G, a, q):
    """min ||G v - q|| s.t. a.v = 1, via the KKT system (least squares if singular)."""
    k = G.shape[1]
    K = np.zeros((k + 1, k + 1))
    K[:k, :k] = G.T @ G
    K[:k, k] = a
    K[k, :k] = a
    rhs = np.concatenate([G.T @ q, [1.0]])
    sol, *_ = np.linalg.lstsq(K, rhs, rcond=None)
    return sol[:k]


def _active_set(G, a, q, tol_kkt, max_iter=MAX_ITER):
    k = G.shape[1]
    pts = np.flatnonzero(a)
    start = pts[np.argmin(np.linalg.norm(G[:, pts] - q[:, None], axis=0))]
    w = np.zeros(k)
    w[start] = 1.0
    active = np.zeros(k, dtype=bool)
    active[start] = True
    scale = 1.0 + np.linalg.norm(q) + np.abs(G).max()
    it = 0
    while True:
        it += 1
        if it > max_iter:
            return w, it, False
        g = G.T @ (G @ w - q)
        nu = -np.mean(g[active & a])
        mult = g + nu * a
        cand = np.where(active, INF, mult)
        j = int(np.argmin(cand))
        if cand[j] >= -tol_kkt * scale:
            return w, it, True
        active[j] = True
        while True:
            it += 1
            if it > max_iter:
                return w, it, False
            idx = np.flatnonzero(active)
            v = _solve_eq_ls(G[:, idx], a[idx], q)
            if np.all(v > 1e-14):
                w[:] = 0.0
                w[idx] = v
                break
            wi = w[idx]
            neg = v <= 1e-14
            ratios = np.where(neg, wi / np.where(neg, wi - v, 1.0), INF)
            step = float(np.clip(np.min(ratios), 0.0, 1.0))
            w[idx] = wi + step * (v - wi)
            drop = idx[(w[idx] <= 1e-14) | (neg & (ratios <= step + 1e-15))]
            w[drop] = 0.0
            active[drop] = False
            if not np.any(active & a):
                # keep the simplex block non-empty: re-seed with the best point
                j = pts[np.argmin(np.linalg.norm(G[:, pts] - (q - G @ w)[:, None], axis=0))]
                active[j] = True
                w[j] = max(w[j], 0.0)
            total = w[a].sum()
            if total > 0:
                w[a] /= total


def project(hull: HullGenerators, q, norm: Optional[WeightedNorm] = None,
            tol: TolerancePolicy = DEFAULT_TOL) -> ProjectionResult:
    """Nearest point of the hull to ``q`` in the (optionally weighted) norm.

    With ``norm`` given, ``q`` and the generators are flat pair vectors of
    length ``2n``; primal coordinates are weighted by ``delta`` and dual ones
    by ``1/delta``.

    Raises
    ------
    ProjectionError
        If the iteration cap is reached before the KKT residual drops below
        ``tol_iter``.
    """
    q = np.atleast_1d(np.asarray(q, dtype=float))
    if q.shape != (hull.dim,):
        raise DimensionError(f"query of shape {q.shape} against a hull of dimension {hull.dim}")
    s = _scale_for(norm, hull.dim)
    P = (hull.points * s).T
    R = (hull.rays * s).T
    G = np.hstack([P, R])
    a = np.zeros(G.shape[1], dtype=bool)
    a[: P.shape[1]] = True
    qs = q * s
    w, iters, ok = _active_set(G, a, qs, tol.tol_iter ** 2)
    lam = w[a]
    mu = w[~a]
    point = hull.points.T @ lam + hull.rays.T @ mu if len(mu) else hull.points.T @ lam
    resid = G @ w - qs
    g = G.T @ resid
    nu = -np.mean(g[(w > 0) & a]) if np.any((w > 0) & a) else -np.min(g[a])
    mult = g + nu * a
    kkt = max(
        float(np.max(-mult, initial=0.0)),
        float(np.max(np.abs(mult[w > 0]), initial=0.0)),
        abs(lam.sum() - 1.0),
        float(np.max(-w, initial=0.0)),
    ) / (1.0 + np.linalg.norm(qs) + np.abs(G).max())
    if not ok and kkt > tol.tol_iter:
        raise ProjectionError(f"projection did not converge in {iters} iterations (kkt={kkt:.3g})")
    return ProjectionResult(point=point, point_weights=lam, ray_weights=mu,
                            distance=float(np.linalg.norm((point - q) * s)),
                            kkt_residual=kkt, iterations=iters)


def membership(hull: HullGenerators, q, norm: Optional[WeightedNorm] = None,
               tol: TolerancePolicy = DEFAULT_TOL) -> bool:
    return project(hull, q, norm, tol).distance <= tol.tol_iter


def support_value(hull: HullGenerators, p, tol: TolerancePolicy = DEFAULT_TOL) -> float:
    """``sup { <g, p> : g in hull }`` under the plain dot product."""
    p = np.asarray(p, dtype=float)
    if len(hull.rays) and np.max(hull.rays @ p) > tol.tol_exact:
        return INF
    return float(np.max(hull.points @ p))


def separating_direction(hull: HullGenerators, q, norm: Optional[WeightedNorm] = None,
                         tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """Unit direction ``p`` with ``sup <g - q, p> < 0`` over the hull.

    ``p`` is the weighted residual ``W (q - proj)`` normalised, so the
    guarantee holds for the plain dot product whatever ``norm`` is used.

    Raises
    ------
    ValueError
        If ``q`` lies within ``tol_iter`` of the hull.
    """
    q = np.atleast_1d(np.asarray(q, dtype=float))
    res = project(hull, q, norm, tol)
    if res.distance <= tol.tol_iter:
        raise ValueError("query lies in the hull; no separating direction exists")
    s2 = _scale_for(norm, hull.dim) ** 2
    p = s2 * (q - res.point)
    return p / np.linalg.norm(p)


def lemma_argmin_sigma_check(points: Sequence, rays: Sequence = (), n_random: int = 256,
                             rng: Optional[np.random.Generator] = None,
                             tol: TolerancePolicy = DEFAULT_TOL) -> bool:
    """Check that ``sigma_A >= 0`` exactly when ``0`` is in the closed convex hull of ``A``.

    Both sides are evaluated independently: membership by projection, and the
    sign of the support function over a separating witness (non-members) or
    over random and coordinate directions (members).  Returns whether they
    agree.
    """
    hull = HullGenerators(points, rays)
    rng = np.random.default_rng(0) if rng is None else rng
    member = membership(hull, np.zeros(hull.dim), tol=tol)
    if not member:
        p = separating_direction(hull, np.zeros(hull.dim), tol=tol)
        return support_value(hull, p, tol) < -tol.tol_exact
    dirs = np.vstack([np.eye(hull.dim), -np.eye(hull.dim), rng.standard_normal((n_random, hull.dim))])
    return all(support_value(hull, d, tol) >= -tol.tol_iter * np.linalg.norm(d) for d in dirs)
