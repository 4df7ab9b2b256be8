"""Sampling of base points ``z`` and directions ``p`` for the suites.

Points mix plain normals, perturbed graph points and chords between graph
points (the latter stay in ``dom phi_T`` for monotone ``T``).  Directions mix
plain normals, coupling-null pairs ``(u, u*)`` with ``<u, u*> = 0``, chords
``alpha - z`` towards the graph, and directions on which ``sigma_{T-z}`` is
finite.
"""
from __future__ import annotations

import numpy as np

from ..core import DEFAULT_TOL, swap_flat
from ..hull import HullGenerators, project
from ..opmodel import (
    CubicOperator,
    LinearMonotoneOperator,
    OperatorGraph,
    PolygonalOperator,
    graph_hull,
    sample_graph_points,
)
from ..fitz import gap_many

__all__ = ["sample_points", "sample_directions", "finite_gap_points", "null_directions",
           "finite_support_directions"]


def sample_points(T: OperatorGraph, rng: np.random.Generator, m: int, scale: float = 1.5) -> np.ndarray:
    """``(m, 2n)`` base points from the mixture described in the module docstring."""
    n = T.n
    kind = rng.uniform(size=m)
    out = scale * rng.standard_normal((m, 2 * n))
    G = sample_graph_points(T, rng, m, scale)
    noise = rng.choice([1e-3, 0.1, 0.5, 1.5], size=(m, 1))
    pert = G + noise * rng.standard_normal((m, 2 * n))
    H = sample_graph_points(T, rng, m, scale)
    lam = rng.uniform(size=(m, 1))
    chord = lam * G + (1 - lam) * H
    out = np.where((kind >= 0.35)[:, None] & (kind < 0.75)[:, None], pert, out)
    out = np.where((kind >= 0.75)[:, None], chord, out)
    if isinstance(T, PolygonalOperator):
        # exact vertices: for operators like the cross they are all of dom phi_T
        vert = kind >= 0.95
        out[vert] = T.bases[rng.integers(len(T), size=int(vert.sum()))]
    if isinstance(T, LinearMonotoneOperator) and T.eigvals.min() == 0.0:
        # land some points in dom phi_T: A^T x + x* - b must lie in range(A_s)
        dom = kind < 0.15
        X = out[:, :n]
        Y = rng.standard_normal((m, n)) @ T.A_sym
        out[dom, n:] = (T.b - X @ T.A + Y)[dom]
    return out


def null_directions(rng: np.random.Generator, m: int, n: int) -> np.ndarray:
    """Random ``(u, u*)`` with ``<u, u*> = 0``."""
    u = rng.standard_normal((m, n))
    us = rng.standard_normal((m, n))
    us -= (np.einsum("ij,ij->i", u, us) / np.einsum("ij,ij->i", u, u))[:, None] * u
    return np.hstack([u, us])


def finite_support_directions(T: OperatorGraph, rng: np.random.Generator, m: int) -> np.ndarray:
    """Directions in the polar of the recession cone of ``Graph T`` (where ``sigma`` is finite)."""
    n = T.n
    if isinstance(T, LinearMonotoneOperator):
        v = rng.standard_normal((m, n))
        return np.hstack([v, -v @ T.A])
    if isinstance(T, CubicOperator):
        return np.zeros((m, 2))
    P = rng.standard_normal((m, 2 * n))
    rays = graph_hull(T).rays
    if len(rays) == 0:
        return P
    cone = HullGenerators([np.zeros(2 * n)], swap_flat(rays))
    # p - proj_cone(p) lies in the polar cone {p : p.r <= 0 for every ray r}
    return np.array([p - project(cone, p).point for p in P])


def sample_directions(T: OperatorGraph, rng: np.random.Generator, Z: np.ndarray,
                      scale: float = 1.0) -> np.ndarray:
    """One direction per row of ``Z``."""
    m, n2 = Z.shape
    n = n2 // 2
    kind = rng.uniform(size=m)
    out = scale * rng.standard_normal((m, n2))
    out = np.where((kind < 0.2)[:, None], scale * null_directions(rng, m, n), out)
    chords = sample_graph_points(T, rng, m, 1.5) - Z
    out = np.where(((kind >= 0.4) & (kind < 0.6))[:, None], chords, out)
    fin_mask = kind >= 0.6
    if np.any(fin_mask):
        out[fin_mask] = scale * finite_support_directions(T, rng, int(fin_mask.sum()))
    return out


def finite_gap_points(T: OperatorGraph, rng: np.random.Generator, m: int,
                      max_rounds: int = 8) -> np.ndarray:
    """Up to ``m`` sampled points in ``dom phi_T`` (possibly fewer if the domain is thin)."""
    found = []
    total = 0
    for _ in range(max_rounds):
        Z = sample_points(T, rng, 2 * m)
        g = gap_many(T, Z, DEFAULT_TOL)
        Z = Z[np.isfinite(g)]
        found.append(Z)
        total += len(Z)
        if total >= m:
            break
    Z = np.vstack(found)
    return Z[:m]
