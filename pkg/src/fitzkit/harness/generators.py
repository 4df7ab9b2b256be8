"""Seeded random operator families.

Each family records whether its members are monotone, NI and maximal.  Those
flags come from the construction, never from sampling: sampling can refute a
property but cannot certify it.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, Optional, Sequence

import numpy as np

from ..core import DEFAULT_TOL, PairedPoint, coupling_flat, pp
from ..opmodel import (
    CubicOperator,
    LinearMonotoneOperator,
    LinePiece,
    OperatorGraph,
    PointPiece,
    PolygonalOperator,
    RayPiece,
    SegmentPiece,
    is_monotone,
)

__all__ = [
    "Family",
    "FAMILIES",
    "NI_FAMILIES",
    "MONOTONE_FAMILIES",
    "POLYGONAL_FAMILIES",
    "cross_operator",
    "identity_line",
    "gen_linear_monotone",
    "gen_maximal_1d",
    "gen_point_cloud_monotone",
    "gen_polygonal_monotone",
    "gen_random_polygonal",
    "gen_singleton",
]


def _rng(seed) -> np.random.Generator:
    return np.random.default_rng(seed)


def cross_operator() -> PolygonalOperator:
    """Union of the two coordinate axes in ``R^2``."""
    o = pp(0.0, 0.0)
    return PolygonalOperator([LinePiece(o, pp(1.0, 0.0)), LinePiece(o, pp(0.0, 1.0))])


def identity_line() -> PolygonalOperator:
    """The graph ``{(a, a)}`` as a single line piece."""
    return PolygonalOperator([LinePiece(pp(0.0, 0.0), pp(1.0, 1.0))])


def gen_linear_monotone(n: int, seed=None, singular_prob: float = 0.25,
                        skew_scale: float = 1.0) -> LinearMonotoneOperator:
    """``x -> A x + b`` with ``A = Q diag(lam) Q^T + K``, ``lam >= 0`` and ``K`` skew.

    With probability ``singular_prob`` one eigenvalue of the symmetric part is
    set to zero, which makes the domain of ``phi_T`` a proper subspace.
    """
    rng = _rng(seed)
    Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    lam = rng.uniform(0.05, 2.0, size=n)
    if rng.uniform() < singular_prob:
        lam[rng.integers(n)] = 0.0
    M = rng.standard_normal((n, n))
    K = 0.5 * skew_scale * (M - M.T)
    A = (Q * lam) @ Q.T + K
    return LinearMonotoneOperator(A, rng.standard_normal(n))


def gen_maximal_1d(seed=None, max_steps: int = 5) -> PolygonalOperator:
    """A connected nondecreasing staircase in ``R^2`` with unbounded end rays.

    Steps are horizontal, vertical or increasing-sloped segments; the left
    ray points in ``(-1, 0)`` or ``(0, -1)`` and the right ray in ``(1, 0)``
    or ``(0, 1)``, so the graph is a maximal monotone relation.
    """
    rng = _rng(seed)
    k = int(rng.integers(0, max_steps + 1))
    v = rng.normal(0.0, 1.0, size=2)
    verts = [v]
    for _ in range(k):
        u = rng.uniform()
        step = rng.uniform(0.2, 1.5, size=2)
        if u < 0.4:
            step[1] = 0.0
        elif u < 0.8:
            step[0] = 0.0
        v = v + step
        verts.append(v)
    left = [(-1.0, 0.0), (0.0, -1.0)][rng.integers(2)]
    right = [(1.0, 0.0), (0.0, 1.0)][rng.integers(2)]
    pieces = [RayPiece(pp(verts[0][0], verts[0][1]), pp(*left))]
    for a, b in zip(verts[:-1], verts[1:]):
        pieces.append(SegmentPiece(pp(a[0], a[1]), pp(b[0], b[1])))
    pieces.append(RayPiece(pp(verts[-1][0], verts[-1][1]), pp(*right)))
    return PolygonalOperator(pieces)


def gen_point_cloud_monotone(n: int, m: int, seed=None,
                             forced: Optional[Sequence[PairedPoint]] = None,
                             max_tries: int = 2000) -> PolygonalOperator:
    """Up to ``m`` points with pairwise ``c(z_i - z_j) >= 0`` by greedy rejection.

    Candidates come from a noisy monotone linear relation so acceptance stays
    high.  ``forced`` points are kept first (they must be mutually monotone).
    """
    rng = _rng(seed)
    pts = [p.flat for p in forced] if forced else []
    M = rng.standard_normal((n, n))
    S = M @ M.T / n + 0.1 * np.eye(n)
    tries = 0
    while len(pts) < m and tries < max_tries:
        tries += 1
        x = rng.normal(0.0, 1.5, size=n)
        z = np.concatenate([x, S @ x + rng.normal(0.0, 0.5, size=n)])
        if all(coupling_flat(z - q) >= 1e-6 for q in pts):
            pts.append(z)
    if not pts:
        pts.append(rng.standard_normal(2 * n))
    return PolygonalOperator([PointPiece(PairedPoint.from_flat(p)) for p in pts])


def gen_polygonal_monotone(n: int, seed=None, max_pieces: int = 4) -> PolygonalOperator:
    """Points, segments and rays lying on the graph of a random monotone affine map.

    Any subset of a monotone graph is monotone; in dimension one a staircase
    subset is used half of the time instead.
    """
    rng = _rng(seed)
    if n == 1 and rng.uniform() < 0.5:
        full = gen_maximal_1d(rng)
        keep = rng.uniform(size=len(full)) < 0.6
        keep[rng.integers(len(full))] = True
        pieces = [p for p, k in zip(full.pieces, keep) if k]
        return PolygonalOperator(pieces)
    L = gen_linear_monotone(n, rng, singular_prob=0.0)

    def graph_pt(a):
        return PairedPoint(a, L.apply(a))

    pieces = []
    for _ in range(int(rng.integers(1, max_pieces + 1))):
        a = rng.normal(0.0, 1.5, size=n)
        kind = rng.uniform()
        if kind < 0.4:
            pieces.append(PointPiece(graph_pt(a)))
        elif kind < 0.8:
            pieces.append(SegmentPiece(graph_pt(a), graph_pt(a + rng.normal(0.0, 1.0, size=n))))
        else:
            d = rng.standard_normal(n)
            pieces.append(RayPiece(graph_pt(a), PairedPoint(d, L.A @ d)))
    return PolygonalOperator(pieces)


def gen_random_polygonal(n: int, seed=None, max_pieces: int = 4) -> PolygonalOperator:
    """Arbitrary pieces with no monotonicity guarantee."""
    rng = _rng(seed)
    pieces = []
    for _ in range(int(rng.integers(1, max_pieces + 1))):
        base = PairedPoint.from_flat(rng.normal(0.0, 1.5, size=2 * n))
        d = PairedPoint.from_flat(rng.standard_normal(2 * n))
        kind = rng.uniform()
        if kind < 0.3:
            pieces.append(PointPiece(base))
        elif kind < 0.7:
            pieces.append(SegmentPiece(base, base + d))
        elif kind < 0.9:
            pieces.append(RayPiece(base, d))
        else:
            pieces.append(LinePiece(base, d))
    return PolygonalOperator(pieces)


def gen_singleton(n: int, seed=None) -> PolygonalOperator:
    rng = _rng(seed)
    return PolygonalOperator([PointPiece(PairedPoint.from_flat(rng.normal(0.0, 1.5, size=2 * n)))])


@dataclass(frozen=True)
class Family:
    """A named operator generator with the properties its members are known to have."""

    name: str
    make: Callable[[np.random.Generator], OperatorGraph]
    monotone: bool
    ni: bool
    maximal: bool
    polygonal: bool = True


def _dim(rng, hi=3):
    return int(rng.integers(1, hi + 1))


FAMILIES: Dict[str, Family] = {
    f.name: f
    for f in [
        Family("singleton", lambda r: gen_singleton(_dim(r), r), True, False, False),
        Family("cloud", lambda r: gen_point_cloud_monotone(_dim(r), int(r.integers(2, 7)), r), True, False, False),
        Family("poly-monotone", lambda r: gen_polygonal_monotone(_dim(r), r), True, False, False),
        Family("poly-random", lambda r: gen_random_polygonal(_dim(r), r), False, False, False),
        Family("maximal1d", lambda r: gen_maximal_1d(r), True, True, True),
        Family("identity", lambda r: identity_line(), True, True, True),
        Family("cross", lambda r: cross_operator(), False, True, False),
        Family("linear", lambda r: gen_linear_monotone(_dim(r, 5), r), True, True, True, polygonal=False),
        Family("cubic", lambda r: CubicOperator(), True, True, True, polygonal=False),
    ]
}

NI_FAMILIES = tuple(k for k, f in FAMILIES.items() if f.ni)
MONOTONE_FAMILIES = tuple(k for k, f in FAMILIES.items() if f.monotone)
POLYGONAL_FAMILIES = tuple(k for k, f in FAMILIES.items() if f.polygonal)


def validate(family: Family, T: OperatorGraph) -> None:
    """Raise ``AssertionError`` if ``T`` breaks its family's construction guarantee."""
    if family.monotone and isinstance(T, PolygonalOperator):
        res = is_monotone(T, DEFAULT_TOL)
        assert res.monotone, f"{family.name} produced a non-monotone operator ({res.min_value:.3g})"
    if isinstance(T, LinearMonotoneOperator):
        assert T.eigvals.min() >= 0.0
