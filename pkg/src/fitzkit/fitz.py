"""Fitzpatrick functions, coupling gaps, shifted support functions and estimate evaluators.

For an operator ``T`` with graph in ``Z = R^n x R^n``::

    phi_T(z) = sup { z.alpha - c(alpha) : alpha in Graph T }
    gap(z)   = phi_T(z) - c(z)
    sigma_{T-z}(p) = sup { p.(alpha - z) : alpha in Graph T }

Every public scalar function has a ``*_many`` counterpart acting on rows of
``(m, 2n)`` arrays; the harness uses those for throughput.

The ``estimate_*`` functions each evaluate one inequality instance and return
a :class:`SlackReport` whose ``slack`` is nonnegative exactly when the
inequality holds.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from .core import (
    DEFAULT_TOL,
    INF,
    DimensionError,
    IndeterminateError,
    PairedPoint,
    TolerancePolicy,
    WeightedNorm,
    coupling,
    coupling_flat,
    pair_dot,
    pair_dot_flat,
    xadd,
    xscale,
)
from .hull import HullGenerators, project, separating_direction, support_value
from .opmodel import (
    CubicOperator,
    LinearMonotoneOperator,
    OperatorGraph,
    PolygonalOperator,
    _escape_param,
    affine_hull_basis,
    affine_hull_residual,
    domain_hull,
    piece_argmin_coupling,
    polygonal_inf_coupling,
    polygonal_sup,
    quad_sup,
    range_hull,
    sample_graph_points,
)

__all__ = [
    "SlackReport",
    "BoundaryPoint",
    "NIFalsification",
    "SamplerConfig",
    "NIViolationError",
    "R1ViolationError",
    "DomainExitError",
    "SearchError",
    "fitzpatrick",
    "fitzpatrick_many",
    "gap",
    "gap_many",
    "support_shifted",
    "support_shifted_many",
    "monotonically_related_gap",
    "monotonically_related_gap_many",
    "tplus_contains",
    "related_argmin",
    "estimate_main",
    "estimate_m2",
    "estimate_m3",
    "m3_lower_bound",
    "estimate_m4",
    "estimate_m7",
    "r1_implications",
    "negative_coupling_witness",
    "boundary_point",
    "segment_probe",
    "ni_falsify",
    "default_m3_candidates",
    "ProjectionInclusion",
    "projection_inclusion",
    "AffineShift",
    "affine_hull_shift",
]


class NIViolationError(ArithmeticError):
    """A gap below ``-tol_slack`` was met where the operator is asserted NI."""


class R1ViolationError(ArithmeticError):
    """A direction with negative shifted support but nonnegative coupling was met."""


class DomainExitError(ArithmeticError):
    """A segment left the domain of the Fitzpatrick function."""


class SearchError(RuntimeError):
    """A constructive search failed to produce a witness."""


# ---------------------------------------------------------------------------
# reports

@dataclass
class SlackReport:
    """Evidence for one inequality instance ``lhs <= rhs``.

    ``slack = rhs - lhs`` with the conventions: ``rhs = +inf`` or
    ``lhs = -inf`` gives ``slack = +inf``; ``lhs = +inf`` with finite ``rhs``
    gives ``slack = -inf``.
    """

    lhs: float
    rhs: float
    slack: float
    passed: bool
    label: str = ""

    @classmethod
    def build(cls, lhs: float, rhs: float, tol: TolerancePolicy = DEFAULT_TOL,
              label: str = "") -> "SlackReport":
        if math.isnan(lhs) or math.isnan(rhs):
            raise IndeterminateError("nan in inequality sides")
        if rhs == INF or lhs == -INF:
            slack = INF
        elif lhs == INF or rhs == -INF:
            slack = -INF
        else:
            slack = rhs - lhs
        return cls(lhs, rhs, slack, slack >= -tol.tol_slack, label)


def slack_arrays(lhs: np.ndarray, rhs: np.ndarray, tol: TolerancePolicy = DEFAULT_TOL):
    """Vectorised :meth:`SlackReport.build`; ``nan`` slack marks indeterminate rows."""
    lhs = np.asarray(lhs, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    with np.errstate(invalid="ignore"):
        slack = rhs - lhs
    slack = np.where((rhs == INF) | (lhs == -INF), INF, slack)
    slack = np.where(((lhs == INF) | (rhs == -INF)) & ~((rhs == INF) | (lhs == -INF)), -INF, slack)
    slack = np.where(np.isnan(lhs) | np.isnan(rhs), np.nan, slack)
    return slack, slack >= -tol.tol_slack


def _xscale_many(t, v):
    t = np.broadcast_to(np.asarray(t, dtype=float), np.shape(v))
    with np.errstate(invalid="ignore"):
        return np.where(t == 0, 0.0, t * v)


# ---------------------------------------------------------------------------
# cubic helpers

def _cubic_candidates(Z: np.ndarray) -> np.ndarray:
    """Stationary points of ``a -> x a^3 - a^4 + a x*`` for each row; shape (m, 3)."""
    x, xs = Z[:, 0], Z[:, 1]
    m = len(x)
    comp = np.zeros((m, 3, 3))
    comp[:, 0, 0] = 0.75 * x
    comp[:, 0, 2] = 0.25 * xs
    comp[:, 1, 0] = 1.0
    comp[:, 2, 1] = 1.0
    a = np.linalg.eigvals(comp).real
    for _ in range(3):
        g = 4 * a ** 3 - 3 * x[:, None] * a ** 2 - xs[:, None]
        dg = 12 * a ** 2 - 6 * x[:, None] * a
        ok = np.abs(dg) > 1e-300
        step = np.where(ok, g / np.where(ok, dg, 1.0), 0.0)
        a = a - np.clip(step, -1.0 - np.abs(a), 1.0 + np.abs(a))
    return a


def _cubic_phi(Z):
    a = _cubic_candidates(Z)
    x, xs = Z[:, :1], Z[:, 1:]
    return np.max(x * a ** 3 - a ** 4 + a * xs, axis=1)


def _cubic_related(Z):
    a = _cubic_candidates(Z)
    x, xs = Z[:, :1], Z[:, 1:]
    vals = (x - a) * (xs - a ** 3)
    k = np.argmin(vals, axis=1)
    return vals[np.arange(len(k)), k], a[np.arange(len(k)), k]


# ---------------------------------------------------------------------------
# linear helpers

def _linear_u(T: LinearMonotoneOperator, Z):
    n = T.n
    return Z[:, :n] @ T.A + Z[:, n:] - T.b


def _linear_in_range(T, U, tol):
    return T.range_residual(U) <= tol.tol_exact * (1.0 + np.linalg.norm(U, axis=-1))


# ---------------------------------------------------------------------------
# evaluation

def _as_rows(T: OperatorGraph, Z) -> np.ndarray:
    Z = np.atleast_2d(np.asarray(Z, dtype=float))
    if Z.shape[-1] != 2 * T.n:
        raise DimensionError(f"operator has n={T.n}, points have {Z.shape[-1]} coordinates")
    return Z


def fitzpatrick_many(T: OperatorGraph, Z, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """``phi_T`` at each row of ``Z`` (shape ``(m, 2n)``)."""
    Z = _as_rows(T, Z)
    if isinstance(T, PolygonalOperator):
        val, _ = polygonal_sup(T, Z, tol.tol_exact)
        return val.max(axis=1)
    if isinstance(T, LinearMonotoneOperator):
        U = _linear_u(T, Z)
        quad = 0.25 * np.einsum("ij,ij->i", U, U @ T.A_sym_pinv)
        val = Z[:, : T.n] @ T.b + quad
        return np.where(_linear_in_range(T, U, tol), val, INF)
    if isinstance(T, CubicOperator):
        return _cubic_phi(Z)
    raise TypeError(f"unsupported operator {T!r}")


def fitzpatrick(T: OperatorGraph, z: PairedPoint, tol: TolerancePolicy = DEFAULT_TOL) -> float:
    """The Fitzpatrick function ``phi_T(z)``; never ``-inf`` for a non-empty graph."""
    return float(fitzpatrick_many(T, z.flat, tol)[0])


def gap_many(T: OperatorGraph, Z, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    Z = _as_rows(T, Z)
    return fitzpatrick_many(T, Z, tol) - coupling_flat(Z)


def gap(T: OperatorGraph, z: PairedPoint, tol: TolerancePolicy = DEFAULT_TOL) -> float:
    """``phi_T(z) - c(z)``; ``+inf`` exactly when ``phi_T(z)`` is."""
    return float(gap_many(T, z.flat, tol)[0])


def support_shifted_many(T: OperatorGraph, Z, P, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """``sigma_{T - z}(p)`` for paired rows of ``Z`` and ``P``."""
    Z = _as_rows(T, Z)
    P = _as_rows(T, P)
    Z, P = np.broadcast_arrays(Z, P)
    shift = pair_dot_flat(P, Z)
    if isinstance(T, PolygonalOperator):
        slope = pair_dot_flat(P[:, None, :], T.dirs[None, :, :])
        offset = pair_dot_flat(P[:, None, :], T.bases[None, :, :])
        val, _ = quad_sup(0.0, slope, offset, T.lo, T.hi, tol.tol_exact)
        return val.max(axis=1) - shift
    n = T.n
    if isinstance(T, LinearMonotoneOperator):
        q = P[:, :n] @ T.A + P[:, n:]
        finite = np.max(np.abs(q), axis=1) <= tol.tol_exact
        return np.where(finite, P[:, :n] @ T.b - shift, INF)
    if isinstance(T, CubicOperator):
        finite = np.max(np.abs(P), axis=1) == 0.0
        return np.where(finite, -shift, INF)
    raise TypeError(f"unsupported operator {T!r}")


def support_shifted(T: OperatorGraph, z: PairedPoint, p: PairedPoint,
                    tol: TolerancePolicy = DEFAULT_TOL) -> float:
    """Support function of ``Graph T - z`` at ``p`` under the pair duality."""
    if z.n != p.n:
        raise DimensionError(f"dimension mismatch: {z.n} vs {p.n}")
    return float(support_shifted_many(T, z.flat, p.flat, tol)[0])


def monotonically_related_gap_many(T: OperatorGraph, Z, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """``inf { c(z - alpha) : alpha in Graph T }`` for each row of ``Z``."""
    Z = _as_rows(T, Z)
    if isinstance(T, PolygonalOperator):
        val, _, _ = polygonal_inf_coupling(T, Z, tol.tol_exact)
        return val.min(axis=1)
    if isinstance(T, LinearMonotoneOperator):
        n = T.n
        U = _linear_u(T, Z)
        a = 0.5 * U @ T.A_sym_pinv
        val = np.einsum("ij,ij->i", Z[:, :n] - a, Z[:, n:] - a @ T.A.T - T.b)
        return np.where(_linear_in_range(T, U, tol), val, -INF)
    if isinstance(T, CubicOperator):
        return _cubic_related(Z)[0]
    raise TypeError(f"unsupported operator {T!r}")


def monotonically_related_gap(T: OperatorGraph, z: PairedPoint,
                              tol: TolerancePolicy = DEFAULT_TOL) -> float:
    return float(monotonically_related_gap_many(T, z.flat, tol)[0])


def tplus_contains(T: OperatorGraph, z: PairedPoint, tol: TolerancePolicy = DEFAULT_TOL) -> bool:
    """Whether ``z`` is monotonically related to every point of ``Graph T``."""
    return monotonically_related_gap(T, z, tol) >= -tol.tol_slack


def related_argmin(T: OperatorGraph, z: PairedPoint, tol: TolerancePolicy = DEFAULT_TOL,
                   target: float = -1.0) -> PairedPoint:
    """A graph point nearly minimising ``alpha -> c(z - alpha)``.

    When the infimum is ``-inf`` the returned point satisfies
    ``c(z - alpha) < target``.
    """
    zf = z.flat
    if isinstance(T, PolygonalOperator):
        vals, _, _ = polygonal_inf_coupling(T, zf[None], tol.tol_exact)
        k = int(np.argmin(vals[0]))
        return PairedPoint.from_flat(piece_argmin_coupling(T, zf, k, tol.tol_exact, target))
    if isinstance(T, LinearMonotoneOperator):
        u = _linear_u(T, zf[None])[0]
        a = 0.5 * u @ T.A_sym_pinv
        if not _linear_in_range(T, u[None], tol)[0]:
            v = u - T.range_basis @ (T.range_basis.T @ u)
            v /= np.linalg.norm(v)
            base = float(np.dot(zf[: T.n] - a, zf[T.n:] - T.apply(a)))
            # c(z - (a + s v)) decreases with slope -<v, u> along the null direction
            s = (abs(base) - target + 1.0) / max(float(v @ u), 1e-300)
            a = a + s * v
        return PairedPoint(a, T.apply(a))
    if isinstance(T, CubicOperator):
        _, a = _cubic_related(zf[None])
        return PairedPoint(a, a ** 3)
    raise TypeError(f"unsupported operator {T!r}")


# ---------------------------------------------------------------------------
# inequality evaluators

def estimate_main(T: OperatorGraph, z: PairedPoint, p: PairedPoint, t: float,
                  tol: TolerancePolicy = DEFAULT_TOL) -> SlackReport:
    """``gap(z + t p) <= gap(z) - t^2 c(p) + t sigma_{T-z}(p)``, valid for every ``T``."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    lhs = gap(T, z + t * p, tol)
    rhs = xadd(gap(T, z, tol), -t * t * coupling(p), xscale(t, support_shifted(T, z, p, tol)))
    return SlackReport.build(lhs, rhs, tol, "main")


def estimate_m2(T: OperatorGraph, z: PairedPoint, p: PairedPoint, t: float,
                tol: TolerancePolicy = DEFAULT_TOL) -> SlackReport:
    """``gap(z) >= t^2 c(p) - t sigma_{T-z}(p)`` for NI operators."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    lhs = xadd(t * t * coupling(p), -xscale(t, support_shifted(T, z, p, tol)))
    return SlackReport.build(lhs, gap(T, z, tol), tol, "m2")


def _r1_margin(g: float, c: float, tol: TolerancePolicy) -> float:
    # sigma may legitimately sit at -2 sqrt(gap |c|) when c is a rounding-level negative
    return tol.tol_exact + 2.0 * math.sqrt(max(g, 0.0) * abs(c))


def m3_lower_bound(T: OperatorGraph, z, P, g: Optional[float] = None,
                   tol: TolerancePolicy = DEFAULT_TOL) -> Tuple[float, int]:
    """``max { -sigma^2 / (4 c(p)) : sigma_{T-z}(p) < -tol_exact }`` over the rows of ``P``.

    Returns ``(bound, bad)`` where ``bad`` is the index of the first row with
    clearly negative support but nonnegative coupling, or ``-1``.  The bound is
    ``-inf`` when no row qualifies.
    """
    zf = z.flat if isinstance(z, PairedPoint) else np.asarray(z, dtype=float)
    P = np.atleast_2d(np.asarray(P, dtype=float))
    if g is None:
        g = float(gap_many(T, zf, tol)[0])
    if len(P) == 0:
        return -INF, -1
    sig = support_shifted_many(T, zf, P, tol)
    cp = coupling_flat(P)
    neg = sig < -tol.tol_exact
    margin = tol.tol_exact + 2.0 * np.sqrt(max(g, 0.0) * np.abs(cp)) if g < INF else np.full(len(cp), INF)
    bad = np.flatnonzero(neg & (cp >= 0) & (sig < -margin))
    use = neg & (cp < 0)
    lhs = float(np.max(-sig[use] ** 2 / (4.0 * cp[use]))) if np.any(use) else -INF
    return lhs, int(bad[0]) if len(bad) else -1


def estimate_m3(T: OperatorGraph, z: PairedPoint, candidate_ps: Sequence[PairedPoint],
                tol: TolerancePolicy = DEFAULT_TOL) -> SlackReport:
    """``gap(z) >= max { -sigma^2 / (4 c(p)) : sigma_{T-z}(p) < 0 }`` over the candidates.

    Raises
    ------
    R1ViolationError
        A candidate has clearly negative support but nonnegative coupling.
    """
    g = gap(T, z, tol)
    P = np.array([p.flat for p in candidate_ps]).reshape(len(candidate_ps), 2 * z.n)
    lhs, bad = m3_lower_bound(T, z, P, g, tol)
    if bad >= 0:
        p = candidate_ps[bad]
        raise R1ViolationError(f"sigma={support_shifted(T, z, p, tol):.6g} < 0 with c(p)={coupling(p):.6g} >= 0")
    return SlackReport.build(lhs, g, tol, "m3")


def estimate_m4(T: OperatorGraph, z: PairedPoint, p: PairedPoint,
                tol: TolerancePolicy = DEFAULT_TOL) -> SlackReport:
    """``sigma_{T-z}(p) + 2 sqrt(gap(z)) sqrt(|c(p)|) >= 0`` for NI operators.

    Gaps in ``[-tol_slack, 0)`` are clamped to zero before the square root.
    """
    g = gap(T, z, tol)
    if g < -tol.tol_slack:
        raise NIViolationError(f"gap(z) = {g:.6g} < 0 for an operator asserted NI")
    g = max(g, 0.0)
    s = support_shifted(T, z, p, tol)
    rhs = INF if g == INF else 2.0 * math.sqrt(g) * math.sqrt(abs(coupling(p)))
    return SlackReport.build(-s, rhs, tol, "m4")


def estimate_m7(T: OperatorGraph, z: PairedPoint, hull: HullGenerators,
                norm: WeightedNorm = WeightedNorm(), tol: TolerancePolicy = DEFAULT_TOL) -> SlackReport:
    """``gap(z) >= dist_delta(z, conv Graph T)^2 / 2`` for NI operators."""
    g = gap(T, z, tol)
    if g == INF:
        return SlackReport.build(-INF, INF, tol, "m7")
    res = project(hull, z.flat, norm, tol)
    return SlackReport.build(0.5 * res.distance ** 2, g, tol, "m7")


R1_LABELS = ("c>0 => sigma=+inf", "c=0 => sigma>=0", "sigma<0 => c<0")


def r1_implications(T: OperatorGraph, z: PairedPoint, p: PairedPoint,
                    tol: TolerancePolicy = DEFAULT_TOL) -> Tuple[str, ...]:
    """Violated coupling/support implications at ``(z, p)``; empty means all hold.

    Only meaningful for NI operators and ``z`` in the domain of ``phi_T``.
    Near ``c(p) = 0`` the support may dip to ``-2 sqrt(gap |c(p)|)``, so the
    sign tests use that margin on top of ``tol_exact``.
    """
    g = gap(T, z, tol)
    s = support_shifted(T, z, p, tol)
    c = coupling(p)
    out = []
    margin = _r1_margin(g, c, tol)
    if c > tol.tol_exact and s < INF:
        out.append(R1_LABELS[0])
    if abs(c) <= tol.tol_exact and s < -margin:
        out.append(R1_LABELS[1])
    if s < -margin and c >= -tol.tol_exact:
        out.append(R1_LABELS[2])
    return tuple(out)


def default_m3_candidates(n: int, rng: Optional[np.random.Generator] = None,
                          count: int = 64) -> list:
    """Directions ``(s e_i, -s e_j)`` for all index pairs and signs, padded with random ones."""
    rng = np.random.default_rng(0) if rng is None else rng
    eye = np.eye(n)
    out = []
    for i in range(n):
        for j in range(n):
            for s in (1.0, -1.0):
                out.append(PairedPoint(s * eye[i], -s * eye[j]))
    while len(out) < count:
        x = rng.standard_normal(n)
        out.append(PairedPoint(x, -x * rng.uniform(0.1, 3.0, size=n)))
    return out


# ---------------------------------------------------------------------------
# constructive witnesses for monotone operators

@dataclass
class BoundaryPoint:
    w: PairedPoint
    t: float
    residual: float


@dataclass
class NIFalsification:
    z: PairedPoint
    gap_value: float


def negative_coupling_witness(T: OperatorGraph, z: PairedPoint,
                              tol: TolerancePolicy = DEFAULT_TOL) -> PairedPoint:
    """A point ``w`` of ``T+`` with ``c(z - w) < 0``, for ``z`` with positive gap.

    ``w`` is taken on ``Graph T`` itself, at a near-minimiser of
    ``alpha -> c(z - alpha)``, whose infimum is ``-gap(z) < 0``.
    """
    g = gap(T, z, tol)
    if not g > tol.tol_slack:
        raise ValueError(f"need gap(z) > {tol.tol_slack}, got {g!r}")
    w = related_argmin(T, z, tol, target=-1.0)
    if not (coupling(z - w) < -tol.tol_exact and tplus_contains(T, w, tol)):
        raise SearchError("near-minimiser of c(z - .) is not a valid witness")
    return w


def boundary_point(T: OperatorGraph, z: PairedPoint, u: PairedPoint,
                   tol: TolerancePolicy = DEFAULT_TOL) -> BoundaryPoint:
    """A zero of the gap on the segment from ``z`` (gap > 0) to ``u`` in ``T+``.

    Bisection on ``f(s) = gap(z + s (u - z))`` down to ``bisect_width``.

    Raises
    ------
    ValueError
        Preconditions on ``z`` or ``u`` fail.
    DomainExitError
        ``f`` is infinite somewhere on the segment.
    """
    g0 = gap(T, z, tol)
    if not (tol.tol_slack < g0 < INF):
        raise ValueError(f"need finite gap(z) > {tol.tol_slack}, got {g0!r}")
    g1 = gap(T, u, tol)
    if not g1 <= tol.tol_slack:
        raise ValueError(f"u must lie in T+, gap(u) = {g1!r}")
    if not coupling(z - u) < -tol.tol_exact:
        raise ValueError("need c(z - u) < 0")
    d = u - z

    def f(s):
        v = gap(T, z + s * d, tol)
        if v == INF:
            raise DomainExitError(f"gap is +inf at s={s}")
        return v

    if g1 > 0:
        return BoundaryPoint(u, 1.0, abs(g1))
    lo, hi, flo, fhi = 0.0, 1.0, g0, g1
    while hi - lo > tol.bisect_width:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm > 0:
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
        if fm == 0:
            break
    s, fs = (lo, flo) if abs(flo) < abs(fhi) else (hi, fhi)
    return BoundaryPoint(z + s * d, s, abs(fs))


def segment_probe(T: OperatorGraph, z: PairedPoint, t: float,
                  tol: TolerancePolicy = DEFAULT_TOL) -> PairedPoint:
    """A graph point ``w`` with ``gap(t z + (1 - t) w) < 0``, for ``z`` with negative gap."""
    if not 0 < t < 1:
        raise ValueError("t must lie in (0, 1)")
    g = gap(T, z, tol)
    if not g < -tol.tol_slack:
        raise ValueError(f"need gap(z) < {-tol.tol_slack}, got {g!r}")
    if not isinstance(T, PolygonalOperator):
        raise SearchError("operator has no point with negative gap")
    zf = z.flat
    cands = [piece_argmin_coupling(T, zf, k, tol.tol_exact) for k in range(len(T))]
    W = np.array(cands)
    vals = gap_many(T, t * zf + (1 - t) * W, tol)
    k = int(np.argmin(vals))
    if not vals[k] < -tol.tol_exact:
        raise SearchError(f"no graph point found for t={t}; best gap {vals[k]:.3g}")
    return PairedPoint.from_flat(W[k])


@dataclass
class SamplerConfig:
    """Sampling plan for :func:`ni_falsify`."""

    seed: int = 0
    count: int = 4000
    scale: float = 2.0
    graph_fraction: float = 0.3
    noise: float = 0.3


def ni_falsify(T: OperatorGraph, config: SamplerConfig = SamplerConfig(),
               tol: TolerancePolicy = DEFAULT_TOL) -> Optional[NIFalsification]:
    """Search for ``z`` with ``gap(z) < -tol_slack``.

    Returns the first such point in sampling order, or ``None``.  ``None`` is
    not a certificate that ``T`` is NI.
    """
    rng = np.random.default_rng(config.seed)
    m = config.count
    n = T.n
    k = int(round(m * config.graph_fraction))
    Z = config.scale * rng.standard_normal((m, 2 * n))
    if k:
        Z[:k] = sample_graph_points(T, rng, k, config.scale) + config.noise * rng.standard_normal((k, 2 * n))
    g = gap_many(T, Z, tol)
    bad = np.flatnonzero(g < -tol.tol_slack)
    if len(bad) == 0:
        return None
    i = bad[0]
    return NIFalsification(PairedPoint.from_flat(Z[i]), float(g[i]))


# ---------------------------------------------------------------------------
# projections of dom phi_T

@dataclass
class ProjectionInclusion:
    """Where ``x`` and ``xstar`` sit relative to ``conv D(T)`` and ``conv R(T)``.

    ``x_shift`` is a point ``(x, v*)`` with gap ``<= tol_slack`` found along a
    separating direction when ``x`` is away from the domain hull (``None``
    otherwise or if the search failed); ``xstar_shift`` likewise.
    """

    x_dist: float
    xstar_dist: float
    x_shift: Optional[PairedPoint] = None
    xstar_shift: Optional[PairedPoint] = None

    def holds_ni(self, tol: TolerancePolicy = DEFAULT_TOL) -> bool:
        return self.x_dist <= tol.tol_iter and self.xstar_dist <= tol.tol_iter

    def holds_general(self, tol: TolerancePolicy = DEFAULT_TOL) -> bool:
        x_ok = self.x_dist <= tol.tol_iter or self.x_shift is not None
        xs_ok = self.xstar_dist <= tol.tol_iter or self.xstar_shift is not None
        return x_ok and xs_ok


def _shift_along(T, z, hull, q, primal, g, tol):
    if g <= tol.tol_slack:
        # z itself already lies in [phi_T <= c]
        return z
    u = separating_direction(hull, q, tol=tol)
    s = support_value(hull, u, tol) - float(q @ u)
    if not s < 0:
        return None
    step = (g + 1.0) / -s
    n = T.n
    for _ in range(60):
        zf = z.flat.copy()
        if primal:
            zf[n:] += step * u
        else:
            zf[:n] += step * u
        w = PairedPoint.from_flat(zf)
        if gap(T, w, tol) <= tol.tol_slack:
            return w
        step *= 2.0
    return None


def projection_inclusion(T: OperatorGraph, z: PairedPoint, search: bool = True,
                         tol: TolerancePolicy = DEFAULT_TOL) -> ProjectionInclusion:
    """Distances of ``z``'s factors to the domain/range hulls, with shift witnesses.

    For ``z`` in the domain of ``phi_T``: if ``x`` is not in ``conv D(T)``,
    moving the dual factor along a separating direction ``u`` drives the gap
    down at the rate ``sigma_{D(T)-x}(u) < 0``, which reaches ``[phi_T <= c]``.
    """
    g = gap(T, z, tol)
    if g == INF:
        raise ValueError("z is outside the domain of phi_T")
    dh, rh = domain_hull(T), range_hull(T)
    xd = project(dh, z.x, tol=tol).distance
    xsd = project(rh, z.xstar, tol=tol).distance
    out = ProjectionInclusion(xd, xsd)
    if search and xd > tol.tol_iter:
        out.x_shift = _shift_along(T, z, dh, z.x, True, g, tol)
    if search and xsd > tol.tol_iter:
        out.xstar_shift = _shift_along(T, z, rh, z.xstar, False, g, tol)
    return out


@dataclass
class AffineShift:
    """Result of the affine-hull construction for one factor of ``z``.

    ``inside`` says the factor lies in the affine hull; otherwise ``shifted``
    is the point with the other factor moved by ``gamma u*`` and
    ``shifted_gap`` its gap, which should vanish.
    """

    inside: bool
    residual: float
    shifted: Optional[PairedPoint] = None
    shifted_gap: float = 0.0


def _aff_generators(T: OperatorGraph, sl: slice):
    if not isinstance(T, PolygonalOperator):
        return None
    pts = []
    for b, d in zip(T.bases, T.dirs):
        pts.append(b[sl])
        if np.any(d[sl]):
            pts.append(b[sl] + d[sl])
    return pts


def affine_hull_shift(T: OperatorGraph, z: PairedPoint, primal: bool = True,
                      tol: TolerancePolicy = DEFAULT_TOL) -> AffineShift:
    """Check ``x in aff D(T)``, else build ``(x, x* + gamma u*)`` in ``[phi_T = c]``.

    ``u*`` is the component of ``x - a0`` orthogonal to the affine hull and
    ``gamma = gap(z) / <x - a0, u*>``.  With ``primal=False`` the roles of the
    factors are exchanged and ``R(T)`` is used.
    """
    g = gap(T, z, tol)
    if g == INF:
        raise ValueError("z is outside the domain of phi_T")
    n = T.n
    sl = slice(0, n) if primal else slice(n, 2 * n)
    pts = _aff_generators(T, sl)
    if pts is None:
        # linear and cubic operators here have full-dimensional domain
        if isinstance(T, CubicOperator) or primal:
            return AffineShift(True, 0.0)
        pts = [T.b] + [T.b + T.A[:, i] for i in range(n)]
    base, basis = affine_hull_basis(pts, tol)
    own = z.x if primal else z.xstar
    res = affine_hull_residual(base, basis, own)
    if res <= tol.tol_iter:
        return AffineShift(True, res)
    r = own - base
    if basis:
        B = np.array(basis).T
        coef, *_ = np.linalg.lstsq(B, r, rcond=None)
        r = r - B @ coef
    gamma = g / float((own - base) @ r)
    zf = z.flat.copy()
    if primal:
        zf[n:] += gamma * r
    else:
        zf[:n] += gamma * r
    w = PairedPoint.from_flat(zf)
    return AffineShift(False, res, w, gap(T, w, tol))
