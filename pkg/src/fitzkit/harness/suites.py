"""Randomized verification suites and their reports.

A suite runs ``count`` instances of one inequality or identity.  Instances are
produced in blocks: each block draws a fresh operator from the suite's
families and a batch of inputs, using a generator seeded by
``(seed, suite index, block index)``, so a report depends only on
``(name, seed, count)`` and the tolerance policy.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..core import DEFAULT_TOL, INF, PairedPoint, TolerancePolicy, WeightedNorm, coupling_flat, format_xreal
from ..fitz import (
    DomainExitError,
    SearchError,
    _xscale_many,
    boundary_point,
    affine_hull_shift,
    fitzpatrick_many,
    gap,
    gap_many,
    m3_lower_bound,
    monotonically_related_gap_many,
    negative_coupling_witness,
    projection_inclusion,
    segment_probe,
    slack_arrays,
    support_shifted_many,
    default_m3_candidates,
)
from ..hull import ProjectionError, lemma_argmin_sigma_check, project
from ..opmodel import OperatorGraph, graph_hull, sample_graph_points
from .generators import FAMILIES, MONOTONE_FAMILIES, NI_FAMILIES, Family
from .io import operator_to_json
from .sampling import (
    finite_gap_points,
    finite_support_directions,
    null_directions,
    sample_directions,
    sample_points,
)

__all__ = ["SUITE_NAMES", "DEFAULT_COUNTS", "SuiteReport", "run_suite", "run_all", "UnknownSuiteError"]

BLOCK = 25

SUITE_NAMES = (
    "main",
    "m2",
    "m3",
    "m4",
    "m7",
    "m9",
    "eq5-identity",
    "i1-i3",
    "r1",
    "prop-i-ii-iii",
    "argmin-sigma",
    "m8-projections",
    "eq3-eq4",
    "graph-in-phi-le-c",
)

DEFAULT_COUNTS = {
    "main": 2000,
    "m2": 1000,
    "m3": 300,
    "m4": 1000,
    "m7": 300,
    "m9": 200,
    "eq5-identity": 2000,
    "i1-i3": 1000,
    "r1": 1000,
    "prop-i-ii-iii": 200,
    "argmin-sigma": 300,
    "m8-projections": 200,
    "eq3-eq4": 200,
    "graph-in-phi-le-c": 1000,
}

ALL_FAMILIES = tuple(FAMILIES)
NON_MAXIMAL_MONOTONE = tuple(k for k, f in FAMILIES.items() if f.monotone and not f.maximal)


class UnknownSuiteError(KeyError):
    pass


@dataclass
class Outcome:
    status: str  # "pass", "fail" or "indeterminate"
    slack: float
    message: str = ""
    detail: Optional[dict] = None
    nonconverged: bool = False


@dataclass
class _Context:
    tol: TolerancePolicy
    resampled: int = 0
    attempts: int = 0


@dataclass
class SuiteReport:
    """Aggregate of one suite run; ``passed + failed + indeterminate == count``."""

    name: str
    seed: int
    count: int
    passed: int = 0
    failed: int = 0
    indeterminate: int = 0
    nonconverged: int = 0
    resampled: int = 0
    attempts: int = 0
    worst_slack: float = INF
    failures: List[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.failed == 0

    @property
    def resample_rate(self) -> float:
        return self.resampled / self.attempts if self.attempts else 0.0

    def exit_code(self) -> int:
        if self.failed > self.nonconverged:
            return 1
        if self.nonconverged:
            return 3
        return 0

    CSV_HEADER = "suite,seed,count,passed,failed,indeterminate,nonconverged,resampled,worst_slack"

    def csv_row(self) -> str:
        return ",".join([self.name, str(self.seed), str(self.count), str(self.passed), str(self.failed),
                         str(self.indeterminate), str(self.nonconverged), str(self.resampled),
                         format_xreal(self.worst_slack)])

    def to_csv(self) -> str:
        return self.CSV_HEADER + "\n" + self.csv_row() + "\n"

    def to_text(self, max_failures: int = 10) -> str:
        lines = [
            f"suite         {self.name}",
            f"seed          {self.seed}",
            f"count         {self.count}",
            f"passed        {self.passed}",
            f"failed        {self.failed}",
            f"indeterminate {self.indeterminate}",
            f"nonconverged  {self.nonconverged}",
            f"resampled     {self.resampled}",
            f"worst_slack   {format_xreal(self.worst_slack)}",
        ]
        for f in self.failures[:max_failures]:
            lines.append(f"failure #{f['index']}: {f['message']}")
        if len(self.failures) > max_failures:
            lines.append(f"... {len(self.failures) - max_failures} more failures")
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# helpers

def _pick(rng: np.random.Generator, names: Sequence[str]) -> Tuple[Family, OperatorGraph]:
    fam = FAMILIES[names[int(rng.integers(len(names)))]]
    return fam, fam.make(rng)


def _detail(T: OperatorGraph, **inputs) -> dict:
    out = {"operator": operator_to_json(T)}
    for k, v in inputs.items():
        out[k] = np.asarray(v).tolist() if isinstance(v, np.ndarray) else v
    return out


def _from_slacks(T, slack, ok, label, **rows) -> List[Outcome]:
    out = []
    for i, (s, good) in enumerate(zip(slack.tolist(), ok.tolist())):
        if math.isnan(s):
            out.append(Outcome("indeterminate", s, f"{label}: (+inf) + (-inf)"))
        elif good:
            out.append(Outcome("pass", s))
        else:
            det = _detail(T, **{k: v[i] for k, v in rows.items()})
            out.append(Outcome("fail", s, f"{label}: slack {s:.6g}", det))
    return out


# ---------------------------------------------------------------------------
# suites; each returns at most ``need`` outcomes for one block

def _suite_main(rng, need, ctx):
    fam, T = _pick(rng, ALL_FAMILIES)
    m = min(BLOCK, need)
    Z = sample_points(T, rng, m)
    P = sample_directions(T, rng, Z)
    t = rng.uniform(0.0, 10.0, size=m)
    t[rng.uniform(size=m) < 0.05] = 0.0
    g0 = gap_many(T, Z, ctx.tol)
    sig = support_shifted_many(T, Z, P, ctx.tol)
    with np.errstate(invalid="ignore"):
        rhs = g0 - t * t * coupling_flat(P) + _xscale_many(t, sig)
    lhs = gap_many(T, Z + t[:, None] * P, ctx.tol)
    slack, ok = slack_arrays(lhs, rhs, ctx.tol)
    return _from_slacks(T, slack, ok, f"main[{fam.name}]", z=Z, p=P, t=t)


def _suite_m2(rng, need, ctx):
    fam, T = _pick(rng, NI_FAMILIES)
    Z = finite_gap_points(T, rng, min(BLOCK, need))
    m = len(Z)
    if m == 0:
        return []
    P = sample_directions(T, rng, Z)
    t = rng.uniform(0.0, 5.0, size=m)
    sig = support_shifted_many(T, Z, P, ctx.tol)
    with np.errstate(invalid="ignore"):
        lhs = t * t * coupling_flat(P) - _xscale_many(t, sig)
    slack, ok = slack_arrays(lhs, gap_many(T, Z, ctx.tol), ctx.tol)
    return _from_slacks(T, slack, ok, f"m2[{fam.name}]", z=Z, p=P, t=t)


def _m3_candidates(T, rng, z):
    n = T.n
    base = np.array([p.flat for p in default_m3_candidates(n, rng, 64)])
    chords = sample_graph_points(T, rng, 16, 1.5) - z
    return np.vstack([base, chords, finite_support_directions(T, rng, 16), null_directions(rng, 8, n)])


def _suite_m3(rng, need, ctx):
    fam, T = _pick(rng, NI_FAMILIES)
    Z = finite_gap_points(T, rng, min(BLOCK, need))
    out = []
    for z in Z:
        g = float(gap_many(T, z, ctx.tol)[0])
        P = _m3_candidates(T, rng, z)
        lhs, bad = m3_lower_bound(T, z, P, g, ctx.tol)
        if bad >= 0:
            out.append(Outcome("fail", -INF, f"m3[{fam.name}]: negative support with c(p) >= 0",
                               _detail(T, z=z, p=P[bad])))
            continue
        slack, ok = slack_arrays(np.array([lhs]), np.array([g]), ctx.tol)
        out.extend(_from_slacks(T, slack, ok, f"m3[{fam.name}]", z=z[None]))
    return out


def _suite_m4(rng, need, ctx):
    fam, T = _pick(rng, NI_FAMILIES)
    Z = finite_gap_points(T, rng, min(BLOCK, need))
    if len(Z) == 0:
        return []
    P = sample_directions(T, rng, Z)
    g = gap_many(T, Z, ctx.tol)
    sig = support_shifted_many(T, Z, P, ctx.tol)
    with np.errstate(invalid="ignore"):
        rhs = 2.0 * np.sqrt(np.maximum(g, 0.0)) * np.sqrt(np.abs(coupling_flat(P)))
    slack, ok = slack_arrays(-sig, rhs, ctx.tol)
    out = _from_slacks(T, slack, ok, f"m4[{fam.name}]", z=Z, p=P)
    for i in np.flatnonzero(g < -ctx.tol.tol_slack):
        out[i] = Outcome("fail", float(g[i]), f"m4[{fam.name}]: NI violated, gap {g[i]:.6g}",
                         _detail(T, z=Z[i]))
    return out


def _suite_m7(rng, need, ctx):
    fam, T = _pick(rng, NI_FAMILIES)
    hull = graph_hull(T)
    Z = sample_points(T, rng, min(BLOCK, need))
    g = gap_many(T, Z, ctx.tol)
    out = []
    for z, gz in zip(Z, g.tolist()):
        delta = 1.0 if rng.uniform() < 0.5 else float(10.0 ** rng.uniform(-2, 2))
        if gz == INF:
            out.append(Outcome("pass", INF))
            continue
        try:
            res = project(hull, z, WeightedNorm(delta), ctx.tol)
        except ProjectionError as exc:
            out.append(Outcome("fail", -INF, f"m7[{fam.name}]: {exc}", _detail(T, z=z, delta=delta),
                               nonconverged=True))
            continue
        slack, ok = slack_arrays(np.array([0.5 * res.distance ** 2]), np.array([gz]), ctx.tol)
        out.extend(_from_slacks(T, slack, ok, f"m7[{fam.name}] delta={delta:.3g}", z=z[None]))
    return out


def _suite_r1(rng, need, ctx):
    fam, T = _pick(rng, NI_FAMILIES)
    Z = finite_gap_points(T, rng, min(BLOCK, need))
    m = len(Z)
    if m == 0:
        return []
    n = T.n
    P = sample_directions(T, rng, Z)
    kind = rng.uniform(size=m)
    P[kind < 0.25] = null_directions(rng, m, n)[kind < 0.25]
    pos = (kind >= 0.25) & (kind < 0.4)
    u = rng.standard_normal((m, n))
    P[pos] = np.hstack([u, u + 0.1 * rng.standard_normal((m, n))])[pos]
    g = gap_many(T, Z, ctx.tol)
    sig = support_shifted_many(T, Z, P, ctx.tol)
    c = coupling_flat(P)
    te = ctx.tol.tol_exact
    margin = te + 2.0 * np.sqrt(np.maximum(g, 0.0) * np.abs(c))
    v1 = (c > te) & (sig < INF)
    v2 = (np.abs(c) <= te) & (sig < -margin)
    v3 = (sig < -margin) & (c >= -te)
    slack = np.where(c < -te, INF, sig + margin)
    slack = np.where(v1, -INF, slack)
    out = []
    for i in range(m):
        bad = [lab for lab, v in zip(("c>0 => sigma=+inf", "c=0 => sigma>=0", "sigma<0 => c<0"),
                                     (v1[i], v2[i], v3[i])) if v]
        if bad:
            out.append(Outcome("fail", float(slack[i]), f"r1[{fam.name}]: {', '.join(bad)}",
                               _detail(T, z=Z[i], p=P[i])))
        else:
            out.append(Outcome("pass", float(slack[i])))
    return out


def _suite_eq5(rng, need, ctx):
    fam, T = _pick(rng, ALL_FAMILIES)
    Z = sample_points(T, rng, min(BLOCK, need))
    phi = fitzpatrick_many(T, Z, ctx.tol)
    inf = monotonically_related_gap_many(T, Z, ctx.tol)
    c = coupling_flat(Z)
    out = []
    for i, (f, m_, cz) in enumerate(zip(phi.tolist(), inf.tolist(), c.tolist())):
        if f == INF or m_ == -INF:
            if f == INF and m_ == -INF:
                out.append(Outcome("pass", INF))
            else:
                out.append(Outcome("fail", -INF, f"eq5[{fam.name}]: phi={f} but inf={m_}", _detail(T, z=Z[i])))
            continue
        err = abs(f + m_ - cz)
        if err <= ctx.tol.tol_slack:
            out.append(Outcome("pass", -err))
        else:
            out.append(Outcome("fail", -err, f"eq5[{fam.name}]: |phi + inf - c| = {err:.3g}", _detail(T, z=Z[i])))
    return out


def _suite_i123(rng, need, ctx):
    fam, T = _pick(rng, MONOTONE_FAMILIES)
    m = min(BLOCK, need)
    tol = ctx.tol
    Z = sample_points(T, rng, m)
    W = sample_points(T, rng, m)
    G = sample_graph_points(T, rng, m, 1.5)
    t = rng.uniform(size=m)
    tc = t[:, None]
    D = Z - W
    # coupling along a segment: exact quadratic identity
    lhs1 = coupling_flat(tc * Z + (1 - tc) * W)
    rhs1 = t * coupling_flat(Z) + (1 - t) * coupling_flat(W) - t * (1 - t) * coupling_flat(D)
    err1 = np.abs(lhs1 - rhs1)
    # convexity of phi, and the gap bound it implies along the segment
    gz, gw = gap_many(T, Z, tol), gap_many(T, W, tol)
    fz, fw = fitzpatrick_many(T, Z, tol), fitzpatrick_many(T, W, tol)
    fm = fitzpatrick_many(T, tc * Z + (1 - tc) * W, tol)
    with np.errstate(invalid="ignore"):
        conv_rhs = _xscale_many(t, fz) + _xscale_many(1 - t, fw)
        rhs2 = _xscale_many(t, gz) + _xscale_many(1 - t, gw) + t * (1 - t) * coupling_flat(D)
    sc, okc = slack_arrays(fm, conv_rhs, tol)
    okc = sc >= -tol.tol_exact * (1.0 + np.abs(np.where(np.isfinite(conv_rhs), conv_rhs, 0.0)))
    s2, ok2 = slack_arrays(gap_many(T, tc * Z + (1 - tc) * W, tol), rhs2, tol)
    # the sharper bound when the far endpoint lies on the graph of a monotone T
    with np.errstate(invalid="ignore"):
        rhs3 = _xscale_many(t, gz + (1 - t) * coupling_flat(Z - G))
    s3, ok3 = slack_arrays(gap_many(T, tc * Z + (1 - tc) * G, tol), rhs3, tol)
    out = []
    for i in range(m):
        if np.isnan(s2[i]) or np.isnan(s3[i]) or np.isnan(sc[i]):
            out.append(Outcome("indeterminate", math.nan, "i1-i3: (+inf) + (-inf)"))
            continue
        bad = []
        if err1[i] > tol.tol_exact:
            bad.append(f"i1 err {err1[i]:.3g}")
        if not okc[i]:
            bad.append(f"phi convexity slack {sc[i]:.3g}")
        if not ok2[i]:
            bad.append(f"i2 slack {s2[i]:.3g}")
        if not ok3[i]:
            bad.append(f"i3 slack {s3[i]:.3g}")
        worst = float(min(-err1[i], sc[i], s2[i], s3[i]))
        if bad:
            out.append(Outcome("fail", worst, f"i1-i3[{fam.name}]: " + "; ".join(bad),
                               _detail(T, z=Z[i], w=W[i], graph_w=G[i], t=float(t[i]))))
        else:
            out.append(Outcome("pass", worst))
    return out


def _prop_one(rng, ctx) -> Outcome:
    """Witness constructions: the negative-coupling witness and boundary point on a
    monotone operator, and the segment probe on a non-maximal one."""
    tol = ctx.tol
    msgs = []
    worst = INF
    # (i) and (ii)
    for _ in range(50):
        fam, T = _pick(rng, MONOTONE_FAMILIES)
        Z = sample_points(T, rng, 16)
        g = gap_many(T, Z, tol)
        ok = np.flatnonzero((g > tol.tol_slack) & (g < INF))
        if len(ok):
            z = PairedPoint.from_flat(Z[ok[0]])
            break
    else:
        return Outcome("fail", -INF, "prop: no z with positive finite gap found")
    ctx.attempts += 1
    try:
        w = negative_coupling_witness(T, z, tol)
    except SearchError as exc:
        return Outcome("fail", -INF, f"prop(i)[{fam.name}]: {exc}", _detail(T, z=z.flat))
    cw = float(coupling_flat((z - w).flat))
    if not (cw < -tol.tol_exact and gap(T, w, tol) <= tol.tol_slack):
        msgs.append(f"(i) c(z-w)={cw:.3g}")
    worst = min(worst, -tol.tol_exact - cw)
    try:
        bp = boundary_point(T, z, w, tol)
    except DomainExitError:
        ctx.resampled += 1
        return _prop_one(rng, ctx)
    gb = gap(T, bp.w, tol)
    cb = float(coupling_flat((z - bp.w).flat))
    if not (abs(gb) <= tol.tol_iter and cb < -tol.tol_exact):
        msgs.append(f"(ii) gap(w)={gb:.3g}, c(z-w)={cb:.3g}")
    worst = min(worst, tol.tol_iter - abs(gb))
    # (iii)
    for _ in range(50):
        fam3, T3 = _pick(rng, NON_MAXIMAL_MONOTONE)
        Z = sample_points(T3, rng, 16)
        g = gap_many(T3, Z, tol)
        # the probe gap scales like t^2 gap(z3), so take the most negative sample
        k = int(np.argmin(g))
        if g[k] < -tol.tol_slack:
            z3 = PairedPoint.from_flat(Z[k])
            break
    else:
        return Outcome("fail", -INF, "prop: no z with negative gap found")
    t = float(rng.uniform(0.02, 0.98))
    try:
        w3 = segment_probe(T3, z3, t, tol)
        g3 = gap(T3, t * z3 + (1 - t) * w3, tol)
        if not g3 < -tol.tol_exact:
            msgs.append(f"(iii) gap={g3:.3g}")
        worst = min(worst, -tol.tol_exact - g3)
    except SearchError as exc:
        msgs.append(f"(iii) {exc}")
    if msgs:
        return Outcome("fail", worst, f"prop[{fam.name}/{fam3.name}]: " + "; ".join(msgs),
                       _detail(T, z=z.flat, operator3=operator_to_json(T3), z3=z3.flat, t=t))
    return Outcome("pass", worst)


def _suite_prop(rng, need, ctx):
    return [_prop_one(rng, ctx) for _ in range(min(BLOCK, need))]


def _suite_argmin(rng, need, ctx):
    out = []
    for _ in range(min(BLOCK, need)):
        d = int(rng.integers(1, 5))
        m = int(rng.integers(1, 9))
        shift = 0.0 if rng.uniform() < 0.5 else rng.normal(0.0, 2.0, size=d)
        pts = rng.standard_normal((m, d)) + shift
        rays = rng.standard_normal((int(rng.integers(0, 3)), d)) if rng.uniform() < 0.2 else np.zeros((0, d))
        try:
            agree = lemma_argmin_sigma_check(pts, rays, n_random=64, rng=rng, tol=ctx.tol)
        except ProjectionError as exc:
            out.append(Outcome("fail", -INF, f"argmin-sigma: {exc}", {"points": pts.tolist(), "rays": rays.tolist()},
                               nonconverged=True))
            continue
        if agree:
            out.append(Outcome("pass", 0.0))
        else:
            out.append(Outcome("fail", -INF, "argmin-sigma: membership and support sign disagree",
                               {"points": pts.tolist(), "rays": rays.tolist()}))
    return out


def _projection_suite(names, check, label):
    def run(rng, need, ctx):
        fam, T = _pick(rng, names)
        Z = finite_gap_points(T, rng, min(BLOCK, need))
        out = []
        for z in Z:
            zp = PairedPoint.from_flat(z)
            try:
                ok, slack, msg = check(T, zp, ctx.tol)
            except ProjectionError as exc:
                out.append(Outcome("fail", -INF, f"{label}[{fam.name}]: {exc}", _detail(T, z=z), nonconverged=True))
                continue
            if ok:
                out.append(Outcome("pass", slack))
            else:
                out.append(Outcome("fail", slack, f"{label}[{fam.name}]: {msg}", _detail(T, z=z)))
        return out
    return run


def _check_m8(T, z, tol):
    pi = projection_inclusion(T, z, search=False, tol=tol)
    worst = max(pi.x_dist, pi.xstar_dist)
    return pi.holds_ni(tol), -worst, f"dist(x)={pi.x_dist:.3g}, dist(x*)={pi.xstar_dist:.3g}"


def _check_m9(T, z, tol):
    pi = projection_inclusion(T, z, search=True, tol=tol)
    msgs = []
    if not pi.holds_general(tol):
        msgs.append(f"no shift found: dist(x)={pi.x_dist:.3g}, dist(x*)={pi.xstar_dist:.3g}")
    worst = 0.0
    for primal in (True, False):
        a = affine_hull_shift(T, z, primal, tol)
        if not a.inside:
            worst = min(worst, -abs(a.shifted_gap))
            if abs(a.shifted_gap) > tol.tol_iter:
                msgs.append(f"affine shift ({'x' if primal else 'x*'}) has gap {a.shifted_gap:.3g}")
    return not msgs, worst, "; ".join(msgs)


def _check_eq34(T, z, tol):
    pi = projection_inclusion(T, z, search=True, tol=tol)
    ok = pi.holds_general(tol)
    return ok, 0.0 if ok else -max(pi.x_dist, pi.xstar_dist), \
        f"x or x* neither hull-near nor shiftable into T+ (dist {pi.x_dist:.3g}, {pi.xstar_dist:.3g})"


_POLY_MONOTONE = tuple(k for k in MONOTONE_FAMILIES if FAMILIES[k].polygonal)
_eq34_domain = _projection_suite(_POLY_MONOTONE, _check_eq34, "eq3-eq4")


def _suite_eq34(rng, need, ctx):
    """Half the instances: sampled T+ points lie in dom phi_T; half: dom phi_T projections."""
    fam, T = _pick(rng, _POLY_MONOTONE)
    m = min(BLOCK, need)
    k = m // 2
    out = []
    if k:
        Z = sample_points(T, rng, 8 * k)
        rel = monotonically_related_gap_many(T, Z, ctx.tol)
        Z = Z[rel >= -ctx.tol.tol_slack][:k]
        phi = fitzpatrick_many(T, Z, ctx.tol)
        for z, f in zip(Z, phi.tolist()):
            if f < INF:
                out.append(Outcome("pass", 0.0))
            else:
                out.append(Outcome("fail", -INF, f"eq3-eq4[{fam.name}]: point of T+ outside dom phi",
                                   _detail(T, z=z)))
    return out + _eq34_domain(rng, m - len(out), ctx)


def _suite_graph(rng, need, ctx):
    fam, T = _pick(rng, MONOTONE_FAMILIES)
    G = sample_graph_points(T, rng, min(BLOCK, need), 1.5)
    g = gap_many(T, G, ctx.tol)
    slack = -np.abs(g) if fam.maximal else -np.maximum(g, 0.0)
    ok = slack >= -ctx.tol.tol_slack
    return _from_slacks(T, slack, ok, f"graph[{fam.name}]{' maximal' if fam.maximal else ''}", z=G)


_SUITES: Dict[str, Callable] = {
    "main": _suite_main,
    "m2": _suite_m2,
    "m3": _suite_m3,
    "m4": _suite_m4,
    "m7": _suite_m7,
    "m9": _projection_suite(ALL_FAMILIES, _check_m9, "m9"),
    "eq5-identity": _suite_eq5,
    "i1-i3": _suite_i123,
    "r1": _suite_r1,
    "prop-i-ii-iii": _suite_prop,
    "argmin-sigma": _suite_argmin,
    "m8-projections": _projection_suite(NI_FAMILIES, _check_m8, "m8"),
    "eq3-eq4": _suite_eq34,
    "graph-in-phi-le-c": _suite_graph,
}


def run_suite(name: str, seed: int = 0, count: Optional[int] = None,
              tol: TolerancePolicy = DEFAULT_TOL, replay_dir: Optional[Path] = None) -> SuiteReport:
    """Run ``count`` instances of the named suite (default count if ``None``).

    Failed instances are written as JSON replay files to ``replay_dir`` when
    given.

    Raises
    ------
    UnknownSuiteError
        ``name`` is not one of :data:`SUITE_NAMES`.
    """
    if name not in _SUITES:
        raise UnknownSuiteError(f"unknown suite {name!r}; choose from {', '.join(SUITE_NAMES)}")
    if seed < 0:
        raise ValueError("seed must be nonnegative")
    count = DEFAULT_COUNTS[name] if count is None else int(count)
    fn = _SUITES[name]
    sid = SUITE_NAMES.index(name)
    ctx = _Context(tol)
    outcomes: List[Outcome] = []
    block = 0
    while len(outcomes) < count:
        if block > 100 * (count // BLOCK + 1):
            raise RuntimeError(f"suite {name} stopped producing instances")
        rng = np.random.default_rng([seed, sid, block])
        block += 1
        outcomes.extend(fn(rng, count - len(outcomes), ctx))
    outcomes = outcomes[:count]
    rep = SuiteReport(name, seed, count, resampled=ctx.resampled, attempts=ctx.attempts)
    slacks = []
    for i, o in enumerate(outcomes):
        if o.status == "pass":
            rep.passed += 1
        elif o.status == "indeterminate":
            rep.indeterminate += 1
            continue
        else:
            rep.failed += 1
            rep.nonconverged += int(o.nonconverged)
            rec = {"index": i, "message": o.message, "slack": format_xreal(o.slack)}
            rep.failures.append(rec)
            if replay_dir is not None:
                _write_replay(Path(replay_dir), name, seed, count, i, o)
        slacks.append(o.slack)
    if slacks:
        rep.worst_slack = float(min(slacks))
    return rep


def _write_replay(folder: Path, name, seed, count, index, o: Outcome) -> None:
    folder.mkdir(parents=True, exist_ok=True)
    payload = {
        "suite": name,
        "seed": seed,
        "count": count,
        "index": index,
        "message": o.message,
        "slack": format_xreal(o.slack),
        "reproduce": f"fitzkit check {name} --seed {seed} --count {count}",
        "instance": o.detail,
    }
    (folder / f"{name}-seed{seed}-{index}.json").write_text(json.dumps(payload, indent=2) + "\n")


def run_all(seed: int = 0, tol: TolerancePolicy = DEFAULT_TOL,
            counts: Optional[Dict[str, int]] = None) -> List[SuiteReport]:
    counts = counts or {}
    return [run_suite(n, seed, counts.get(n), tol) for n in SUITE_NAMES]
