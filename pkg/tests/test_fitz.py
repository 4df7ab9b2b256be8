import math

import numpy as np
import pytest

from fitzkit.core import INF, DimensionError, PairedPoint, pp, coupling, pair_dot, WeightedNorm
from fitzkit.fitz import (
    DomainExitError,
    NIViolationError,
    R1ViolationError,
    SamplerConfig,
    SlackReport,
    affine_hull_shift,
    boundary_point,
    default_m3_candidates,
    estimate_m2,
    estimate_m3,
    estimate_m4,
    estimate_m7,
    estimate_main,
    fitzpatrick,
    fitzpatrick_many,
    gap,
    gap_many,
    monotonically_related_gap,
    monotonically_related_gap_many,
    negative_coupling_witness,
    ni_falsify,
    projection_inclusion,
    r1_implications,
    related_argmin,
    segment_probe,
    slack_arrays,
    support_shifted,
    support_shifted_many,
    tplus_contains,
)
from fitzkit.hull import HullGenerators, project
from fitzkit.opmodel import (
    CubicOperator,
    LinearMonotoneOperator,
    PointPiece,
    PolygonalOperator,
    RayPiece,
    SegmentPiece,
    LinePiece,
    domain_hull,
    graph_hull,
    sample_graph_points,
)
from fitzkit.harness.generators import FAMILIES, gen_linear_monotone, gen_maximal_1d, gen_point_cloud_monotone
from oracles import dense_phi, dense_inf_coupling, linear_phi_numeric

O = pp(0, 0)


# -- evaluation examples ---------------------------------------------------

def test_fitzpatrick_examples(cross, identity, origin):
    assert fitzpatrick(cross, O) == 0.0
    assert fitzpatrick(cross, pp(1, 0)) == INF
    assert fitzpatrick(identity, pp(1, 1)) == 1.0
    assert fitzpatrick(origin, pp(5, -2)) == 0.0
    assert fitzpatrick(CubicOperator(), O) == 0.0


def test_identity_closed_form(identity, rng):
    Z = rng.uniform(-3, 3, size=(500, 2))
    assert np.allclose(fitzpatrick_many(identity, Z), (Z[:, 0] + Z[:, 1]) ** 2 / 4, rtol=0, atol=1e-12)


# values derived with mpmath roots of 4a^3 - 3x a^2 - x* (40 digits) and a dense grid
@pytest.mark.parametrize("z, expected", [((1, 1), 1.0), ((2, -1), 0.25), ((-1, 3), 1.5181239788706208),
                                         ((0.3, -2.5), 1.4376519565876011)])
def test_cubic_fitzpatrick_frozen(z, expected):
    assert fitzpatrick(CubicOperator(), pp(*z)) == pytest.approx(expected, abs=1e-12)


def test_linear_fitzpatrick_frozen():
    # u = A^T x + x* - b = (-1, 4.3); phi = <x, b> + u^T A_s^{-1} u / 4 = -1.5 + 4.7475
    A = [[2.0, 1.0], [-1.0, 1.0]]
    b = [0.5, -1.0]
    z = PairedPoint([1.0, 2.0], [-0.5, 0.3])
    T = LinearMonotoneOperator(A, b)
    assert fitzpatrick(T, z) == pytest.approx(3.2475, abs=1e-12)
    assert linear_phi_numeric(A, b, z.flat) == pytest.approx(3.2475, abs=1e-7)


def test_linear_spd_gap_formula(rng):
    for _ in range(20):
        n = int(rng.integers(1, 5))
        M = rng.normal(size=(n, n))
        A = M @ M.T + 0.1 * np.eye(n)
        T = LinearMonotoneOperator(A)
        z = PairedPoint.from_flat(rng.normal(size=2 * n))
        r = A @ z.x - z.xstar
        assert gap(T, z) == pytest.approx(0.25 * r @ np.linalg.solve(A, r), abs=1e-9)


def test_linear_singular_domain():
    T = LinearMonotoneOperator([[0.0]], [2.0])  # graph = horizontal line x* = 2
    assert fitzpatrick(T, pp(1, 2)) == 2.0
    assert fitzpatrick(T, pp(1, 2.5)) == INF
    assert monotonically_related_gap(T, pp(1, 2.5)) == -INF
    w = related_argmin(T, pp(1, 2.5))
    assert coupling(pp(1, 2.5) - w) < -1.0


def test_polygonal_matches_dense_oracle(rng):
    for s in range(40):
        T = gen_maximal_1d(s)
        pieces = [(p.base.flat, p.dir.flat, p.lo, p.hi) for p in T.pieces]
        z = rng.normal(size=2)
        phi = fitzpatrick(T, PairedPoint.from_flat(z))
        grid = dense_phi(pieces, z, k=40001, span=60.0)
        if phi < INF:
            assert grid <= phi + 1e-9
            assert grid >= phi - 1e-4
        inf = monotonically_related_gap(T, PairedPoint.from_flat(z))
        if inf > -INF:
            assert dense_inf_coupling(pieces, z, k=40001, span=60.0) >= inf - 1e-9


def test_gap_examples(identity, origin):
    assert gap(identity, pp(1, -1)) == 1.0
    assert gap(origin, pp(1, 1)) == -1.0


def test_dimension_mismatch(identity):
    with pytest.raises(DimensionError):
        fitzpatrick(identity, pp([1, 2], [3, 4]))
    with pytest.raises(DimensionError):
        support_shifted(identity, O, pp([1, 2], [3, 4]))


def test_support_examples(identity):
    T = PolygonalOperator([PointPiece(pp(1, 2))])
    assert support_shifted(T, O, pp(3, 4)) == 10.0
    assert support_shifted(PolygonalOperator([RayPiece(O, pp(1, 0))]), O, pp(0, 1)) == INF
    for s in (0.5, 1.0, 2.0, -1.0):
        assert support_shifted(identity, pp(1, -1), pp(s, -s)) == pytest.approx(2 * s, abs=1e-15)


def test_support_positive_homogeneity(rng):
    for name in ("maximal1d", "poly-monotone", "linear", "cloud"):
        T = FAMILIES[name].make(rng)
        Z = rng.normal(size=(50, 2 * T.n))
        P = rng.normal(size=(50, 2 * T.n))
        lam = rng.uniform(0, 5, size=50)
        a = support_shifted_many(T, Z, lam[:, None] * P)
        b = support_shifted_many(T, Z, P)
        fin = np.isfinite(b)
        assert np.allclose(a[fin], lam[fin] * b[fin], rtol=1e-9, atol=1e-9)
        assert np.all(~np.isfinite(a[~fin]) | (lam[~fin] == 0))


def test_related_gap_and_tplus_examples(identity, origin):
    assert monotonically_related_gap(origin, pp(1, 1)) == 1.0
    assert monotonically_related_gap(identity, pp(1, -1)) == -1.0
    assert monotonically_related_gap(origin, pp(1, -1)) == -1.0
    assert tplus_contains(origin, pp(1, 1))
    assert not tplus_contains(origin, pp(1, -1))
    assert tplus_contains(identity, O)


def test_identity_eq5_all_families(rng):
    for name, fam in FAMILIES.items():
        for _ in range(5):
            T = fam.make(rng)
            Z = np.vstack([rng.normal(size=(40, 2 * T.n)), sample_graph_points(T, rng, 10)])
            phi = fitzpatrick_many(T, Z)
            inf = monotonically_related_gap_many(T, Z)
            c = np.einsum("ij,ij->i", Z[:, : T.n], Z[:, T.n:])
            fin = np.isfinite(phi)
            assert np.all(np.abs(phi[fin] + inf[fin] - c[fin]) <= 1e-9 * (1 + np.abs(c[fin])))
            assert np.array_equal(~fin, inf == -INF)


def test_improper_fitzpatrick_function():
    # a ray with c(dir) < 0 is not bounded above in the objective: phi = +inf everywhere
    T = PolygonalOperator([RayPiece(O, pp(1, -1))])
    Z = np.random.default_rng(0).normal(size=(100, 2))
    assert np.all(fitzpatrick_many(T, Z) == INF)


# -- slack reports ---------------------------------------------------------

def test_slack_report_conventions():
    assert SlackReport.build(1.0, INF).slack == INF
    assert SlackReport.build(-INF, 0.0).slack == INF
    r = SlackReport.build(INF, 3.0)
    assert r.slack == -INF and not r.passed
    assert SlackReport.build(1.0, 1.0 - 5e-9).passed
    assert not SlackReport.build(1.0, 1.0 - 5e-8).passed
    slack, ok = slack_arrays(np.array([INF, 1.0, np.nan]), np.array([INF, 0.0, 1.0]))
    assert slack[0] == INF and ok[0] and not ok[1] and np.isnan(slack[2])


# -- estimates -------------------------------------------------------------

def test_main_examples(identity, origin, rng):
    r = estimate_main(identity, pp(1, -1), pp(-1, 1), 1.0)
    assert (r.lhs, r.rhs, r.slack) == (0.0, 0.0, 0.0)
    for _ in range(50):
        z, p = (PairedPoint.from_flat(rng.normal(size=2)) for _ in range(2))
        t = float(rng.uniform(0, 10))
        assert abs(estimate_main(origin, z, p, t).slack) <= 1e-10
        assert estimate_main(identity, z, p, 0.0).slack == 0.0 or gap(identity, z) == INF
    with pytest.raises(ValueError):
        estimate_main(identity, O, O, -1.0)


def test_m2_examples(identity, cross, rng):
    for t in (0.0, 0.5, 1.0, 2.0):
        r = estimate_m2(identity, pp(1, -1), pp(-1, 1), t)
        assert r.rhs == 1.0 and r.lhs == pytest.approx(-t * t + 2 * t)
        assert r.passed
    assert estimate_m2(identity, pp(1, -1), pp(-1, 1), 1.0).slack == 0.0
    for _ in range(50):
        p = PairedPoint.from_flat(rng.normal(size=2))
        for t in (0.1, 1.0, 3.0):
            assert estimate_m2(cross, O, p, t).passed


def test_m3_examples(identity, cross, rng):
    r = estimate_m3(identity, pp(1, -1), [pp(-1, 1)])
    assert (r.lhs, r.rhs, r.slack) == (1.0, 1.0, 0.0)
    r = estimate_m3(identity, pp(1, -1), [])
    assert r.lhs == -INF and r.passed
    r = estimate_m3(cross, O, default_m3_candidates(1, rng))
    assert r.rhs == 0.0 and r.lhs <= 0.0 and r.passed


def test_m3_r1_violation_is_reported():
    # a single point is not NI; at z = (1, 0) the gap is 0 while p = (1, 1) has
    # nonnegative coupling and support -1
    T = PolygonalOperator([PointPiece(O)])
    z, p = pp(1, 0), pp(1, 1)
    assert gap(T, z) == 0.0
    assert support_shifted(T, z, p) == -1.0
    with pytest.raises(R1ViolationError):
        estimate_m3(T, z, [p])


def test_m4_examples(identity, rng):
    r = estimate_m4(identity, pp(1, -1), pp(-1, 1))
    assert r.slack == 0.0 and r.passed
    assert estimate_m4(identity, pp(1, 1), O).slack == 0.0
    with pytest.raises(NIViolationError):
        estimate_m4(PolygonalOperator([PointPiece(O)]), pp(1, 1), pp(1, 0))


def test_m7_examples(identity, cross):
    h = HullGenerators([[0, 0]], [[1, 1], [-1, -1]])
    r = estimate_m7(identity, pp(1, -1), h)
    assert abs(r.slack) <= 1e-12 and r.passed
    assert estimate_m7(identity, pp(2, 2), h).lhs == 0.0
    assert estimate_m7(cross, O, graph_hull(cross)).lhs == 0.0
    assert estimate_m7(cross, pp(1, 0), graph_hull(cross)).slack == INF


def test_m7_weighted(identity):
    # gap is 1 at (1, -1); the delta-weighted distance to the diagonal is never larger
    for delta in (0.01, 0.1, 1.0, 10.0, 100.0):
        r = estimate_m7(identity, pp(1, -1), graph_hull(identity), WeightedNorm(delta))
        assert r.passed


def test_r1_examples(identity):
    assert r1_implications(identity, pp(1, -1), pp(1, 1)) == ()
    assert r1_implications(identity, pp(1, -1), pp(2, -2)) == ()
    assert r1_implications(identity, pp(1, -1), O) == ()


def test_r1_flags_non_ni():
    T = PolygonalOperator([PointPiece(O)])
    # c(p) = 1 > 0 but sigma is finite for a single point
    assert "c>0 => sigma=+inf" in r1_implications(T, pp(1, 1), pp(1, 1))


# -- witnesses -------------------------------------------------------------

def test_negative_coupling_witness_examples(identity, origin):
    assert negative_coupling_witness(origin, pp(1, -1)) == O
    assert negative_coupling_witness(identity, pp(1, -1)).allclose(O)
    T = PolygonalOperator.from_points([O, pp(2, 2)])
    assert negative_coupling_witness(T, pp(1, -1)) == O
    with pytest.raises(ValueError):
        negative_coupling_witness(identity, pp(1, 1))


def test_boundary_point_examples(identity, origin):
    bp = boundary_point(identity, pp(1, -1), O)
    assert bp.t == 1.0 and bp.w.allclose(O)
    assert coupling(pp(1, -1) - bp.w) == -1.0
    bp = boundary_point(origin, pp(1, -1), O)
    assert bp.t == 1.0
    with pytest.raises(ValueError):
        boundary_point(identity, pp(1, 1), O)


def test_boundary_point_interior_root(rng):
    # point cloud: the segment from a positive-gap z to a graph point crosses [phi = c] inside
    for s in range(30):
        T = gen_point_cloud_monotone(2, 4, s)
        Z = rng.normal(size=(50, 4)) * 2
        g = gap_many(T, Z)
        for z in Z[(g > 1e-3) & np.isfinite(g)][:3]:
            zp = PairedPoint.from_flat(z)
            w = negative_coupling_witness(T, zp)
            bp = boundary_point(T, zp, w)
            assert abs(gap(T, bp.w)) <= 1e-7 and bp.residual == pytest.approx(abs(gap(T, bp.w)))
            assert coupling(zp - bp.w) < -1e-9
            assert coupling(zp - bp.w) == pytest.approx(bp.t ** 2 * coupling(zp - w), rel=1e-9)


def test_segment_probe_examples(origin):
    w = segment_probe(origin, pp(1, 1), 0.5)
    assert w == O and gap(origin, 0.5 * pp(1, 1)) == -0.25
    T = PolygonalOperator.from_points([O, pp(3, 3)])
    w = segment_probe(T, pp(1, 1), 0.5)
    assert gap(T, 0.5 * pp(1, 1) + 0.5 * w) < -1e-9
    # (0,0) works as well
    assert gap(T, 0.5 * pp(1, 1)) == -0.25
    w = segment_probe(origin, pp(1, 1), 0.99)
    assert gap(origin, 0.99 * pp(1, 1) + 0.01 * w) == pytest.approx(-0.9801)
    with pytest.raises(ValueError):
        segment_probe(origin, pp(1, -1), 0.5)


def test_ni_falsify_examples(identity, cross, origin):
    hit = ni_falsify(origin)
    assert hit is not None and hit.gap_value < -1e-8
    assert gap(origin, hit.z) == pytest.approx(hit.gap_value, abs=1e-9)
    assert ni_falsify(identity) is None
    assert ni_falsify(cross) is None
    assert ni_falsify(gen_linear_monotone(3, 1), SamplerConfig(seed=3)) is None


# -- projections of dom phi ------------------------------------------------

def test_cross_domain_not_in_domain_of_phi(cross, rng):
    # D(T) is the whole line, but phi is finite only at the origin
    assert domain_hull(cross).rays.size > 0
    xs = rng.normal(size=100)
    xs = xs[xs != 0]
    for x in xs:
        assert fitzpatrick(cross, pp(x, float(rng.normal()))) == INF


def test_projection_inclusion_ni(rng):
    for s in range(20):
        T = gen_maximal_1d(s)
        Z = rng.normal(size=(20, 2)) * 2
        for z in Z[np.isfinite(gap_many(T, Z))]:
            assert projection_inclusion(T, PairedPoint.from_flat(z), search=False).holds_ni()


def test_projection_inclusion_shift():
    # single point at the origin: x = 1 lies outside conv D(T) = {0}; sliding x* reaches [phi <= c]
    T = PolygonalOperator([PointPiece(O)])
    pi = projection_inclusion(T, pp(1, -2))
    assert pi.x_dist == 1.0 and pi.x_shift is not None
    assert gap(T, pi.x_shift) <= 1e-8 and pi.x_shift.x[0] == 1.0
    assert pi.holds_general() and not pi.holds_ni()
    with pytest.raises(ValueError):
        projection_inclusion(PolygonalOperator([LinePiece(O, pp(1, 0)), LinePiece(O, pp(0, 1))]), pp(1, 0))


def test_affine_hull_shift(origin):
    a = affine_hull_shift(origin, pp(1, 1))
    assert not a.inside and a.shifted == pp(1, 0) and a.shifted_gap == 0.0
    a = affine_hull_shift(origin, pp(2, 3), primal=False)
    assert not a.inside and abs(a.shifted_gap) <= 1e-12
    T = PolygonalOperator([SegmentPiece(pp([0, 0], [0, 0]), pp([1, 0], [1, 0]))])
    a = affine_hull_shift(T, pp([0.5, 2.0], [0.3, 0.1]))
    assert not a.inside and abs(a.shifted_gap) <= 1e-12
    assert affine_hull_shift(T, pp([0.5, 0.0], [0.3, 0.1])).inside


# -- monotone T and T+ -----------------------------------------------------

def test_graph_gap(rng):
    for name, fam in FAMILIES.items():
        if not fam.monotone:
            continue
        T = fam.make(rng)
        g = gap_many(T, sample_graph_points(T, rng, 200))
        assert np.all(g <= 1e-8)
        if fam.maximal:
            assert np.all(np.abs(g) <= 1e-8)


def test_phi_convex_along_segments(rng):
    for name, fam in FAMILIES.items():
        T = fam.make(rng)
        Z, W = rng.normal(size=(2, 100, 2 * T.n))
        t = rng.uniform(size=(100, 1))
        fz, fw = fitzpatrick_many(T, Z), fitzpatrick_many(T, W)
        fm = fitzpatrick_many(T, t * Z + (1 - t) * W)
        ok = np.isfinite(fz) & np.isfinite(fw)
        rhs = t[ok, 0] * fz[ok] + (1 - t[ok, 0]) * fw[ok]
        assert np.all(fm[ok] <= rhs + 1e-9 * (1 + np.abs(rhs)))


def test_graph_inside_tplus_iff_monotone(rng, cross):
    for s in range(10):
        T = gen_point_cloud_monotone(2, 5, s)
        assert all(tplus_contains(T, PairedPoint.from_flat(w)) for w in sample_graph_points(T, rng, 50))
    # the cross is NI but not monotone: off-origin graph points leave T+
    assert tplus_contains(cross, O)
    assert not tplus_contains(cross, pp(1, 0))
    assert not tplus_contains(cross, pp(0, -2))


def test_projection_inclusion_negative_gap_needs_no_shift():
    # a point already in [phi <= c] is its own witness, even with x outside conv D(T)
    T = PolygonalOperator([PointPiece(O)])
    z = pp(1, 2)
    assert gap(T, z) == -2.0
    pi = projection_inclusion(T, z)
    assert pi.x_shift == z and pi.xstar_shift == z and pi.holds_general()


@pytest.mark.parametrize("z", [(1, 1), (2, -1), (-1, 3), (0.3, -2.5), (-0.7, 0.2)])
def test_cubic_matches_dense_grid(z):
    from oracles import dense_cubic_phi

    # the maximiser lies well inside [-6, 6]; with spacing 3e-5 the grid undershoots by far less than 1e-7
    phi = fitzpatrick(CubicOperator(), pp(*z))
    grid = dense_cubic_phi(np.array(z, dtype=float))
    assert grid <= phi + 1e-12
    assert phi - grid <= 1e-7
