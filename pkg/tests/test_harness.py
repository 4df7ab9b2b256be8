import io
import json

import numpy as np
import pytest

from fitzkit.conjugate import GridFunction
from fitzkit.core import INF, DimensionError, parse_xreal, pp
from fitzkit.fitz import fitzpatrick, gap_many
from fitzkit.opmodel import CubicOperator, LinearMonotoneOperator, PointPiece, PolygonalOperator, is_monotone
from fitzkit.harness import (
    DEFAULT_COUNTS,
    FAMILIES,
    GRID_HEADER,
    SUITE_NAMES,
    OperatorFileError,
    SuiteReport,
    UnknownSuiteError,
    dump_operator,
    gen_linear_monotone,
    gen_maximal_1d,
    gen_point_cloud_monotone,
    grid_dump,
    grid_rows,
    load_hull,
    load_operator,
    operator_to_json,
    parse_operator,
    read_grid_csv,
    run_suite,
    validate,
    write_grid_csv,
)

CROSS_JSON = {
    "schema_version": 1,
    "kind": "polygonal",
    "dimension": 1,
    "pieces": [
        {"type": "line", "base": {"x": [0], "xstar": [0]}, "dir": {"x": [1], "xstar": [0]}},
        {"type": "line", "base": {"x": [0], "xstar": [0]}, "dir": {"x": [0], "xstar": [1]}},
    ],
}


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(obj if isinstance(obj, str) else json.dumps(obj, indent=2))
    return p


# -- operator files --------------------------------------------------------

def test_load_cross(tmp_path):
    T = load_operator(write(tmp_path, "cross.json", CROSS_JSON))
    assert isinstance(T, PolygonalOperator) and len(T.pieces) == 2
    assert fitzpatrick(T, pp(0, 0)) == 0.0 and fitzpatrick(T, pp(1, 0)) == INF


def test_load_linear_and_cubic(tmp_path):
    T = load_operator(write(tmp_path, "lin.json", {"schema_version": 1, "kind": "linear", "dimension": 1,
                                                   "A": [[1]], "b": [0]}))
    assert isinstance(T, LinearMonotoneOperator) and fitzpatrick(T, pp(1, 1)) == pytest.approx(1.0)
    C = load_operator(write(tmp_path, "cub.json", {"schema_version": 1, "kind": "cubic1d", "dimension": 1}))
    assert isinstance(C, CubicOperator)


def test_reject_non_monotone_linear(tmp_path):
    p = write(tmp_path, "neg.json", {"schema_version": 1, "kind": "linear", "dimension": 1, "A": [[-1]], "b": [0]})
    with pytest.raises(OperatorFileError, match="minimum eigenvalue of the symmetric part is -1"):
        load_operator(p)


def test_parse_error_has_location(tmp_path):
    p = write(tmp_path, "bad.json", '{\n  "kind": "linear",\n}\n')
    with pytest.raises(OperatorFileError, match=r"bad\.json:3:1"):
        load_operator(p)


@pytest.mark.parametrize("mutate, where", [
    (lambda o: o["pieces"][1]["dir"].update(xstar=[1, 2]), r"\$\.pieces\[1\]\.dir"),
    (lambda o: o["pieces"][0].update(type="blob"), r"\$\.pieces\[0\]"),
    (lambda o: o.update(schema_version=2), r"schema_version"),
    (lambda o: o.update(kind="quartic"), r"kind"),
    (lambda o: o["pieces"][0]["base"].pop("x"), r"\$\.pieces\[0\]\.base"),
])
def test_invariant_errors_name_field(mutate, where):
    obj = json.loads(json.dumps(CROSS_JSON))
    mutate(obj)
    with pytest.raises(OperatorFileError, match=where):
        parse_operator(obj)


def test_operator_round_trip(tmp_path, rng):
    for name, fam in FAMILIES.items():
        T = fam.make(rng)
        path = tmp_path / f"{name}.json"
        dump_operator(T, path)
        U = load_operator(path)
        assert operator_to_json(U) == operator_to_json(T)
        Z = rng.normal(size=(20, 2 * T.n))
        assert np.array_equal(gap_many(T, Z), gap_many(U, Z))


def test_load_hull(tmp_path):
    h = load_hull(write(tmp_path, "h.json", {"points": [[0, 0], [1, 0]], "rays": [[0, 1]]}))
    assert h.dim == 2 and len(h.rays) == 1
    with pytest.raises(OperatorFileError, match="points"):
        load_hull(write(tmp_path, "h2.json", {"rays": []}))


# -- generators ------------------------------------------------------------

def test_generators_are_reproducible():
    assert operator_to_json(gen_maximal_1d(5)) == operator_to_json(gen_maximal_1d(5))
    assert np.array_equal(gen_linear_monotone(3, 9).A, gen_linear_monotone(3, 9).A)
    assert operator_to_json(gen_point_cloud_monotone(2, 6, 1)) == operator_to_json(gen_point_cloud_monotone(2, 6, 1))


def test_generator_examples():
    for s in range(50):
        assert is_monotone(gen_maximal_1d(s)).monotone
        assert np.min(gen_linear_monotone(3, s).eigvals) >= -1e-12
    T = gen_point_cloud_monotone(1, 2, 0, forced=[pp(0, 0), pp(1, 1)])
    assert is_monotone(T).monotone


def test_families_validate(rng):
    for name, fam in FAMILIES.items():
        for _ in range(20):
            validate(fam, fam.make(rng))


# -- suites ----------------------------------------------------------------

def test_suite_names_and_counts():
    assert set(SUITE_NAMES) == set(DEFAULT_COUNTS)
    assert len(SUITE_NAMES) == 14
    with pytest.raises(UnknownSuiteError):
        run_suite("nope")


@pytest.mark.parametrize("name", SUITE_NAMES)
def test_every_suite_passes_small(name):
    rep = run_suite(name, seed=3, count=60)
    assert rep.passed + rep.failed + rep.indeterminate == rep.count == 60
    assert rep.failed == 0 and rep.exit_code() == 0, rep.to_text()


def test_spec_suite_examples():
    assert run_suite("main", 7, 1000).passed == 1000
    assert run_suite("m4", 7, 1000).passed == 1000
    assert run_suite("prop-i-ii-iii", 7, 200).passed == 200


def test_report_is_deterministic():
    a = run_suite("m3", seed=11, count=120)
    b = run_suite("m3", seed=11, count=120)
    assert a.to_csv() == b.to_csv() and a.to_text() == b.to_text()
    assert run_suite("m3", seed=12, count=120).to_csv() != a.to_csv() or a.worst_slack == INF


def test_report_format_and_exit_codes():
    rep = SuiteReport("main", 1, 3, passed=1, failed=1, indeterminate=1, worst_slack=-0.5,
                      failures=[{"index": 2, "message": "boom", "slack": "-0.5"}])
    assert rep.exit_code() == 1 and not rep.ok
    lines = rep.to_csv().splitlines()
    assert lines[0] == SuiteReport.CSV_HEADER and lines[1] == "main,1,3,1,1,1,0,0,-0.5"
    assert "failure #2: boom" in rep.to_text()
    assert SuiteReport("m7", 0, 1, failed=1, nonconverged=1).exit_code() == 3
    assert SuiteReport("m7", 0, 1, passed=1).exit_code() == 0


def test_replay_files(tmp_path, monkeypatch):
    from fitzkit.harness import suites

    def broken(rng, need, ctx):
        return [suites.Outcome("fail", -1.0, "forced", {"z": [1, 2]})] * need

    monkeypatch.setitem(suites._SUITES, "main", broken)
    rep = run_suite("main", seed=4, count=3, replay_dir=tmp_path)
    assert rep.failed == 3 and rep.exit_code() == 1
    files = sorted(tmp_path.glob("main-seed4-*.json"))
    assert len(files) == 3
    payload = json.loads(files[0].read_text())
    assert payload["instance"] == {"z": [1, 2]} and "--seed 4" in payload["reproduce"]


# -- grids -----------------------------------------------------------------

def _dump(T, window, res):
    buf = io.StringIO()
    grid_dump(T, window, res, buf)
    return buf.getvalue().splitlines()


def test_grid_identity():
    lines = _dump(FAMILIES["identity"].make(np.random.default_rng(0)), (-2, 2, -2, 2), 5)
    assert lines[0] == GRID_HEADER and len(lines) == 26
    for row in lines[1:]:
        x, y, phi, c, g = map(parse_xreal, row.split(","))
        assert abs(g - (x - y) ** 2 / 4) <= 1e-12


def test_grid_cross_and_point(cross, origin):
    rows = [r.split(",") for r in _dump(cross, (-2, 2, -2, 2), 5)[1:]]
    for r in rows:
        if parse_xreal(r[0]) == 0 and parse_xreal(r[1]) == 0:
            assert [parse_xreal(v) for v in r] == [0, 0, 0, 0, 0]
        else:
            assert r[4] == "inf"
    rows = [r.split(",") for r in _dump(origin, (-1, 1, -1, 1), 3)[1:]]
    assert all(parse_xreal(r[2]) == 0.0 for r in rows)


def test_grid_order_and_errors(identity):
    rows = list(grid_rows(identity, (0, 1, 0, 1), 2))
    assert [(r[0], r[1]) for r in rows] == [(0, 0), (0, 1), (1, 0), (1, 1)]
    with pytest.raises(DimensionError):
        list(grid_rows(gen_linear_monotone(2, 0), (0, 1, 0, 1), 2))


def test_grid_csv_round_trip(rng):
    x = np.linspace(-1, 1, 7)
    y = np.array([0.0, 0.5])
    v = rng.normal(size=(7, 2))
    v[3, 1] = INF
    for f in (GridFunction(x, v[:, 0]), GridFunction((x, y), v)):
        buf = io.StringIO()
        write_grid_csv(f, buf)
        buf.seek(0)
        g = read_grid_csv(buf)
        assert all(np.array_equal(a, b) for a, b in zip(f.coords, g.coords))
        assert np.array_equal(f.values, g.values)


def test_grid_dump_round_trip(identity):
    for row in _dump(identity, (-1.3, 0.7, -2, 2.1), 4)[1:]:
        x, y, phi, c, g = map(parse_xreal, row.split(","))
        assert phi == fitzpatrick(identity, pp(x, y))
