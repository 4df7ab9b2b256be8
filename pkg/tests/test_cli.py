import json
import subprocess
import sys

import numpy as np
import pytest

from fitzkit.cli import main

CROSS = {
    "schema_version": 1, "kind": "polygonal", "dimension": 1,
    "pieces": [
        {"type": "line", "base": {"x": [0], "xstar": [0]}, "dir": {"x": [1], "xstar": [0]}},
        {"type": "line", "base": {"x": [0], "xstar": [0]}, "dir": {"x": [0], "xstar": [1]}},
    ],
}
IDENTITY = {"schema_version": 1, "kind": "linear", "dimension": 1, "A": [[1]], "b": [0]}


@pytest.fixture
def files(tmp_path):
    out = {}
    for name, obj in (("cross", CROSS), ("identity", IDENTITY),
                      ("hull", {"points": [[1, 0], [0, 1]], "rays": []})):
        p = tmp_path / f"{name}.json"
        p.write_text(json.dumps(obj))
        out[name] = str(p)
    return out


def run(capsys, *argv):
    code = main(list(argv))
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def test_eval_cross(capsys, files):
    assert run(capsys, "eval", files["cross"], "--z=0,0") == (0, "phi 0\n", "")
    code, out, _ = run(capsys, "eval", files["cross"], "--z=1,0")
    assert code == 0 and out == "phi inf\n"


def test_gap_support_tplus(capsys, files):
    code, out, _ = run(capsys, "gap", files["identity"], "--z=1,-1")
    assert code == 0 and float(out.split()[1]) == pytest.approx(1.0)
    code, out, _ = run(capsys, "support", files["cross"], "--z=0,0", "--p=1,0")
    assert code == 0 and out.split()[1] == "inf"
    code, out, _ = run(capsys, "tplus", files["identity"], "--z=0,0")
    assert code == 0 and "member true" in out


def test_csv_format_either_side(capsys, files):
    for argv in (["--format", "csv", "gap", files["identity"], "--z=2,2"],
                 ["gap", files["identity"], "--z=2,2", "--format", "csv"]):
        code, out, _ = run(capsys, *argv)
        assert code == 0 and out.splitlines()[0] == "gap" and float(out.splitlines()[1]) == 0.0


def test_project(capsys, files):
    code, out, _ = run(capsys, "project", files["hull"], "--q=0,0")
    assert code == 0
    fields = dict(line.split(" ", 1) for line in out.splitlines())
    assert float(fields["distance"]) == pytest.approx(np.sqrt(0.5))
    assert np.allclose([float(v) for v in fields["point"].split()], [0.5, 0.5])


def test_conj(capsys, tmp_path):
    g = tmp_path / "f.csv"
    x = np.linspace(-2, 2, 5)
    g.write_text("x,value\n" + "".join(f"{a},{a * a}\n" for a in x))
    for extra in ([], ["--brute"]):
        code, out, _ = run(capsys, "conj", str(g), *extra)
        assert code == 0 and out.startswith("x,value\n") and len(out.splitlines()) == 6
    code, out, _ = run(capsys, "conj", str(g), "--biconjugate")
    vals = [float(r.split(",")[1]) for r in out.splitlines()[1:]]
    assert np.all(np.array(vals) <= x ** 2 + 1e-12)


def test_check(capsys, tmp_path):
    code, out, _ = run(capsys, "check", "main", "--seed", "1", "--count", "50", "--format", "csv")
    lines = out.splitlines()
    assert code == 0 and lines[0].startswith("suite,seed,count") and lines[1].startswith("main,1,50,50,0,")
    code, out, _ = run(capsys, "--count", "10", "check", "all", "--format", "csv")
    assert code == 0 and len(out.splitlines()) == 15


def test_grid(capsys, files):
    code, out, _ = run(capsys, "grid", files["identity"], "--window=-2,2,-2,2", "--resolution", "5")
    assert code == 0 and len(out.splitlines()) == 26 and out.startswith("x,xstar,phi,c,gap\n")


def test_usage_errors(capsys, files, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{\n  "kind": "linear",\n}\n')
    code, _, err = run(capsys, "eval", str(bad), "--z=0,0")
    assert code == 2 and "bad.json:3:1" in err
    neg = tmp_path / "neg.json"
    neg.write_text(json.dumps({"schema_version": 1, "kind": "linear", "dimension": 1, "A": [[-1]], "b": [0]}))
    code, _, err = run(capsys, "eval", str(neg), "--z=0,0")
    assert code == 2 and "-1" in err
    assert run(capsys, "eval", files["cross"], "--z=1,2,3")[0] == 2
    assert run(capsys, "eval", files["cross"], "--z=a,b")[0] == 2
    assert run(capsys, "check", "nope")[0] == 2
    assert run(capsys, "eval", str(tmp_path / "missing.json"), "--z=0,0")[0] == 2
    assert run(capsys, "grid", files["identity"], "--window=1,0,0,1")[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


def test_failure_exit_code(capsys, monkeypatch):
    from fitzkit.harness import suites

    monkeypatch.setitem(suites._SUITES, "main",
                        lambda rng, need, ctx: [suites.Outcome("fail", -1.0, "forced")] * need)
    assert run(capsys, "check", "main", "--count", "2")[0] == 1
    monkeypatch.setitem(suites._SUITES, "main",
                        lambda rng, need, ctx: [suites.Outcome("fail", -1.0, "stuck", nonconverged=True)] * need)
    assert run(capsys, "check", "main", "--count", "2")[0] == 3


def test_module_entry_point(files):
    res = subprocess.run([sys.executable, "-m", "fitzkit", "eval", files["cross"], "--z=1,0"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout == "phi inf\n"
