import csv
import json

import pytest

from bundlex.cli import run_command


def _read(path):
    return path.read_text(encoding="utf-8")


def _without_timing(path):
    d = json.loads(_read(path))
    d.pop("timing")
    return d


@pytest.fixture
def d2(tmp_path):
    out = tmp_path / "d2.json"
    assert run_command(["example", "demailly", "--k", "2", "--out", str(out)]) == 0
    return out


def test_example_then_verify(tmp_path, d2):
    rep = tmp_path / "r.json"
    assert run_command(["verify", "--spec", str(d2), "--report", str(rep), "--samples", "200"]) == 0
    d = json.loads(_read(rep))
    assert d["report"]["passed"] is True
    assert d["seed"] == 42
    assert d["tolerances"]["residual"] == 1e-9
    assert d["version"]
    assert d["timing"]["wall_clock_seconds"] >= 0


def test_demailly_k1_rejected(tmp_path, capsys):
    assert run_command(["example", "demailly", "--k", "1", "--out", str(tmp_path / "x.json")]) == 2
    assert "k >= 2" in capsys.readouterr().err
    assert not (tmp_path / "x.json").exists()


def test_corrupted_spec_fails(tmp_path, d2):
    d = json.loads(_read(d2))
    # nudge the shear coefficient of the declared factorization
    d["factorizations"]["1"][1]["q"][0]["coeff"] = [1.001, 0.0]
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(d), encoding="utf-8")
    rep = tmp_path / "r.json"
    assert run_command(["verify", "--spec", str(bad), "--report", str(rep), "--samples", "100"]) == 1
    failing = [r["name"] for r in json.loads(_read(rep))["report"]["records"] if not r["passed"]]
    assert "factorization hole1" in failing


def test_malformed_input_exit_two(tmp_path):
    junk = tmp_path / "junk.json"
    junk.write_text("{ nope", encoding="utf-8")
    assert run_command(["verify", "--spec", str(junk), "--report", str(tmp_path / "r.json")]) == 2
    assert run_command(["extend", "--spec", str(tmp_path / "missing.json"), "--out", str(tmp_path / "e.json")]) == 2
    assert run_command(["bogus"]) == 2
    assert run_command(["example", "skoda"]) == 2


def test_invalid_geometry_exit_two(tmp_path, d2):
    d = json.loads(_read(d2))
    d["domain"]["holes"][0]["radius"] = 20.0
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(d), encoding="utf-8")
    assert run_command(["extend", "--spec", str(bad), "--out", str(tmp_path / "e.json")]) == 2


def test_reports_identical_apart_from_timing(tmp_path, d2):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for rep in (a, b):
        assert run_command(["verify", "--spec", str(d2), "--report", str(rep), "--samples", "100"]) == 0
    assert _without_timing(a) == _without_timing(b)


def test_seed_from_environment(tmp_path, d2, monkeypatch):
    monkeypatch.setenv("BUNDLEX_SEED", "7")
    rep = tmp_path / "r.json"
    assert run_command(["verify", "--spec", str(d2), "--report", str(rep), "--samples", "50"]) == 0
    assert json.loads(_read(rep))["seed"] == 7
    assert run_command(["verify", "--spec", str(d2), "--report", str(rep), "--samples", "50", "--seed", "3"]) == 0
    assert json.loads(_read(rep))["seed"] == 3
    monkeypatch.setenv("BUNDLEX_SEED", "x")
    assert run_command(["verify", "--spec", str(d2), "--report", str(rep)]) == 2


def test_extend_and_example_outputs_are_stable(tmp_path):
    outs = []
    for i in range(2):
        spec, ext = tmp_path / f"s{i}.json", tmp_path / f"e{i}.json"
        assert run_command(["example", "skoda", "--out", str(spec)]) == 0
        assert run_command(["extend", "--spec", str(spec), "--out", str(ext)]) == 0
        outs.append((_read(spec), _read(ext)))
    assert outs[0] == outs[1]
    assert json.loads(outs[0][1])["version"] == "bundlex-extension/1"


def test_layout_csv(tmp_path):
    spec, out = tmp_path / "s.json", tmp_path / "l.csv"
    run_command(["example", "skoda", "--out", str(spec)])
    assert run_command(["layout", "--spec", str(spec), "--out", str(out)]) == 0
    rows = list(csv.DictReader(out.open(encoding="utf-8")))
    kinds = [r["kind"] for r in rows]
    assert kinds.count("hole") == 2 and kinds.count("subhole") == 2
    holes = {(float(r["center_re"]), float(r["radius"])) for r in rows if r["kind"] == "hole"}
    assert holes == {(-4.0, 1.0), (4.0, 1.0)}
    # the sub-holes of infinity sit outside the outer boundary
    for r in rows:
        if r["kind"] == "subhole":
            assert abs(float(r["center_re"])) - float(r["radius"]) > 10.0


def test_layout_demailly_subholes_inside_collar(tmp_path, d2):
    out = tmp_path / "l.csv"
    assert run_command(["layout", "--spec", str(d2), "--out", str(out)]) == 0
    rows = [r for r in csv.DictReader(out.open(encoding="utf-8")) if r["owner"].startswith("hole1.")]
    assert {r["kind"] for r in rows} == {"subhole", "subcollar"}
    for r in rows:
        assert abs(float(r["center_re"])) + float(r["radius"]) <= 1.0 + 1e-12


def test_reports_identical_across_processes(tmp_path, d2):
    import os
    import subprocess
    import sys

    reps = []
    for h in ("1", "2"):
        rep = tmp_path / f"p{h}.json"
        env = {**os.environ, "PYTHONHASHSEED": h}
        env.pop("BUNDLEX_SEED", None)
        proc = subprocess.run([sys.executable, "-m", "bundlex", "verify", "--spec", str(d2), "--samples", "100",
                               "--report", str(rep)], env=env, capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
        reps.append(_without_timing(rep))
    assert reps[0] == reps[1]


def test_layout_line_images(tmp_path):
    spec, out = tmp_path / "s.json", tmp_path / "l.csv"
    run_command(["example", "skoda", "--out", str(spec)])
    run_command(["layout", "--spec", str(spec), "--out", str(out)])
    lines = [r for r in csv.DictReader(out.open(encoding="utf-8")) if r["radius"] == "inf"]
    # sub-collars of infinity pass through w = 0 and become the lines Re zeta = +-10
    assert sorted((float(r["center_re"]), r["interior"]) for r in lines) == [(-10.0, "left"), (10.0, "right")]
