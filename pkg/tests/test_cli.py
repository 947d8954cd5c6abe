import json
import os
import subprocess
import sys

import jsonschema
import pytest

from rpmem import cli

PARITY = {"A": [[1, 1, 1], [2, 2, 2], [0, 2, 4]], "b": [2, 3, 2], "positive_row": 0}


def call(capsys, *argv):
    code = cli.run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rpmem(*argv, env=None):
    full = dict(os.environ)
    full.pop(cli.SEED_ENV, None)
    full.update(env or {})
    return subprocess.run([sys.executable, "-m", "rpmem", *argv], capture_output=True, env=full)


@pytest.fixture
def files(tmp_path):
    def write(name, text):
        path = tmp_path / name
        path.write_text(text)
        return str(path)

    return {
        "points": write("pts.csv", "# dim=3\n1.0,2.0,3.0\n0,0,1\n-1.5,2,0\n4,4,4\n"),
        "empty": write("empty.csv", "# dim=3\n"),
        "ragged": write("ragged.csv", "1,2,3\n4,5\n"),
        "bad_header": write("hdr.csv", "# dim=2\n1,2,3\n"),
        "text": write("text.csv", "1,2,x\n"),
        "parity": write("parity.json", json.dumps(PARITY)),
        "finite": write("finite.json", json.dumps({"points": [[0, 0], [3, 4], [1, 7]], "p": [1, 0]})),
        "finite_member": write("fm.json", json.dumps({"points": [[0, 0], [3, 4]], "p": [3, 4]})),
        "polytope": write("poly.json", json.dumps({"vertices": [[1, 0, 0], [1, 1, 0], [1, 0, 1]], "b": [0, 0, 0]})),
        "cone": write("cone.json", json.dumps({"generators": [[1, 0, 0], [0, 1, 0]], "b": [0, 0, 1]})),
        "missing": write("missing.json", json.dumps({"A": [[1, 1]]})),
        "broken": write("broken.json", "{\"A\": [[1, 1]"),
        "exp": write("exp.json", json.dumps({"cls": "finite", "params": {"m": 8, "size": 40}, "trials": 50})),
        "ifp": write("ifp.json", json.dumps({"cls": "integer", "params": {"n": 3, "L": [0, 0, 0], "U": [4, 4, 4]},
                                             "trials": 20, "delta": 0.1})),
        "cal": write("cal.json", json.dumps({"cls": "synthetic", "k_grid": [1, 2, 3], "trials": 2000})),
        "consts": write("c.json", json.dumps({"C_jl": 1.0, "C_doubling": 8, "kappa": 0.5, "k_min": 3})),
        "dbl": write("sq.csv", "0,0\n1,0\n0,1\n1,1\n"),
    }


def test_bounds_finite_example(capsys):
    code, out, _ = call(capsys, "bounds", "finite", "--size", "1000", "--delta", "0.01", "--tau", "0.1", "--d", "1")
    assert code == 0
    data = json.loads(out)
    jsonschema.validate(data, cli.KSELECTION_SCHEMA)
    assert data["k"] == 5


@pytest.mark.parametrize("argv,k", [
    (["integer", "--n", "3", "--B", "2", "--delta", "0.1"], 185),
    (["doubling", "--lambda", "4", "--delta", "0.1", "--tau", "0.01", "--d", "1"], 16),
    (["doubling-exact", "--lambda", "4"], 16),
])
def test_bounds_rules(capsys, argv, k):
    code, out, _ = call(capsys, "bounds", *argv)
    assert code == 0 and json.loads(out)["k"] == k


def test_bounds_polytope_cone_and_config(capsys, files):
    for argv in (["polytope", "--n", "2", "--d", "1", "--D", "1.2", "--delta", "0.05"],
                 ["cone", "--n", "2", "--d", "1", "--mu-a", "1.4142", "--delta", "0.05"]):
        code, out, _ = call(capsys, "bounds", *argv)
        assert code == 0
        jsonschema.validate(json.loads(out), cli.KSELECTION_SCHEMA)
    code, out, _ = call(capsys, "bounds", "integer", "--n", "1", "--B", "1", "--delta", "0.5", "--config", files["consts"])
    assert json.loads(out)["k"] == 3


def test_bounds_invalid(capsys):
    assert call(capsys, "bounds", "finite", "--size", "10")[0] == 2
    assert call(capsys, "bounds", "finite", "--size", "10", "--delta", "0.1", "--tau", "1", "--d", "1")[0] == 2
    assert call(capsys, "bounds", "nonsense")[0] == 2
    assert call(capsys)[0] == 2


def test_project_round_trip(capsys, files):
    code, out, _ = call(capsys, "project", "--input", files["points"], "--k", "2", "--seed", "4")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "# dim=2"
    rows = [list(map(float, line.split(","))) for line in lines[1:]]
    assert len(rows) == 4 and all(len(r) == 2 for r in rows)
    code, out2, _ = call(capsys, "project", "--input", files["points"], "--k", "3", "--dist", "rademacher", "--scale")
    assert code == 0 and len(out2.strip().splitlines()) == 5


@pytest.mark.parametrize("name", ["empty", "ragged", "bad_header", "text"])
def test_project_malformed(capsys, files, name):
    code, out, err = call(capsys, "project", "--input", files[name], "--k", "2")
    assert code == 2 and out == "" and "error" in err


def test_project_missing_file(capsys, tmp_path):
    assert call(capsys, "project", "--input", str(tmp_path / "nope.csv"), "--k", "2")[0] == 2


def test_decide_integer(capsys, files):
    code, out, _ = call(capsys, "decide", "integer", "--input", files["parity"], "--seed", "42", "--delta", "0.1")
    data = json.loads(out)
    jsonschema.validate(data, cli.DECISION_SCHEMA)
    assert code == 0 and data["outcome"] == "Separated"


def test_decide_kinds(capsys, files):
    for kind in ("finite", "polytope", "cone"):
        code, out, _ = call(capsys, "decide", kind, "--input", files[kind], "--seed", "1", "--tau", "0.01")
        data = json.loads(out)
        jsonschema.validate(data, cli.DECISION_SCHEMA)
        assert code == (3 if data["outcome"] == "NotSeparated" else 0)
    code, out, _ = call(capsys, "decide", "finite", "--input", files["finite_member"])
    assert code == 0 and json.loads(out)["outcome"] == "OriginalMember"


def test_decide_not_separated_exit_code(capsys, files, monkeypatch):
    from rpmem.membership import Decision, Outcome
    for outcome, want in ((Outcome.NOT_SEPARATED, 3), (Outcome.SEPARATED, 0)):
        monkeypatch.setattr(cli, "decide_pipeline", lambda *a, o=outcome: Decision(o, 0.5, 3, 1.0))
        code, out, _ = call(capsys, "decide", "finite", "--input", files["finite"])
        assert code == want and json.loads(out)["outcome"] == outcome.value


@pytest.mark.parametrize("name", ["missing", "broken"])
def test_decide_malformed(capsys, files, name):
    code, out, err = call(capsys, "decide", "integer", "--input", files[name])
    assert code == 2 and out == ""


def test_doubling(capsys, files):
    for flag, mode in (("--exact", "exact"), ("--greedy", "greedy"), (None, "exact")):
        argv = ["doubling", "--input", files["dbl"]] + ([flag] if flag else [])
        code, out, _ = call(capsys, *argv)
        data = json.loads(out)
        jsonschema.validate(data, cli.DOUBLING_SCHEMA)
        assert data == {"lambda": 4, "mode": mode}


def test_experiments(capsys, files):
    code, out, _ = call(capsys, "experiment", "failure", "--config", files["exp"], "--seed", "3")
    assert code == 0
    data = json.loads(out)
    jsonschema.validate(data, cli.REPORT_SCHEMA)
    assert data["metadata"]["master_seed"] == 3
    code, out, _ = call(capsys, "experiment", "ifp-float", "--config", files["ifp"])
    jsonschema.validate(json.loads(out), cli.IFP_SCHEMA)
    code, out, _ = call(capsys, "experiment", "calibrate", "--config", files["cal"])
    jsonschema.validate(json.loads(out), cli.CALIBRATION_SCHEMA)
    assert call(capsys, "experiment", "failure", "--config", files["parity"])[0] == 2


def test_seed_precedence(files):
    base = ["project", "--input", files["points"], "--k", "2"]
    default = rpmem(*base).stdout
    assert rpmem(*base, "--seed", "0").stdout == default
    env7 = rpmem(*base, env={cli.SEED_ENV: "7"}).stdout
    assert env7 == rpmem(*base, "--seed", "7").stdout != default
    assert rpmem(*base, "--seed", "0", env={cli.SEED_ENV: "7"}).stdout == default
    assert rpmem(*base, env={cli.SEED_ENV: "x"}).returncode == 2


def test_byte_identical_across_processes(files):
    for argv in (["decide", "integer", "--input", files["parity"], "--seed", "42"],
                 ["project", "--input", files["points"], "--k", "2", "--seed", "5"]):
        a, b = rpmem(*argv), rpmem(*argv)
        assert a.returncode == b.returncode == 0
        assert a.stdout == b.stdout and a.stdout
