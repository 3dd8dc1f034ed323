"""Command-line interface: output format, configuration and exit codes."""

from __future__ import annotations

import csv
import io
import json
import subprocess
import sys

import pytest

from cmspert.cli import dumps, main


def run(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_jack_command(capsys):
    code, out, _ = run(["jack", "--N", "2", "--beta", "2/1", "--lambda", "2,0"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["coefficients"] == {"2,0": "1/1", "1,1": "4/3"}
    assert doc["version"].startswith("cmspert")


def test_output_is_deterministic(capsys, tmp_path):
    args = ["spectrum", "--N", "2", "--beta", "2", "--lambda", "2,0", "--order", "3", "--p", "0.01,0.02", "--auto-window"]
    _, a, _ = run(args, capsys)
    _, b, _ = run(args, capsys)
    assert a == b
    target = tmp_path / "out.json"
    assert main(args + ["--output", str(target)]) == 0
    assert target.read_text() == a


def test_config_file_and_override(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# example\nN = 2\nbeta = 2\nlambda = 2,0\n")
    code, out, _ = run(["jack", "--config", str(cfg)], capsys)
    assert code == 0 and json.loads(out)["lambda"] == "2,0"
    code, out, _ = run(["jack", "--config", str(cfg), "--lambda", "1,0"], capsys)
    assert json.loads(out)["lambda"] == "1,0"


def test_config_errors(capsys, tmp_path):
    code, _, err = run(["jack", "--N", "1", "--beta", "2", "--lambda", "1"], capsys)
    assert code == 2 and json.loads(err)["error"] == "config"
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = blue\n")
    assert run(["jack", "--config", str(bad)], capsys)[0] == 2
    assert run(["wp", "--x", "1.0", "--p", "1.5"], capsys)[0] == 2
    assert run(["verify", "--suite", "nope"], capsys)[0] == 2
    assert run(["nonsense"], capsys)[0] == 2


def test_window_too_small_exit_code(capsys):
    code, _, err = run(["spectrum", "--N", "2", "--beta", "2", "--lambda", "4,0", "--order", "4", "--cutoff", "6"], capsys)
    assert code == 2
    assert "8,0" in json.loads(err)["message"]


def test_unresolved_exit_code(capsys):
    code, out, err = run(["spectrum", "--N", "3", "--beta", "2", "--lambda", "3,0,0;3,3,0", "--order", "1", "--auto-window"], capsys)
    assert code == 3
    doc = json.loads(out)
    assert doc["degeneracy"]["unresolved"] is True
    assert "unresolved" in err


def test_csv_columns(capsys):
    code, out, _ = run(["spectrum", "--N", "2", "--beta", "2", "--lambda", "1,0", "--order", "2", "--p", "0.01", "--auto-window", "--format", "csv"], capsys)
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["label", "order", "coefficient", "p", "energy", "error"]
    assert len(rows) == 1 + 3 + 1
    code, out, _ = run(["diag", "--N", "2", "--beta", "2", "--cutoff", "4", "--order", "2", "--p", "0.01", "--format", "csv"], capsys)
    assert list(csv.reader(io.StringIO(out)))[0] == ["order", "coefficient", "p", "energy", "error"]


def test_diag_compares_with_series(capsys):
    code, out, _ = run(["diag", "--N", "2", "--beta", "2", "--cutoff", "10", "--order", "12", "--p", "0.005", "--lambda", "2,0"], capsys)
    assert code == 0
    res = json.loads(out)["results"][0]
    assert abs(res["series_delta"]) < 1e-8


def test_bounds_and_wp(capsys):
    code, out, _ = run(["bounds", "--N", "2", "--beta", "2"], capsys)
    doc = json.loads(out)
    assert code == 0 and abs(doc["w_max_at_p0"] - doc["target"]) <= 1e-12
    code, out, _ = run(["wp", "--x", "1.0", "--p", "0.05"], capsys)
    assert code == 0 and json.loads(out)["difference"] <= 1e-10


def test_verify_subset(capsys):
    code, out, _ = run(["verify", "--suite", "jack,cauchy,wp,symmetry"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["pass"] is True
    assert list(doc["suites"]) == ["jack", "cauchy", "wp", "symmetry"]


def test_dumps_formats():
    from fractions import Fraction

    assert dumps({"a": 0.1, "b": Fraction(4, 3), "c": [1, 2]}) == '{\n  "a": 0.10000000000000001,\n  "b": "4/3",\n  "c": [1, 2]\n}'
    assert dumps(float("nan")) == '"nan"'


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "cmspert", "jack", "--N", "2", "--beta", "2", "--lambda", "1,0"], capture_output=True, text=True)
    assert r.returncode == 0
    assert json.loads(r.stdout)["eigenvalue"]
