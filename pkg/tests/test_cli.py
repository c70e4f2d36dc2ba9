from __future__ import annotations

import io
import json

import pytest

from snctwist.cli import main
from snctwist.sncmodel import load_config, validate


def run(*argv):
    buf = io.StringIO()
    code = main(list(argv), stdout=buf)
    return code, buf.getvalue()


@pytest.fixture
def c1_file(tmp_path):
    path = tmp_path / "c1.json"
    code, _ = run("gen", "curve", "--genera", "2,1", "--edges", "0-1:1", "--deg", "L=3,2", "--out", str(path))
    assert code == 0
    return str(path)


def test_gen_curve_writes_valid_file(c1_file):
    cfg = load_config(c1_file)
    assert validate(cfg).ok
    assert cfg.components == ("Y1", "Y2")


def test_gen_is_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        assert run("gen", "synth", "--dim", "2", "--tree", "0-1,1-2", "--seed", "4", "--out", str(p))[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_gen_to_stdout():
    code, out = run("gen", "curve", "--genera", "2", "--deg", "L=5")
    assert code == 0
    assert json.loads(out)["dimension"] == 1


def test_validate(c1_file):
    code, out = run("validate", c1_file)
    assert code == 0 and "valid" in out


def test_e_command(c1_file):
    code, out = run("e", c1_file, "--union", "Y1", "--format", "machine")
    assert code == 0
    assert json.loads(out)["value"] == "1/2"


def test_check_names_failing_union(c1_file):
    code, out = run("check", c1_file, "--bundle", "L")
    assert code == 1
    assert "{Y1}" in out and "1/2" in out
    code, _ = run("check", c1_file, "--bundle", "L+Y2")
    assert code == 0


def test_check_machine_output(c1_file):
    code, out = run("check", c1_file, "--format", "machine", "--scope", "all")
    rec = json.loads(out)
    assert code == 1 and rec["semistable"] is False
    assert rec["failures"][0]["union"] == ["Y1"]


def test_interval_command(c1_file):
    code, out = run("interval", c1_file, "--union", "Y1")
    assert code == 0
    assert "[-5/4, -1/4]" in out and "CurveExact" in out
    code, out = run("interval", c1_file, "--union", "Y1", "--format", "machine")
    rec = json.loads(out)["interval"]
    assert rec["endpoint"] == {"exact": "-1/4"} and rec["candidates"] == [-1]


def test_interval_degenerate_for_genus_one(tmp_path):
    path = str(tmp_path / "g1.json")
    run("gen", "curve", "--genera", "1,0", "--edges", "0-1:1", "--deg", "L=1,1", "--out", path)
    code, out = run("interval", path, "--union", "Y1")
    assert code == 1 and "Degenerate" in out


def test_enumerate_command(c1_file):
    code, out = run("enumerate", c1_file, "--bundle", "L", "--polarization", "K", "--mode", "minus", "--format", "machine")
    assert code == 0
    rec = json.loads(out)
    assert rec["twists"] == [[0, 1]]
    assert rec["classification"] == "Stable"


def test_enumerate_trace(c1_file):
    code, out = run("enumerate", c1_file, "--trace", "--format", "machine")
    assert code == 0 and json.loads(out)["trace"]["order"] == ["Y1", "Y2"]


def test_enumerate_on_triangle(tmp_path):
    path = str(tmp_path / "tri.json")
    run("gen", "curve", "--genera", "2,2,2", "--edges", "0-1:1,1-2:1,0-2:1", "--deg", "L=1,1,1", "--out", path)
    code, out = run("enumerate", path)
    assert code == 2 and "dual graph is not a tree" in out


def test_oracle_command(c1_file):
    code, out = run("oracle", c1_file, "--samples", "20", "--format", "machine")
    rec = json.loads(out)
    assert code == 0 and rec["ok"]
    assert rec["enumeration"]["agree"]


def test_malformed_inputs(tmp_path, c1_file):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run("validate", str(bad))[0] == 3
    assert run("enumerate", str(tmp_path / "missing.json"))[0] == 3
    assert run("e", c1_file, "--union", "Y7")[0] == 3
    assert run("check", c1_file, "--bundle", "L+Q")[0] == 3


def test_unknown_flag_rejected(c1_file):
    with pytest.raises(SystemExit) as exc:
        run("enumerate", c1_file, "--bogus")
    assert exc.value.code == 3


def test_invalid_configuration_reported(tmp_path, c1_file):
    doc = json.loads(open(c1_file).read())
    for ent in doc["intersection"]:
        if ent["monomial"] == ["Y1", "Y1"]:
            ent["value"] = "-2"
    path = tmp_path / "broken.json"
    path.write_text(json.dumps(doc))
    code, out = run("validate", str(path))
    assert code == 1 and "x_squared: FAIL" in out
    assert run("enumerate", str(path))[0] == 3
