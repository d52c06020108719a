import io
import json
import subprocess
import sys

import pytest

from voa.cli import main


@pytest.fixture(autouse=True)
def cache_dir(tmp_path, monkeypatch):
    d = tmp_path / "cache"
    monkeypatch.setenv("VOA_CACHE_DIR", str(d))
    return d


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def test_remainder_n1():
    code, out, _ = run("remainder", "--n", "1")
    assert code == 0
    assert "1/3" in out and "J^3" in out


def test_singular_empty_below_minimal_weight():
    code, out, _ = run("singular", "--n", "1", "--weight", "3")
    assert code == 0
    assert "dimension 0" in out


def test_singular_json():
    code, out, _ = run("singular", "--n", "1", "--weight", "4", "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["dimension"] == 1
    assert data["basis"][0]["weight"] == 4


def test_ope_free_field():
    code, out, _ = run("ope", "--system", "betagamma:1", "--expr", "(circ 1 (J 0) (J 0))")
    assert code == 0
    assert out.strip() == "-1·|0⟩"


def test_ope_json():
    code, out, _ = run("ope", "--system", "current:-1", "--expr", "(d 1 (J 0))", "--format", "json")
    data = json.loads(out)
    assert data["terms"] == [{"coeff": "1", "word": [["J", 0, -2]]}]


@pytest.mark.parametrize("argv", [
    ["ope", "--system", "betagamma:1", "--expr", "(circ 1 (J 0)"],
    ["ope", "--system", "weird:1", "--expr", "(J 0)"],
    ["ope", "--system", "current:-1", "--expr", "(beta 0)"],
    ["dij", "--n", "1", "--I", "1,0", "--J", "0,1"],
    ["dij", "--n", "1", "--I", "0,1,2", "--J", "0,1,2"],
    ["dij", "--n", "1", "--I", "a,b", "--J", "0,1"],
    ["singular", "--n", "0", "--weight", "3"],
    ["zhu", "--n", "1"],
    ["verify", "--suite", "nope"],
    ["frobnicate"],
    [],
])
def test_usage_errors(argv):
    code, _, err = run(*argv)
    assert code == 2
    assert "error" in err


def test_parse_error_reports_position():
    _, _, err = run("ope", "--system", "betagamma:1", "--expr", "(J 0))")
    assert "position 5" in err


def test_dij_text():
    code, out, _ = run("dij", "--n", "1", "--I", "0,1", "--J", "0,1")
    assert code == 0
    assert ":Ω_{0,0} Ω_{1,1}:" in out
    assert "projection_zero=True" in out


def test_decouple_raise():
    code, out, _ = run("decouple", "--n", "1", "--raise-to", "5", "--format", "json")
    data = json.loads(out)
    assert code == 0
    assert [r["r"] for r in data["relations"]] == [3, 4, 5]
    assert all(r["verified"] for r in data["relations"])


def test_decouple_bc():
    code, out, _ = run("decouple", "--n", "1", "--bc")
    assert code == 0 and "j^1 =" in out and "verified" in out


def test_zhu_commands():
    code, out, _ = run("zhu", "--n", "1", "--lt")
    assert code == 0 and "a^0*a^2" in out
    code, out, _ = run("zhu", "--n", "1", "--relation")
    assert code == 0 and "predicted form" in out


def test_cache_transparency(cache_dir):
    argv = ["dij", "--n", "1", "--I", "0,1", "--J", "0,2", "--format", "json"]
    cold = run(*argv)
    assert any(cache_dir.iterdir())
    warm = run(*argv)
    assert cold == warm
    nocache = run("--no-cache", *argv)
    assert nocache == cold


def test_corrupt_cache_is_ignored(cache_dir):
    argv = ["remainder", "--n", "1"]
    first = run(*argv)
    for f in cache_dir.iterdir():
        f.write_text("{not json")
    assert run(*argv) == first


@pytest.mark.parametrize("suite", ["identities", "parabolic", "weyl", "lw"])
def test_verify_reproducible(suite):
    cases = "2" if suite == "lw" else "15"
    a = run("verify", "--suite", suite, "--seed", "7", "--cases", cases, "--format", "json")
    b = run("verify", "--suite", suite, "--seed", "7", "--cases", cases, "--format", "json")
    assert a == b
    assert a[0] == 0
    assert json.loads(a[1])["passed"] == int(cases)


def test_module_entry_point(cache_dir):
    res = subprocess.run([sys.executable, "-m", "voa", "remainder", "--n", "1"],
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert "1/3" in res.stdout
