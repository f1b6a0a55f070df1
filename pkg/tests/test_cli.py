import json
import subprocess
import sys

import pytest

from aperycmzv.series import SeriesSpec, parse_spec


def run_cli(*args):
    return subprocess.run([sys.executable, "-m", "aperycmzv.cli", *args],
                          capture_output=True, text=True, timeout=600)


def test_eval_json_roundtrip():
    out = run_cli("eval", "o+:2 >= 0", "--digits", "20", "--json")
    assert out.returncode == 0
    data = json.loads(out.stdout)
    assert data["value"]["re"].startswith("1.83193118835")
    assert data["engine"] == "march"
    # the emitted spec JSON parses back to the same spec
    spec = SeriesSpec.from_json(data["spec"])
    assert spec == parse_spec("o+:2 >= 0")


def test_eval_cmzv_stage():
    out = run_cli("eval", "o+:2 >= 0", "--digits", "15", "--stage", "cmzv",
                  "--json")
    data = json.loads(out.stdout)
    assert len(data["cmzv"]) == 4
    assert all(e["s"] == [1, 1] for e in data["cmzv"])


def test_compile_stages():
    for stage in ("parsed", "normalized", "omega", "x-alphabet"):
        out = run_cli("compile", "n:2 >= o+:1 >= o-:1 > 0", "--stage", stage)
        assert out.returncode == 0, stage
    out = run_cli("compile", "o+:2 >= 0", "--stage", "omega")
    assert "[f3] w3 | w1" in out.stdout


def test_catalog_command():
    out = run_cli("catalog", "--name", "G", "--digits", "30")
    assert out.returncode == 0
    assert out.stdout.startswith("0.91596559417721901505")
    out = run_cli("catalog", "--list")
    assert "zeta3" in out.stdout


def test_exit_code_on_invalid_spec():
    out = run_cli("eval", "o-:2 >= 0")
    assert out.returncode == 2
    assert "strict" in out.stderr


def test_exit_code_on_syntax_error():
    out = run_cli("eval", "junk:: >")
    assert out.returncode == 2


def test_exit_code_on_evaluation_failure():
    # CMZV stage is undefined away from x = 1
    out = run_cli("eval", "o+:2 >= 0", "--x2", "1/4", "--stage", "cmzv")
    assert out.returncode == 3


def test_alias_n_flag():
    out = run_cli("eval", "e:2 > o+:1 >= 0", "--alias-n", "--digits", "15",
                  "--json")
    data = json.loads(out.stdout)
    assert data["value"]["re"].startswith("8.41439832")  # 7 zeta(3)


def test_selftest_filter():
    out = run_cli("selftest", "--suite", "golden", "--filter", "seven", "--json")
    assert out.returncode == 0
    data = json.loads(out.stdout)
    assert len(data) == 1 and data[0]["ok"]
