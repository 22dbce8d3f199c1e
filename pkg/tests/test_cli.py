import json
import subprocess
import sys

import pytest

from isc.cli import main

from known_values import S_INTEGRAL


@pytest.mark.parametrize("r", sorted(S_INTEGRAL))
def test_enumerate_text(r, capsys):
    assert main(["enumerate", "--r", str(r)]) == 0
    lines = capsys.readouterr().out.split()
    assert {int(v) for v in lines} == S_INTEGRAL[r]
    assert [int(v) for v in lines] == sorted(S_INTEGRAL[r])


def test_enumerate_json(capsys):
    assert main(["enumerate", "--r", "13", "--format", "json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["r"] == 13
    assert all(isinstance(v, str) for v in data["values"])
    assert {int(v) for v in data["values"]} == S_INTEGRAL[13]


def test_enumerate_rejects_positive_genus():
    with pytest.raises(SystemExit):
        main(["enumerate", "--r", "11"])


def test_certify_success(tmp_path, capsys):
    cache = tmp_path / "t.txt"
    code = main(["certify", "--j", "4913", "--pmin", "41", "--pmax", "47", "--lbound", "1000",
                 "--trace-cache", str(cache)])
    out = json.loads(capsys.readouterr().out)
    assert code == 0 and out["certified"]
    assert [e["p"] for e in out["primes"]] == ["41", "43", "47"]
    assert out["primes"][0]["witnessing_l"] == {"SplitEv": "11", "NonsplitEv": "23", "ExceptionalEv": "11"}
    assert cache.read_text().startswith("4913/1 11 ")


def test_certify_inconclusive_exit_code(tmp_path, capsys):
    code = main(["certify", "--j=-9317", "--pmin", "37", "--pmax", "37", "--lbound", "500",
                 "--trace-cache", str(tmp_path / "t.txt")])
    out = json.loads(capsys.readouterr().out)
    assert code == 2
    assert out["primes"][0]["missing"] == ["NonsplitEv"]


def test_certify_cm_is_error(tmp_path, capsys):
    assert main(["certify", "--j=-32768", "--trace-cache", str(tmp_path / "t.txt")]) == 1


def test_env_var_sets_cache_path(tmp_path, monkeypatch, capsys):
    env_path = tmp_path / "env.txt"
    monkeypatch.setenv("ISC_TRACE_CACHE", str(env_path))
    main(["certify", "--j", "4913", "--pmin", "41", "--pmax", "41", "--lbound", "200"])
    assert env_path.exists()
    flag_path = tmp_path / "flag.txt"
    main(["certify", "--j", "4913", "--pmin", "41", "--pmax", "41", "--lbound", "200",
          "--trace-cache", str(flag_path)])
    assert flag_path.exists()
    assert env_path.read_text() == flag_path.read_text()


def test_reduction(capsys):
    assert main(["reduction", "--j=-882216989/131072", "--p", "41"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["verdict"] == "IncompatibleWithNns"
    assert out["profile"]["denominator_primes"] == ["2"]
    assert main(["reduction", "--j", "4913", "--p", "43"]) == 0
    assert json.loads(capsys.readouterr().out)["verdict"] == "IntegralAlready"
    assert main(["reduction", "--j", "4913", "--p", "13"]) == 1


def test_verify_small_range(tmp_path, capsys):
    out = tmp_path / "r.csv"
    code = main(["verify-theorem", "--pmax", "43", "--lbound", "500", "--format", "csv",
                 "--out", str(out), "--trace-cache", str(tmp_path / "t.txt")])
    assert code == 0
    assert len(out.read_text().splitlines()) == 1 + 50 * 2


def test_verify_cache_io_failure(tmp_path, capsys):
    code = main(["verify-theorem", "--pmax", "43", "--lbound", "500",
                 "--trace-cache", str(tmp_path / "no" / "such" / "dir.txt")])
    assert code == 1
    assert "error" in capsys.readouterr().err


def test_verify_bad_config(capsys):
    assert main(["verify-theorem", "--pmax", "30"]) == 1


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "isc", "enumerate", "--r", "5"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert len(proc.stdout.split()) == 8
