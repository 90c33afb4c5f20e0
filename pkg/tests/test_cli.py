import json
import subprocess
import sys

import pytest

from qekr.cli import int_list, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_int_list():
    assert int_list("5") == [5]
    assert int_list("4-6") == [4, 5, 6]
    assert int_list("3,2,2") == [2, 3]


def test_verify_spectrum(capsys):
    code, out, _ = run(capsys, "verify", "spectrum", "--n", "4", "--k", "2", "--q", "2", "--format", "json")
    assert code == 0
    rep = json.loads(out)["reports"][0]
    assert rep["details"]["multiplicities"] == [1, 14, 20]


def test_verify_identities(capsys):
    code, out, _ = run(capsys, "verify", "identities", "--n", "5", "--k", "2", "--q", "2", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["passed"]
    checks = {r["check"] for r in doc["reports"]}
    assert {"lemma24", "lemma25", "lemma26", "lemma27"} <= checks


def test_verify_appendix_csv(capsys, tmp_path):
    out_csv, detail = tmp_path / "a.csv", tmp_path / "a.json"
    code, _, _ = run(capsys, "verify", "appendix", "--q", "2", "--n-max", "30", "--format", "csv",
                     "--output", str(out_csv), "--json-detail", str(detail))
    assert code == 0
    lines = out_csv.read_text().splitlines()
    assert lines[0] == "n,k,d,i,q,check,pass,lhs,rhs"
    assert all(line.split(",")[6] == "1" for line in lines[1:])
    assert json.loads(detail.read_text())["passed"]


def test_verify_determinism_across_jobs(capsys):
    args = ["verify", "all", "--n", "4-5", "--k", "2", "--q", "2", "--n-max", "12", "--k-max", "4", "--format", "json"]
    _, a, _ = run(capsys, *args, "--jobs", "1")
    _, b, _ = run(capsys, *args, "--jobs", "3")
    _, c, _ = run(capsys, *args, "--jobs", "1")
    assert a == b == c


def test_family_pencil(capsys):
    code, out, _ = run(capsys, "family", "--pencil", "--n", "7", "--k", "3", "--q", "2", "--d", "2", "--format", "json")
    assert code == 0
    reports = {r["check"]: r for r in json.loads(out)["reports"]}
    assert reports["degree_profile"]["details"]["delta"] == 1
    assert reports["bounds"]["details"]["bounds"]["delta_d"]["slack"] == 0


def test_family_random(capsys):
    code, out, _ = run(capsys, "family", "--random", "--seed", "9", "--n", "5", "--k", "2", "--q", "2", "--d", "1",
                       "--format", "json")
    assert code == 0
    reports = {r["check"]: r for r in json.loads(out)["reports"]}
    assert reports["degree_profile"]["details"]["delta"] <= 1


def test_family_spectral_pencil_fails_strictness(capsys):
    code, out, _ = run(capsys, "family", "--pencil", "--n", "5", "--k", "2", "--q", "2", "--d", "1", "--spectral")
    assert code == 1
    assert "not-strict" in out


def test_family_file_roundtrip_and_errors(capsys, tmp_path):
    path = tmp_path / "p.json"
    code, _, _ = run(capsys, "family", "--pencil", "--n", "5", "--k", "2", "--q", "2", "--save", str(path))
    assert code == 0
    code, out, _ = run(capsys, "family", "--file", str(path), "--d", "1")
    assert code == 0 and "3/3 checks passed" in out
    bad = tmp_path / "bad.fam"
    bad.write_text("{ nope")
    assert run(capsys, "family", "--file", str(bad))[0] == 2
    assert run(capsys, "family", "--file", str(tmp_path / "missing.fam"))[0] == 2


def test_family_not_intersecting_file(capsys, tmp_path):
    doc = {"format": "qekr-family", "format_version": 1, "n": 4, "k": 2, "q": 2, "modulus": [],
           "provenance": {"kind": "file"},
           "members": [[[1, 0, 0, 0], [0, 1, 0, 0]], [[0, 0, 1, 0], [0, 0, 0, 1]]]}
    path = tmp_path / "f.json"
    path.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "family", "--file", str(path), "--d", "1")
    assert code == 1 and "FAIL  intersecting" in out


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "bogus"],
        ["verify", "identities", "--n", "9", "--k", "4", "--q", "3"],
        ["verify", "identities", "--n", "5", "--k", "2", "--q", "6"],
        ["verify", "identities", "--n", "7", "--k", "3", "--q", "2"],
        ["verify", "spectrum", "--n", "4", "--k", "3", "--q", "2"],
        ["family", "--pencil", "--n", "5"],
        ["verify", "identities", "--cap", "0"],
    ],
)
def test_usage_errors_exit_2(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_cache_commands(capsys, tmp_path):
    code, out, _ = run(capsys, "cache", "build", "--n", "7", "--k", "3", "--q", "2", "--cache-dir", str(tmp_path))
    assert code == 0 and "11811 records" in out
    code, out, _ = run(capsys, "cache", "inspect", "--cache-dir", str(tmp_path))
    assert "format_version=1" in out and "count=11811" in out
    code, out, _ = run(capsys, "cache", "clear", "--cache-dir", str(tmp_path))
    assert "removed 1" in out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "qekr", "verify", "spectrum", "--n", "4", "--k", "2", "--q", "2"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "1/1 checks passed" in proc.stdout
