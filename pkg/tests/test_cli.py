import csv
import io
import json

import pytest

from heegner6.cli import main


def run(*argv):
    buf = io.StringIO()
    code = main(list(argv), stdout=buf)
    return code, buf.getvalue()


def test_unit_identity_n5():
    code, out = run("unit-identity", "--n", "5")
    rec = json.loads(out)
    assert code == 0
    assert rec["schema_version"] == 1 and rec["command"] == "unit-identity"
    assert rec["inputs"] == {"n": 5}


def test_reproducible_runs_are_byte_identical():
    a = run("unit-identity", "--n", "7", "--reproducible")
    b = run("unit-identity", "--n", "7", "--reproducible")
    assert a == b
    assert json.loads(a[1])["wall_time_ms"] == 0


def test_construct_5_1():
    code, out = run("construct", "--a", "5", "--b", "1", "--reproducible")
    assert code == 0
    rec = json.loads(out)
    assert rec["command"] == "construct"
    assert rec["precision_used"] >= 384


@pytest.mark.parametrize("argv", [
    ("construct", "--a", "7", "--b", "1"),        # n = 7 fails a = b (mod 4)
    ("construct", "--a", "9", "--b", "1"),        # not squarefree
    ("unit-identity", "--n", "17"),               # 17 = -1 (mod 9)
    ("unit-identity",),                           # missing --n
    ("construct", "--a", "5", "--precision", "64"),
    ("bogus",),
])
def test_usage_errors(argv):
    code, _ = run(*argv)
    assert code == 2


def test_csv_and_pretty_formats():
    code, out = run("unit-identity", "--n", "5", "--format", "csv", "--reproducible")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 1 and rows[0]["command"] == "unit-identity" and rows[0]["inputs.n"] == "5"
    code, out = run("unit-identity", "--n", "5", "--format", "pretty")
    assert code == 0 and "unit-identity" in out


def test_environment_precision(monkeypatch):
    monkeypatch.setenv("HEEGNER6_PRECISION", "512")
    code, out = run("unit-identity", "--n", "5")
    assert code == 0 and json.loads(out)["precision_used"] == 512
    monkeypatch.setenv("HEEGNER6_PRECISION", "not-a-number")
    assert run("unit-identity", "--n", "5")[0] == 2


def test_scan_unit_lists_admissible_n():
    code, out = run("scan", "--unit", "--max", "50", "--reproducible")
    assert code == 0
    ns = [json.loads(line)["inputs"]["n"] for line in out.splitlines()]
    assert ns == [5, 7, 11, 13, 23, 25, 29, 31, 41, 43, 47, 49]


def test_scan_empty_range():
    code, out = run("scan", "--unit", "--min", "1", "--max", "4")
    assert code == 0 and out == ""


def test_selftest_quick_passes(capsys):
    code, out = run("selftest", "--quick", "--reproducible")
    assert code == 0 and json.loads(out)["pass"] is True


def test_selftest_detects_corrupt_golden(tmp_path, capsys):
    from importlib import resources

    data = json.loads(resources.files("heegner6").joinpath("data/golden_qseries.json").read_text())
    data["X"]["coefficients"]["4"] = 2
    bad = tmp_path / "golden.json"
    bad.write_text(json.dumps(data))
    code, out = run("selftest", "--quick", "--golden", str(bad), "--reproducible")
    rec = json.loads(out)
    assert code == 1 and rec["pass"] is False
    assert any("golden" in name for name in rec["failed"])
