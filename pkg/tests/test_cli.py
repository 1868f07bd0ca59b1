import json
import os

import pytest

from anisomult import cli

DATA = os.path.join(os.path.dirname(__file__), "data")


def _run(capsys, *argv):
    code = cli.main(list(argv))
    return code, capsys.readouterr().out


def test_geometry_matches_golden(tmp_path, capsys):
    out = tmp_path / "geo.json"
    code = cli.main(["geometry", "--matrix", f"{DATA}/matrix2d.json",
                     "--out", str(out)])
    assert code == 0
    golden = open(f"{DATA}/golden_geometry_2d.json", "rb").read()
    assert out.read_bytes() == golden


def test_criterion_matches_golden(tmp_path):
    out = tmp_path / "crit.json"
    code = cli.main(["criterion", "--matrix", f"{DATA}/matrix1d.json",
                     "--measure", f"{DATA}/measure1d.json",
                     "--p", "1.5", "--k-min", "-5", "--k-max", "5",
                     "--out", str(out)])
    assert code == 0
    golden = open(f"{DATA}/golden_criterion_1d.json", "rb").read()
    assert out.read_bytes() == golden


def test_annulus_matches_golden(tmp_path):
    out = tmp_path / "ann.json"
    code = cli.main(["criterion", "--matrix", f"{DATA}/matrix1d.json",
                     "--measure", f"{DATA}/measure1d.json",
                     "--p", "2", "--k-min", "-3", "--k-max", "3",
                     "--out", str(out)])
    assert code == 0
    golden = open(f"{DATA}/golden_annulus_1d.json", "rb").read()
    assert out.read_bytes() == golden


def test_runs_are_byte_identical(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for out in (a, b):
        assert cli.main(["criterion", "--matrix", f"{DATA}/matrix2d.json",
                         "--measure", f"{DATA}/measure2d.json",
                         "--p", "1.0", "--out", str(out)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_threshold_exit_code(capsys):
    code, out = _run(capsys, "criterion", "--matrix", f"{DATA}/matrix1d.json",
                     "--measure", f"{DATA}/measure1d.json",
                     "--p", "2", "--k-min", "-3", "--k-max", "3",
                     "--threshold", "0.5")
    assert code == 1
    obj = json.loads(out)
    assert obj["passed"] is False
    assert obj["result"]["threshold"] == 0.5


def test_missing_file_exit_code(capsys):
    code, out = _run(capsys, "geometry", "--matrix", "/no/such/file.json")
    assert code == 2
    obj = json.loads(out)
    assert obj["error"]["type"] == "FileNotFoundError"


def test_invalid_matrix_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"matrix": [[0.5]]}))
    code, out = _run(capsys, "geometry", "--matrix", str(bad))
    assert code == 2
    assert json.loads(out)["error"]["type"] == "NotExpansive"


def test_dimension_mismatch(capsys):
    code, out = _run(capsys, "criterion", "--matrix", f"{DATA}/matrix2d.json",
                     "--measure", f"{DATA}/measure1d.json")
    assert code == 2
    assert json.loads(out)["error"]["type"] == "MeasureError"


def test_empty_scale_range(capsys):
    code, out = _run(capsys, "criterion", "--matrix", f"{DATA}/matrix1d.json",
                     "--measure", f"{DATA}/measure1d.json",
                     "--k-min", "3", "--k-max", "-3")
    assert code == 2


def test_endpoint_warning(capsys):
    code, out = _run(capsys, "criterion", "--matrix", f"{DATA}/matrix1d.json",
                     "--measure", f"{DATA}/measure1d.json",
                     "--p", "1.5", "--k-min", "-2", "--k-max", "-2")
    assert code == 0
    obj = json.loads(out)
    assert obj["warnings"] and "endpoint" in obj["warnings"][0]


def test_verify_single_suite(capsys):
    code, out = _run(capsys, "verify", "--suite", "partition")
    assert code == 0
    obj = json.loads(out)
    assert obj["passed"] is True
    assert obj["result"]["suites"][0]["name"] == "partition"
    assert "ANISO_THREADS" in obj["env"]


def test_verify_unknown_suite(capsys):
    code, out = _run(capsys, "verify", "--suite", "bogus")
    assert code == 2
    assert json.loads(out)["error"]["type"] == "SuiteError"


def test_usage_error_exit_code(capsys):
    assert cli.main(["criterion"]) == 2
    capsys.readouterr()
