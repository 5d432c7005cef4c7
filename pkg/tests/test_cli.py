from pathlib import Path

import pytest

from costab.cli import main

DATA = Path(__file__).resolve().parent.parent / "data"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    return code, capsys.readouterr().out


@pytest.mark.parametrize("name", ["kA2.snapshot", "kA2_good.condition", "kA2_counterexample.condition",
                                  "kA2_std.cotstructure", "kA2_good.coslicing", "kA2_good_rotated.charge"])
def test_validate_good_files(capsys, name):
    code, out = run(capsys, "validate", DATA / name)
    assert code == 0, out
    assert "overall = pass" in out


def test_validate_invalid_coslicing(capsys):
    code, out = run(capsys, "validate", DATA / "bad.coslicing")
    assert code == 1
    assert "verdict ii = fail ; hom(x@0,y@0) = 1" in out


def test_validate_malformed(capsys):
    code = main(["validate", str(DATA / "malformed.coslicing")])
    err = capsys.readouterr().err
    assert code == 2 and "1.5.2" in err and ":5:" in err


def test_missing_file(capsys):
    assert main(["validate", "/nonexistent/file.condition"]) == 2


def test_counterexample(capsys, tmp_path):
    out_file = tmp_path / "report.txt"
    code, out = run(capsys, "demo-counterexample", "--eps", "0.25", "--out", out_file)
    assert code == 0
    assert "verdict no-R = pass" in out
    assert "forces y@0 into R(0.75)" in out
    assert out_file.read_text() == out


def test_demo_dual_group_action(capsys, tmp_path):
    csv = tmp_path / "chart.csv"
    code, out = run(capsys, "demo-theorem-b", "--count", "8", "--csv", csv)
    assert code == 0, out
    assert "verdict cohearts = pass" in out and "verdict free = pass" in out
    assert len(csv.read_text().splitlines()) == 9


def test_deform(capsys, tmp_path):
    res = tmp_path / "out.condition"
    code, out = run(capsys, "deform", DATA / "kA2_good.condition", DATA / "kA2_good_rotated.charge",
                    "--out", res)
    assert code == 0 and "verdict distance = pass" in out
    code, out = run(capsys, "validate", res)
    assert code == 0


def test_deform_refused(capsys):
    code, out = run(capsys, "deform", DATA / "kA2_good.condition", DATA / "kA2_good_rotated.charge",
                    "--eps", "0.4")
    assert code == 1 and "precondition = fail" in out
    code, out = run(capsys, "deform", DATA / "kA2_counterexample.condition", DATA / "kA2_good_rotated.charge")
    assert code == 1 and "(S) fails" in out


def test_metric(capsys):
    code, out = run(capsys, "metric", DATA / "kA2_good.coslicing", DATA / "kA2_good.coslicing")
    assert code == 0 and "verdict d = info ; 0.0" in out
    code, out = run(capsys, "metric", DATA / "kA2_good.coslicing", DATA / "kA2_translated.coslicing")
    assert "verdict d = info ; 0.125" in out


def test_hn(capsys):
    code, out = run(capsys, "hn", "z@0")
    assert code == 0 and "y@0 [0] | x@1 [1]" in out
    code, out = run(capsys, "hn", "z@0", "--cotstructure", DATA / "kA2_std.cotstructure")
    assert code == 0 and "y@0 [0] | x@1 [1]" in out
    assert main(["hn", "q@0"]) != 0


def test_enumerate(capsys):
    code, out = run(capsys, "enumerate-cohearts", "--algebra", "kA2", "--window", "-1", "1")
    assert code == 0 and "verdict coheart 9 = info ; x@0 y@0" in out
    code, out = run(capsys, "enumerate-cohearts", "--algebra", "k", "--window", "0", "1", "--width", "1")
    assert code == 0 and "P1@0" in out and "P1@1" in out


def test_snapshot_flag(capsys):
    code, out = run(capsys, "hn", "z@0", "--snapshot", DATA / "kA2.snapshot")
    assert code == 0
