import csv
import json
import math

import numpy as np
import pytest

from symtens import main as cli
from symtens.core import DenseTensor
from symtens.errors import ContractViolation
from symtens.main import main
from symtens.tensor_io import write_tensor

S = 1 / math.sqrt(2)


@pytest.fixture
def counterexample(tmp_path):
    """e1 (x) e1 + e2 (x) e2 on C^2 and a non-symmetric best rank-1 point of it."""
    tensor = tmp_path / "z.json"
    write_tensor(tensor, DenseTensor(np.eye(2, dtype=complex)))
    point = tmp_path / "point.json"
    point.write_text(json.dumps({"field": "complex", "vectors": [[S, [0, S]], [S, [0, -S]]]}))
    return tensor, point


def _report(capsys) -> dict:
    return json.loads(capsys.readouterr().out)


def test_rank1_certifies_a_coplanar_point(counterexample, capsys):
    tensor, point = counterexample
    assert main(["rank1", str(tensor), "--point", str(point), "--restarts", "4"]) == 0
    report = _report(capsys)
    assert report["command"] == "rank1"
    assert report["results"]["structure"] == "coplanar"
    assert report["results"]["rank1"]["eps_gap"] <= 1e-8
    assert set(report["inputs"]) == {str(tensor), str(point)}
    assert report["runtime_ms"] is None


def test_reruns_are_byte_identical(counterexample, capsys, tmp_path):
    tensor, _ = counterexample
    out = tmp_path / "report.json"
    args = ["rank1", str(tensor), "--seed", "7", "--restarts", "4", "--out", str(out)]
    assert main(args) == 0
    first = capsys.readouterr().out
    assert main(args) == 0
    assert capsys.readouterr().out == first
    assert out.read_text() == first


def test_norms_hs(tmp_path, capsys):
    path = tmp_path / "z.json"
    write_tensor(path, DenseTensor(np.full((2, 2), 0.5)))
    assert main(["norms", str(path)]) == 0
    assert _report(capsys)["results"]["hs"]["value"] == pytest.approx(1.0)


def test_timing_flag_fills_runtime(tmp_path, capsys):
    path = tmp_path / "z.json"
    write_tensor(path, DenseTensor(np.eye(2)))
    assert main(["norms", str(path), "--timing"]) == 0
    assert isinstance(_report(capsys)["runtime_ms"], int)


def test_recover_with_trace(tmp_path, capsys):
    path = tmp_path / "v.json"
    path.write_text(json.dumps({"field": "real", "vectors": [[1, 0], [0, 1], [0, 1]]}))
    assert main(["recover", str(path), "--trace"]) == 0
    recovery = _report(capsys)["results"]["recovery"]
    assert recovery["steps"]
    assert main(["recover", str(path)]) == 0
    assert _report(capsys)["results"]["recovery"]["steps"] == []


def test_recover_collinear_vectors_reports_the_power(tmp_path, capsys):
    path = tmp_path / "v.json"
    path.write_text(json.dumps({"field": "real", "vectors": [[0.6, 0.8], [0.6, 0.8], [-0.6, -0.8]]}))
    assert main(["recover", str(path)]) == 1
    captured = capsys.readouterr()
    results = json.loads(captured.out)["results"]
    assert results["recovery"] is None
    degenerate = results["degenerate"]["tensor"]
    assert degenerate["shape"] == [2, 2, 2]
    x = np.array([0.6, 0.8])
    assert np.allclose(degenerate["data"], np.einsum("i,j,k->ijk", x, x, x).ravel())
    assert "collinear" in captured.err


def test_factor_a_form_file(tmp_path, capsys):
    path = tmp_path / "form.txt"
    path.write_text("# y1^2 - y2^2\n2\n1 0\n0 0\n-1 0\n")
    assert main(["factor", str(path)]) == 0
    results = _report(capsys)["results"]
    assert len(results["factorization"]["factors"]) == 2
    assert results["round_trip_hs"] <= 1e-8


def test_demo_border_rank_writes_csv(tmp_path, capsys):
    table = tmp_path / "gaps.csv"
    assert main(["demo", "border-rank", "--param", "n_max=20", "--csv", str(table)]) == 0
    summary = _report(capsys)["results"]["demo"]["summary"]
    assert summary["monotone"] is True
    assert summary["max_abs_error"] <= 1e-12
    assert summary["ratio_10_20"] == pytest.approx(2.0, rel=0.01)
    with open(table, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["n", "gap_hs", "closed_form", "abs_error"]
    assert len(rows) == 21


def test_missing_file_exits_1(tmp_path, capsys):
    assert main(["norms", str(tmp_path / "absent.json")]) == 1
    assert "symtens:" in capsys.readouterr().err


def test_bad_form_exits_1(tmp_path, capsys):
    path = tmp_path / "form.txt"
    path.write_text("2\n1 0\n")
    assert main(["factor", str(path)]) == 1
    assert f"{path}:1:" in capsys.readouterr().err


def test_bad_demo_param_exits_1(capsys):
    assert main(["demo", "border-rank", "--param", "n_max"]) == 1


def test_contract_violation_exits_2(tmp_path, capsys, monkeypatch):
    path = tmp_path / "form.txt"
    path.write_text("1\n1 0\n1 0\n")

    def broken(form, cfg=None):
        raise ContractViolation("factorization", "forced", 1.0)

    monkeypatch.setattr(cli, "factor_binary_form", broken)
    assert main(["factor", str(path)]) == 2
    assert "[factorization]" in capsys.readouterr().err


def test_unknown_command_is_a_usage_error():
    with pytest.raises(SystemExit):
        main(["frobnicate"])
