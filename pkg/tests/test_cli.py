import json
import math

import numpy as np
import pytest

from numindex.cli import main

L2_3 = {"kind": "lp", "p": 2, "dim": 3}
SUM_SPACE = {
    "kind": "absolute_sum",
    "outer": {"kind": "lp", "p": "inf", "dim": 2},
    "left": {"kind": "lp", "p": 2, "dim": 2},
    "right": {"kind": "lp", "p": 2, "dim": 1},
}


@pytest.fixture()
def space_file(tmp_path):
    p = tmp_path / "space.json"
    p.write_text(json.dumps(SUM_SPACE))
    return str(p)


@pytest.fixture()
def op_file(tmp_path):
    p = tmp_path / "op.json"
    p.write_text(
        json.dumps(
            {"matrix": [[1, 0, 0], [0, 0, math.sqrt(2)], [0, 0, 0]], "space": SUM_SPACE}
        )
    )
    return str(p)


def run_json(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_space_command(space_file, capsys):
    code, payload = run_json(capsys, ["space", "--space", space_file])
    assert code == 0
    assert payload["schema"] == "1"
    assert payload["dim"] == 3
    assert payload["space"]["kind"] == "absolute_sum"


def test_space_command_stdin(capsys, monkeypatch):
    import io

    monkeypatch.setattr("sys.stdin", io.StringIO(json.dumps(L2_3)))
    code, payload = run_json(capsys, ["space", "--space", "-"])
    assert code == 0
    assert payload["dim"] == 3


def test_space_command_rejects_garbage(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text('{"kind": "lp", "p": 0.2, "dim": 2}')
    assert main(["space", "--space", str(p)]) == 2
    p.write_text("{oops")
    assert main(["space", "--space", str(p)]) == 2


def test_opnorm_and_radius_commands(op_file, capsys):
    code, payload = run_json(
        capsys, ["opnorm", "--matrix", op_file, "--budget", "20000", "--seed", "1"]
    )
    assert code == 0
    assert payload["estimate"]["value"] == pytest.approx(math.sqrt(3), abs=2e-2)
    code, payload = run_json(
        capsys, ["radius", "--matrix", op_file, "--budget", "20000", "--seed", "1"]
    )
    assert code == 0
    assert payload["estimate"]["value"] == pytest.approx(1.5, abs=2e-2)
    assert payload["closed_form"] == "unavailable"
    assert payload["config"]["seed"] == 1


def test_radius_csv_matrix_with_sidecar(tmp_path, capsys):
    mat = tmp_path / "m.csv"
    mat.write_text("0,1\n0,0\n")
    spc = tmp_path / "s.json"
    spc.write_text(json.dumps({"kind": "lp", "p": 2, "dim": 2}))
    code, payload = run_json(
        capsys, ["radius", "--matrix", str(mat), "--space", str(spc)]
    )
    assert code == 0
    assert payload["estimate"]["value"] == pytest.approx(0.5, abs=1e-2)
    assert payload["closed_form"] == pytest.approx(0.5)
    # CSV without a sidecar space fails validation
    assert main(["radius", "--matrix", str(mat)]) == 2


def test_lie_command(space_file, capsys):
    code, payload = run_json(capsys, ["lie", "--space", space_file])
    assert code == 0
    assert payload["dimension"] == 1
    assert payload["components"] == [[0, 1], [2]]
    S = np.asarray(payload["elements"][0])
    assert abs(S[0, 1]) == pytest.approx(1 / math.sqrt(2), abs=1e-9)


def test_quotient_command(op_file, capsys):
    code, payload = run_json(
        capsys, ["quotient", "--matrix", op_file, "--budget", "20000"]
    )
    assert code == 0
    assert payload["estimate"]["value"] >= math.sqrt(3) - 3e-2
    assert payload["lie_dimension"] == 1


def test_index_commands(tmp_path, capsys):
    p = tmp_path / "l1.json"
    p.write_text(json.dumps({"kind": "lp", "p": 1, "dim": 2}))
    code, payload = run_json(
        capsys, ["index", "--space", str(p), "--restarts", "4", "--budget", "4000"]
    )
    assert code == 0
    assert payload["value"] >= 0.97
    p2 = tmp_path / "l2.json"
    p2.write_text(json.dumps({"kind": "lp", "p": 2, "dim": 4}))
    code, payload = run_json(capsys, ["index2", "--space", str(p2)])
    assert code == 0
    assert payload["value"] == 1.0


def test_construct_roundtrip(space_file, tmp_path, capsys):
    out = tmp_path / "t1.json"
    code = main(["construct", "witness-sup", "--space", space_file, "--out", str(out)])
    assert code == 0
    payload = json.loads(out.read_text())
    T = payload["operator"]["matrix"]
    assert T[1][2] == pytest.approx(math.sqrt(2))
    # pipeable into radius
    op = tmp_path / "op.json"
    op.write_text(json.dumps(payload["operator"]))
    code, rad = run_json(capsys, ["radius", "--matrix", str(op), "--budget", "20000"])
    assert code == 0
    assert rad["estimate"]["value"] <= 1.5 + 3e-2


def test_construct_shift_and_ck(tmp_path, capsys):
    p = tmp_path / "E.json"
    p.write_text(json.dumps({"kind": "lp", "p": 1, "dim": 2}))
    code, payload = run_json(
        capsys, ["construct", "shift", "--space", str(p), "--direction", "21"]
    )
    assert code == 0
    assert payload["operator"]["matrix"][0][1] == 1.0
    code, payload = run_json(capsys, ["construct", "ck", "--m", "2"])
    assert code == 0
    assert len(payload["operator"]["matrix"]) == 4


def test_shift_check_command(tmp_path, capsys):
    p = tmp_path / "E.json"
    p.write_text(json.dumps({"kind": "lp", "p": 2, "dim": 2}))
    code, payload = run_json(
        capsys, ["shift-check", "--space", str(p), "--budget", "8000"]
    )
    assert code == 0
    assert payload["report"]["margin"] >= -2e-2


def test_paper_suite_filter_and_determinism(tmp_path, capsys):
    args = [
        "paper-suite", "--filter", "index-p-trend", "--seed", "3",
        "--out", str(tmp_path / "r1"),
    ]
    assert main(args) == 0
    capsys.readouterr()
    args[-1] = str(tmp_path / "r2")
    assert main(args) == 0
    capsys.readouterr()
    a = (tmp_path / "r1" / "report.json").read_text()
    b = (tmp_path / "r2" / "report.json").read_text()
    assert a == b  # same seed, byte-identical report
    payload = json.loads(a)
    assert payload["schema"] == "1"
    assert payload["results"][0]["status"] == "pass"


def test_paper_suite_unknown_filter(capsys):
    assert main(["paper-suite", "--filter", "nonexistent"]) == 2


def test_paper_suite_csv(tmp_path):
    assert (
        main(
            [
                "paper-suite", "--filter", "index-extreme", "--format", "csv",
                "--out", str(tmp_path),
            ]
        )
        == 0
    )
    text = (tmp_path / "report.csv").read_text()
    assert text.splitlines()[0].startswith("schema")
    assert "index-extreme-norms" in text
