from __future__ import annotations

import json

import pytest

from gaugecolor import lattice as lat
from gaugecolor.cli import main

from conftest import lattice


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv)
    return code, json.loads(out)


def test_build_15_qubits(capsys):
    code, data = run_json(capsys, "build", "--family", "3d", "--n", "1", "--d", "1", "--e", "2")
    assert code == 0
    assert data["qubits"] == 15 and data["stabilizer_rank"] == 14


def test_build_2d_weights(capsys):
    code, data = run_json(capsys, "build", "--family", "2d", "--n", "2", "--d", "1", "--e", "1")
    assert code == 0
    assert data["qubits"] == 19 and data["max_gauge_weight"] == 6


def test_build_rejects_bad_parameters(capsys):
    code, data = run_json(capsys, "build", "--family", "3d", "--n", "1", "--d", "2", "--e", "2")
    assert code == 2 and data["error"] == "invalid_parameters"
    code, _ = run(capsys, "build", "--family", "3d", "--n", "0")
    assert code == 2


def test_verify_passes(capsys):
    code, data = run_json(capsys, "verify", "--family", "3d", "--n", "1", "--threads", "2")
    assert code == 0
    assert all(c["pass"] for c in data["lattice"])
    assert all(entry["ok"] for entry in data["codes"])
    c11 = next(entry for entry in data["codes"] if (entry["d"], entry["e"]) == (1, 1))
    assert any(c["check_name"] == "hadamard" and c["pass"] for c in c11["clifford"])


def test_verify_corrupted_lattice(tmp_path, capsys):
    data = lat.to_json(lattice("2d", 2))
    data["top_simplices"] = data["top_simplices"][1:]
    path = tmp_path / "broken.json"
    path.write_text(json.dumps(data))
    code, out = run(capsys, "verify", "--lattice", str(path))
    assert code == 1
    report = json.loads(out)
    failing = [c for c in report["lattice"] if not c["pass"]]
    assert failing and failing[0]["witness"]


def test_verify_unreadable_lattice(tmp_path, capsys):
    path = tmp_path / "junk.json"
    path.write_text("{not json")
    code, out = run(capsys, "verify", "--lattice", str(path))
    assert code == 1
    assert json.loads(out)["lattice"][0]["witness"]


def test_plan_examples(capsys):
    code, data = run_json(capsys, "plan", "--family", "3d", "--n", "1", "--d", "1", "--e", "2",
                          "--gate-level", "3")
    assert code == 0 and data["plan"]["k"] == 7 and data["plan"]["T"] == []
    code, data = run_json(capsys, "plan", "--family", "2d", "--n", "1", "--gate-level", "2")
    assert code == 0 and data["plan"]["k"] == 3 and data["plan"]["T"] == []
    code, data = run_json(capsys, "plan", "--family", "3d", "--n", "1", "--d", "1", "--e", "1",
                          "--gate-level", "3")
    assert code == 2 and data["error"] == "dimension_condition"
    assert "D = 3" in data["message"]


def test_schedule_and_gaugefix(capsys):
    code, data = run_json(capsys, "schedule", "--family", "3d", "--n", "1", "--dprime", "2")
    assert code == 0
    assert [s["cover"] for s in data["schedules"]] == [[[0, 1], [2, 3]]] * 2
    code, data = run_json(capsys, "gaugefix", "--family", "3d", "--n", "1", "--target", "1,2")
    assert code == 0
    assert len(data["plan"]["measurements"]) == 6
    code, _ = run(capsys, "gaugefix", "--family", "3d", "--n", "1", "--target", "oops")
    assert code == 2


def test_demo_determinism(capsys):
    args = ["demo-universal", "--seed", "5"]
    code, first = run_json(capsys, *args)
    _, again = run_json(capsys, *args)
    assert code == 0 and first == again
    assert first["fidelity"] > 1 - 1e-10 and first["stabilizers_ok"]
    _, other = run_json(capsys, "demo-universal", "--seed", "6")
    assert other["phases"] == first["phases"]


def test_demo_without_correction_fails(capsys):
    codes = {run(capsys, "demo-universal", "--seed", str(s), "--skip-correction")[0] for s in range(4)}
    assert 1 in codes


def test_demo_rejects_other_families(capsys):
    code, _ = run(capsys, "demo-universal", "--family", "2d")
    assert code == 2


def test_export_writes_files(tmp_path, capsys):
    out = tmp_path / "steane"
    code, data = run_json(capsys, "export", "--family", "2d", "--n", "1", "--out", str(out))
    assert code == 0
    assert (out / "stabilizer.txt").read_text().startswith("PAULI 7 6")
    names = sorted(p.name for p in out.iterdir())
    assert names == sorted(
        ["lattice.json", "stabilizer.txt", "gauge.txt", "logicals.txt", "tset.json", "gate_plan.json"]
    )
    assert len(data["written"]) == 6
    assert lat.from_json((out / "lattice.json").read_text()).top_simplices == lattice("2d", 1).top_simplices


def test_text_format(capsys):
    code, out = run(capsys, "build", "--family", "2d", "--n", "1", "--format", "text")
    assert code == 0
    assert "qubits" in out and not out.lstrip().startswith("{")


def test_unknown_command_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["teleport"])
    assert exc.value.code == 2
