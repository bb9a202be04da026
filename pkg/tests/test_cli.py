import csv
import io
import json

import pytest

from naqm.cli import dumps, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_env_dim_jordan(capsys):
    code, out, _ = run(capsys, "env", "dim", "--builtin", "jordan:2")
    assert code == 0
    assert json.loads(out) == {"closed": True, "dim": 16, "generator_count": 8,
                               "label": "jordan_M2"}


def test_demo_octonion(capsys):
    code, out, _ = run(capsys, "demo", "octonion")
    d = json.loads(out)
    assert code == 0
    assert d["commutator_trace"] == [0.0, 2.0]
    assert d["min_uncertainty"] is True and d["tracial_state_pure"] is True
    assert d["associator_e1_e2_e4"] == "2*e7"
    assert d["multiplication_table"][1][2] == "e3"


def test_demo_jordan(capsys):
    code, out, _ = run(capsys, "demo", "jordan", "2")
    d = json.loads(out)
    assert code == 0 and d["enveloping_dim"] == 16 and d["bonafide_hamiltonian_is_z"]


def test_algebra_check_success_and_failure(capsys, tmp_path):
    code, out, _ = run(capsys, "algebra", "check", "--builtin", "octonion")
    assert code == 0 and json.loads(out)["algebra"]["passed"]
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"dim": 2, "structure_constants": [[0, 0, 0, 1, 0]],
                               "star": {"diagonal": [1, 1]}}))
    code, out, _ = run(capsys, "algebra", "check", "--algebra", str(bad))
    assert code == 2 and not json.loads(out)["algebra"]["passed"]


def test_corrupted_file_exits_2(capsys, tmp_path):
    bad = tmp_path / "broken.json"
    bad.write_text('{"dim": 2,')
    code, _, err = run(capsys, "algebra", "check", "--algebra", str(bad))
    assert code == 2 and "broken.json:1" in err


def test_gns(capsys):
    code, out, _ = run(capsys, "gns", "--builtin", "octonion")
    d = json.loads(out)
    assert (d["quotient_dim"], d["commutant_dim"], d["pure"]) == (8, 1, True)


def test_eigen_and_uncertainty(capsys):
    code, out, _ = run(capsys, "eigen", "--builtin", "pauli", "--op", "Lz")
    pairs = json.loads(out)
    assert [p["lambda"][0] for p in pairs] == [1.0, 0.0, 0.0, -1.0]
    code, out, _ = run(capsys, "uncertainty", "--builtin", "octonion",
                       "--op1", "1j*L7", "--op2", "L1 o L2 o L4")
    assert code == 0 and json.loads(out)["slack"] == 0.0


def test_non_observable_is_a_validation_error(capsys):
    code, _, err = run(capsys, "uncertainty", "--builtin", "octonion", "--op1", "L7")
    assert code == 2 and "star-fixed" in err


def test_evolve_csv(capsys, tmp_path):
    path = tmp_path / "traj.csv"
    code, _, _ = run(capsys, "evolve", "--builtin", "pauli", "--hamiltonian", "Lz",
                     "--psi0", "1,0,0,0", "--t1", "1", "--steps", "4",
                     "--observable", "z=Lz", "--out", str(path))
    rows = list(csv.DictReader(io.StringIO(path.read_text())))
    assert code == 0 and len(rows) == 5
    assert float(rows[-1]["re_1"]) == pytest.approx(0.540302305868)


def test_scenario_file(capsys, tmp_path):
    sc = tmp_path / "scn.json"
    sc.write_text(json.dumps({"algebra": "builtin:pauli", "hamiltonian": "Lz",
                              "psi0": [1, 0, 0, 0], "times": {"t0": 0, "t1": 1, "steps": 2}}))
    code, out, _ = run(capsys, "evolve", "--scenario", str(sc))
    assert code == 0 and out.startswith("t,")


def test_unknown_builtin(capsys):
    code, _, err = run(capsys, "gns", "--builtin", "sedenion")
    assert code == 2 and "unknown builtin" in err


def test_tol_flag_sets_environment(capsys, monkeypatch):
    import os
    run(capsys, "env", "dim", "--builtin", "pauli", "--tol", "1e-7")
    assert os.environ["NAQM_TOL"] == "1e-07"


def test_canonical_json():
    assert dumps({"b": 1 / 3, "a": 1 + 2j, "c": -0.0}) == (
        '{\n  "a": [\n    1.0,\n    2.0\n  ],\n  "b": 0.333333333333,\n  "c": 0.0\n}\n')
