import io
import json

import numpy as np
import pytest

from nhsim.cli import main

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SZ = np.diag([1.0, -1.0]).astype(complex)


def mat_doc(M):
    M = np.asarray(M, dtype=complex)
    return {
        "dim": M.shape[0],
        "entries": [[[c.real, c.imag] for c in row] for row in M],
    }


@pytest.fixture()
def dimer_at_1(tmp_path):
    p = tmp_path / "dimer_at_1.json"
    p.write_text(json.dumps(mat_doc([[1j, 1], [1, -1j]])))
    return str(p)


@pytest.fixture()
def dimer_family(tmp_path):
    doc = {
        "dim": 2,
        "params": 1,
        "param_names": ["gamma"],
        "terms": [
            {"matrix": mat_doc(SX), "exponents": [0]},
            {"matrix": mat_doc(1j * SZ), "exponents": [1]},
        ],
    }
    p = tmp_path / "dimer.json"
    p.write_text(json.dumps(doc))
    return str(p)


@pytest.fixture()
def trimer_family(tmp_path):
    E = np.eye(3)
    K = (np.outer(E[0], E[1]) + np.outer(E[1], E[0])
         + np.outer(E[1], E[2]) + np.outer(E[2], E[1]))
    D = 1j * (np.outer(E[0], E[0]) - np.outer(E[2], E[2]))
    doc = {
        "dim": 3,
        "params": 2,
        "param_names": ["gamma", "k"],
        "terms": [
            {"matrix": mat_doc(K), "exponents": [0, 1]},
            {"matrix": mat_doc(D), "exponents": [1, 0]},
        ],
    }
    p = tmp_path / "trimer.json"
    p.write_text(json.dumps(doc))
    return str(p)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_classify_dimer_at_1(capsys, dimer_at_1):
    code, out, _ = run(capsys, "classify", dimer_at_1)
    assert code == 0
    doc = json.loads(out)
    assert "Chiral" in doc["classes"]
    assert doc["witnesses"]["Chiral"]["residual"] <= 1e-10


def test_witness_command(capsys, dimer_at_1):
    code, out, _ = run(capsys, "witness", dimer_at_1, "--class", "chiral")
    assert code == 0
    doc = json.loads(out)
    assert doc["class"] == "Chiral"
    assert doc["residual"] <= 1e-10
    assert doc["transform"]["dim"] == 2


def test_generate_classify_pipeline(capsys, monkeypatch):
    code, out, _ = run(
        capsys, "generate", "--class", "pseudo-hermitian", "--dim", "3",
        "--seed", "7",
    )
    assert code == 0
    monkeypatch.setattr("sys.stdin", io.TextIOWrapper(io.BytesIO(out.encode())))
    code, out2, _ = run(capsys, "classify", "-")
    assert code == 0
    assert "PseudoHermitian" in json.loads(out2)["classes"]


def test_generate_deterministic_byte_identical(capsys):
    _, a, _ = run(capsys, "generate", "--class", "chiral", "--dim", "4",
                  "--seed", "3")
    _, b, _ = run(capsys, "generate", "--class", "chiral", "--dim", "4",
                  "--seed", "3")
    assert a == b


def test_generate_output_round_trips(capsys):
    _, out, _ = run(capsys, "generate", "--class", "self-skew", "--dim", "3",
                    "--seed", "1")
    doc = json.loads(out)
    # floats survive the round trip exactly (shortest-repr serialization)
    assert json.loads(json.dumps(doc, sort_keys=True)) == doc


def test_specht_command(capsys, dimer_at_1):
    code, out, _ = run(capsys, "specht", dimer_at_1, dimer_at_1)
    assert code == 0
    doc = json.loads(out)
    assert doc["unitarily_similar"] is True
    assert len(doc["traces"]) == 3
    assert doc["traces"][0]["word"] == "X"


def test_specht_csv_output(capsys, dimer_at_1):
    code, out, _ = run(capsys, "specht", dimer_at_1, dimer_at_1,
                       "--output", "csv")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].startswith("word,")
    assert len(lines) == 4


def test_specht_generators_2x2(capsys, tmp_path):
    p = tmp_path / "m.json"
    p.write_text(json.dumps(mat_doc([[0, 1], [4, 0]])))
    code, out, _ = run(capsys, "specht-generators", str(p),
                       "--class", "pseudo-hermitian")
    assert code == 0
    doc = json.loads(out)
    assert doc["mode"] == "generators"
    results = doc["results"]["PseudoHermitian"]
    assert results["PT"]["property_defect"] <= 1e-8


def test_specht_generators_3x3_evidence(capsys, monkeypatch):
    _, gen, _ = run(capsys, "generate", "--class", "chiral", "--dim", "3",
                    "--seed", "5", "--non-normal")
    monkeypatch.setattr("sys.stdin", io.TextIOWrapper(io.BytesIO(gen.encode())))
    code, out, _ = run(capsys, "specht-generators", "-")
    assert code == 0
    doc = json.loads(out)
    assert doc["mode"] == "counterexample-evidence"
    evidence = doc["results"]["Chiral"]
    assert any(e["mismatch"] > 1e-6 for e in evidence)


def test_scan_trimer_jsonl(capsys, trimer_family):
    code, out, _ = run(
        capsys, "scan", trimer_family, "--class", "pseudo-hermitian",
        "--grid", "gamma=0:3:101", "--fix", "k=1",
    )
    assert code == 0
    rows = [json.loads(line) for line in out.strip().splitlines()]
    hits = [r for r in rows if r["converged"]]
    assert len(hits) == 1
    assert abs(hits[0]["lam"][0] - 1.41421356) <= 1e-6
    assert hits[0]["order"] == 3


def test_scan_csv(capsys, dimer_family):
    code, out, _ = run(
        capsys, "scan", dimer_family, "--class", "pseudo-hermitian",
        "--grid", "gamma=-2:2:101", "--output", "csv",
    )
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].split(",")[0] == "gamma"
    assert len(lines) == 3  # header + two roots


def test_certify_command(capsys, dimer_family):
    code, out, _ = run(capsys, "certify", dimer_family, "--at", "1")
    assert code == 0
    doc = json.loads(out)
    assert doc["order"] == 2 and doc["single_block"]
    assert 0.45 <= doc["splitting_exponent"] <= 0.55


def test_exit_code_2_on_input_errors(capsys, dimer_family):
    code, _, err = run(capsys, "classify", "/no/such/file.json")
    assert code == 2 and "cannot read" in err
    code, _, err = run(capsys, "scan", dimer_family, "--class", "chiral",
                       "--grid", "oops")
    assert code == 2 and "bad grid" in err
    code, _, err = run(capsys, "certify", dimer_family, "--at", "1,2")
    assert code == 2


def test_exit_code_2_on_malformed_matrix(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{\"dim\": 2}")
    code, _, err = run(capsys, "classify", str(p))
    assert code == 2 and "entries" in err


def test_exit_code_1_on_class_mismatch(capsys, tmp_path):
    p = tmp_path / "m.json"
    p.write_text(json.dumps(mat_doc(np.diag([1j, 2j]))))
    code, _, err = run(capsys, "witness", str(p), "--class", "pseudo-hermitian")
    assert code == 1 and "symmetry constraint" in err


def test_usage_error_exit_2(capsys):
    assert main(["frobnicate"]) == 2
    assert main([]) == 2


def test_tol_env_and_flag_precedence(capsys, dimer_at_1, monkeypatch):
    monkeypatch.setenv("NHSIM_TOL", "not-a-number")
    code, _, err = run(capsys, "classify", dimer_at_1)
    assert code == 2 and "NHSIM_TOL" in err
    # flag wins over the broken environment value
    code, out, _ = run(capsys, "classify", dimer_at_1, "--tol", "1e-8")
    assert code == 0
    monkeypatch.setenv("NHSIM_TOL", "1e-6")
    code, out, _ = run(capsys, "classify", dimer_at_1)
    assert code == 0


def test_output_stable_across_runs(capsys, dimer_at_1):
    _, a, _ = run(capsys, "classify", dimer_at_1)
    _, b, _ = run(capsys, "classify", dimer_at_1)
    assert a == b
