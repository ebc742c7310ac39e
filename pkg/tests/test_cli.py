import json

import pytest
from click.testing import CliRunner

from qcslab.cli import main


@pytest.fixture
def runner():
    return CliRunner()


def write_spec(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


@pytest.fixture
def fock1(tmp_path):
    return write_spec(tmp_path, "fock1.json",
                      {"schema": 1, "kind": "fock", "params": {"n": 1}})


@pytest.fixture
def thermal05(tmp_path):
    return write_spec(tmp_path, "th.json",
                      {"schema": 1, "kind": "thermal", "params": {"q": 0.5}})


def test_qcs_single_route(runner, fock1):
    result = runner.invoke(main, ["qcs", "--state", fock1, "--route", "direct"])
    assert result.exit_code == 0
    doc = json.loads(result.output)
    assert abs(doc["results"]["direct"]["c_squared"] - 3.0) < 1e-9
    assert doc["metadata"]["tool"] == "qcslab"
    assert "timestamp" in doc["metadata"]


def test_qcs_all_routes_marks_inapplicable(runner, fock1):
    result = runner.invoke(main, ["qcs", "--state", fock1, "--route", "all"])
    assert result.exit_code == 0
    doc = json.loads(result.output)
    assert doc["results"]["gaussian"] == "not applicable"
    assert doc["results"]["classical-mixture"] == "not applicable"
    assert abs(doc["results"]["two-copy"]["c_squared"] - 3.0) < 1e-9


def test_missing_state_file(runner):
    result = runner.invoke(main, ["qcs", "--state", "/nonexistent.json"])
    assert result.exit_code == 2


def test_invalid_state_document(runner, tmp_path):
    path = write_spec(tmp_path, "bad.json", {"schema": 1, "kind": "wibble"})
    result = runner.invoke(main, ["qcs", "--state", path])
    assert result.exit_code == 2


def test_cutoff_ambiguity_rejected(runner, tmp_path):
    path = write_spec(tmp_path, "f.json",
                      {"schema": 1, "kind": "fock", "params": {"n": 1}, "cutoff": 16})
    result = runner.invoke(main, ["qcs", "--state", path, "--cutoff", "20"])
    assert result.exit_code == 2
    assert "ambiguous" in result.output


def test_config_flag_conflict_rejected(runner, tmp_path, fock1):
    config = tmp_path / "cfg.json"
    config.write_text(json.dumps({"route": "direct"}))
    result = runner.invoke(main, ["qcs", "--state", fock1, "--route", "two-copy",
                                  "--config", str(config)])
    assert result.exit_code == 2
    assert "ambiguous" in result.output


def test_config_file_supplies_values(runner, tmp_path, fock1):
    config = tmp_path / "cfg.json"
    config.write_text(json.dumps({"state": fock1, "route": "direct"}))
    result = runner.invoke(main, ["qcs", "--config", str(config)])
    assert result.exit_code == 0
    doc = json.loads(result.output)
    assert abs(doc["results"]["direct"]["c_squared"] - 3.0) < 1e-9


def test_infeasible_cutoff_exits_4(runner, tmp_path):
    path = write_spec(tmp_path, "th_small.json",
                      {"schema": 1, "kind": "thermal", "params": {"q": 0.5},
                       "cutoff": 8})
    result = runner.invoke(main, ["purity", "--state", path])
    assert result.exit_code == 4


def test_purity_routes_agree(runner, thermal05):
    result = runner.invoke(main, ["purity", "--state", thermal05])
    assert result.exit_code == 0
    doc = json.loads(result.output)
    assert abs(doc["purity_direct"] - 1.0 / 3.0) < 1e-9
    assert abs(doc["purity_two_copy"] - 1.0 / 3.0) < 1e-9


def test_pn_dist_csv(runner, thermal05, tmp_path):
    out = tmp_path / "pn.csv"
    result = runner.invoke(main, ["pn-dist", "--state", thermal05,
                                  "--out", str(out)])
    assert result.exit_code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "n,p_n,cumulative"
    assert lines[1] == "0,0.5,0.5"


def test_pn_dist_json(runner, thermal05):
    result = runner.invoke(main, ["pn-dist", "--state", thermal05,
                                  "--format", "json"])
    assert result.exit_code == 0
    doc = json.loads(result.output)
    assert abs(doc["p_n"][1] - 0.25) < 1e-12


def test_overlap(runner, tmp_path, thermal05):
    other = write_spec(tmp_path, "coh.json",
                       {"schema": 1, "kind": "coherent", "params": {"alpha": 0.3}})
    result = runner.invoke(main, ["overlap", "--state", thermal05,
                                  "--state", other])
    assert result.exit_code == 0
    doc = json.loads(result.output)
    assert abs(doc["overlap_trace"] - doc["overlap_parity"]) < 1e-8
    assert abs(doc["overlap_trace"] - doc["overlap_wigner"]) < 1e-6
    single = runner.invoke(main, ["overlap", "--state", thermal05])
    assert single.exit_code == 2


def test_compare_fock1_payload(runner, fock1, tmp_path):
    out = tmp_path / "cmp.json"
    result = runner.invoke(main, ["compare", "--state", fock1, "--out", str(out)])
    assert result.exit_code == 0
    doc = json.loads(out.read_text())
    assert doc["max_deviation_exact"] < 1e-6
    assert doc["max_deviation_wigner"] < 1e-3
    assert abs(doc["results"]["direct"]["c_squared"] - 3.0) < 1e-9


def test_sample_deterministic_apart_from_timestamp(runner, thermal05, tmp_path):
    args = ["sample", "--state", thermal05, "--shots", "1000", "--seed", "5",
            "--resamples", "50"]
    a = json.loads(runner.invoke(main, args).output)
    b = json.loads(runner.invoke(main, args).output)
    a["metadata"].pop("timestamp")
    b["metadata"].pop("timestamp")
    assert a == b


def test_sample_rejects_zero_shots(runner, thermal05):
    result = runner.invoke(main, ["sample", "--state", thermal05, "--shots", "0"])
    assert result.exit_code == 2


def test_figure2(runner, tmp_path):
    out = tmp_path / "fig2"
    result = runner.invoke(main, ["figure2", "--out", str(out)])
    assert result.exit_code == 0
    summary = json.loads((out / "summary.json").read_text())
    assert abs(summary["states"]["rho_10"]["purity"] - 0.1) < 1e-6
    assert abs(summary["states"]["rho_even_5"]["c_squared"] - 13.0) < 1e-6
    assert abs(summary["states"]["thermal_q0.85"]["purity"] - 3.0 / 37.0) < 1e-12
    csv = (out / "pn_thermal_q0.85.csv").read_text().splitlines()
    assert csv[0] == "n,p_n,cumulative"
    assert len(csv) == 26  # header + n = 0..24
