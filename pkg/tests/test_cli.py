"""End-to-end command-line checks run through subprocesses."""

import importlib.resources as resources
import json
import os
import pathlib
import subprocess
import sys

import jsonschema
import pytest

FIXTURES = pathlib.Path(__file__).resolve().parent / "fixtures"
DATA_FLAGS = ["--unit", "unit", "--time", "time", "--y", "y", "--x", "x1,x2"]


def run_cli(*args, env_extra=None, text=True):
    env = dict(os.environ)
    env.pop("PANELSPEC_THREADS", None)
    if env_extra:
        env.update(env_extra)
    return subprocess.run(
        [sys.executable, "-m", "panelspec", *args],
        capture_output=True, text=text, env=env,
    )


def _schema(name):
    path = resources.files("panelspec") / "schemas" / name
    return json.loads(path.read_text())


def _fit(method, data, *extra):
    proc = run_cli("fit", "--data", str(data), *DATA_FLAGS,
                   "--method", method, *extra)
    assert proc.returncode == 0, proc.stderr
    doc = json.loads(proc.stdout)
    jsonschema.validate(instance=doc, schema=_schema("fit_result.schema.json"))
    return doc


def test_fit_fe_matches_recorded_oracle():
    expected = json.loads((FIXTURES / "fe_oracle_expected.json").read_text())
    doc = _fit("fe", FIXTURES / "fe_oracle.csv")
    assert doc["method"] == "fixed_effects"
    assert doc["regressors"] == ["x1", "x2"]
    for got, want in zip(doc["beta"], expected["beta"]):
        assert got == pytest.approx(want, abs=1e-10)
    for got, want in zip(doc["std_errors"], expected["std_errors"]):
        assert got == pytest.approx(want, abs=1e-10)
    assert doc["rss"] == pytest.approx(expected["rss"], rel=1e-10)
    assert doc["n_units"] == 50
    assert doc["n_periods"] == 4
    assert doc["weights"] is None


def test_fit_weighted_on_clean_fixture():
    doc = _fit("wfe", FIXTURES / "fe_oracle.csv", "--kappa", "0.5")
    assert doc["method"] == "weighted_fixed_effects"
    assert doc["converged"] is True
    assert doc["min_weight"] > 0.5
    assert all(w > 0.5 for row in doc["weights"] for w in row)
    assert len(doc["weights"]) == 50
    assert len(doc["weights"][0]) == 4


def test_fit_csv_projection():
    proc = run_cli("fit", "--data", str(FIXTURES / "fe_oracle.csv"),
                   *DATA_FLAGS, "--method", "fe", "--format", "csv")
    assert proc.returncode == 0, proc.stderr
    lines = proc.stdout.strip().split("\n")
    assert lines[0] == "regressor,estimate,std_error"
    assert len(lines) == 3
    doc = _fit("fe", FIXTURES / "fe_oracle.csv")
    for line, name, beta in zip(lines[1:], ["x1", "x2"], doc["beta"]):
        got_name, est, _se = line.split(",")
        assert got_name == name
        assert float(est) == beta


def test_fit_usage_and_data_errors():
    missing_flag = run_cli("fit", "--data", str(FIXTURES / "fe_oracle.csv"),
                           "--unit", "unit", "--time", "time", "--y", "y",
                           "--method", "fe")
    assert missing_flag.returncode == 2
    bad_file = run_cli("fit", "--data", "no-such-file.csv", *DATA_FLAGS,
                       "--method", "fe")
    assert bad_file.returncode == 1
    assert bad_file.stderr.startswith("panelspec: error:")
    bad_flag = run_cli("fit", "--data", str(FIXTURES / "fe_oracle.csv"),
                       *DATA_FLAGS, "--method", "ridge")
    assert bad_flag.returncode == 2


def _test_report(*extra, data=None):
    data = data or FIXTURES / "contaminated_alt.csv"
    proc = run_cli("test", "--data", str(data), *DATA_FLAGS, *extra)
    assert proc.returncode == 0, proc.stderr
    doc = json.loads(proc.stdout)
    jsonschema.validate(instance=doc,
                        schema=_schema("test_report.schema.json"))
    return doc


def test_both_tests_on_contaminated_fixture():
    doc = _test_report("--which", "both")
    assert [t["kind"] for t in doc["tests"]] == ["hausman", "weighted_hausman"]
    hausman, weighted = doc["tests"]
    assert weighted["statistic"] > hausman["statistic"]
    assert weighted["p_value"] < hausman["p_value"]
    assert hausman["df"] == 2 and weighted["df"] == 2
    assert not hausman["repaired"] and not weighted["repaired"]
    stats = doc["fit_statistics"]
    assert set(stats) == {"rss_fe", "rss_re", "r_squared_fe", "r_squared_re"}
    assert stats["rss_fe"] > 0 and stats["rss_re"] > 0
    assert 0.0 <= doc["theta"] <= 1.0


def test_which_selects_single_record():
    doc = _test_report("--which", "hausman")
    assert [t["kind"] for t in doc["tests"]] == ["hausman"]
    doc = _test_report("--which", "weighted")
    assert [t["kind"] for t in doc["tests"]] == ["weighted_hausman"]


def test_forced_theta_degenerates_both_tests():
    doc = _test_report("--force-theta", "1.0", "--raf", "identity",
                       data=FIXTURES / "fe_oracle.csv")
    assert doc["theta"] == 1.0
    for record in doc["tests"]:
        assert abs(record["statistic"]) < 1e-10
        assert record["p_value"] > 1.0 - 1e-12


def test_test_csv_projection():
    proc = run_cli("test", "--data", str(FIXTURES / "contaminated_alt.csv"),
                   *DATA_FLAGS, "--format", "csv")
    assert proc.returncode == 0, proc.stderr
    lines = proc.stdout.strip().split("\n")
    assert lines[0] == ("test,statistic,df,p_value,repaired,"
                        "rss_fe,rss_re,r_squared_fe,r_squared_re")
    assert len(lines) == 3
    for line in lines[1:]:
        assert len(line.split(",")) == 9


_SIM_ARGS = ["simulate", "--n", "25", "--t", "4", "--s", "3",
             "--gammas", "0.05,0.10", "--seed", "5"]


def test_simulate_json_schema_and_determinism():
    first = run_cli(*_SIM_ARGS, text=False)
    second = run_cli(*_SIM_ARGS, text=False)
    assert first.returncode == 0, first.stderr
    assert first.stdout == second.stdout
    doc = json.loads(first.stdout)
    jsonschema.validate(instance=doc,
                        schema=_schema("simulate_report.schema.json"))
    assert len(doc["runs"]) == 1
    run = doc["runs"][0]
    assert run["hypothesis"] == "null"
    assert run["scheme"] == "none"
    assert run["s_replications"] == 3
    assert run["failures"] == 0
    assert sorted(run["tests"]) == ["hausman", "weighted_hausman"]


def test_simulate_insensitive_to_thread_count():
    serial = run_cli(*_SIM_ARGS, text=False)
    threaded = run_cli(*_SIM_ARGS, text=False,
                       env_extra={"PANELSPEC_THREADS": "3"})
    assert serial.stdout == threaded.stdout


def test_simulate_preset_grid_csv_shape():
    proc = run_cli("simulate", "--paper-figure", "1", "--s", "2",
                   "--seed", "3", "--format", "csv")
    assert proc.returncode == 0, proc.stderr
    lines = proc.stdout.strip().split("\n")
    header = lines[0].split(",")
    assert header == ["test", "hypothesis", "n_units", "n_periods", "scheme",
                      "m", "gamma", "rejection_rate", "s", "failures"]
    # 6 panel sizes x 4 levels x 2 tests
    assert len(lines) == 1 + 48
    n_values = set()
    for line in lines[1:]:
        row = line.split(",")
        assert row[1] == "null"
        assert row[3] == "4"
        assert row[4] == "none"
        assert row[5] == "0"
        n_values.add(int(row[2]))
    assert n_values == {25, 50, 75, 100, 150, 200}


def test_simulate_writes_output_file(tmp_path):
    out = tmp_path / "study.json"
    proc = run_cli(*_SIM_ARGS, "--out", str(out))
    assert proc.returncode == 0, proc.stderr
    assert proc.stdout == ""
    doc = json.loads(out.read_text())
    assert "runs" in doc


def test_simulate_capacity_error():
    proc = run_cli("simulate", "--n", "100", "--t", "3", "--s", "2",
                   "--contamination", "random", "--m", "301")
    assert proc.returncode == 1
    assert "panelspec: error:" in proc.stderr
    assert "301" in proc.stderr
