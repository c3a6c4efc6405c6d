import pandas as pd
import pytest

from app import cli
from app.schemas.experiment import CheckResult, ExperimentId, Report


def test_gen_degrees_writes_text(tmp_path):
    out = tmp_path / "degrees.txt"
    assert cli.main(["gen-degrees", "--n", "4", "--tau", "2.5", "--out", str(out)]) == cli.EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0].startswith("# n=4")
    assert lines[1:] == ["3", "2", "2", "1"]


def test_config_file_and_flag_precedence(tmp_path):
    config = tmp_path / "run.conf"
    config.write_text("# defaults for this run\ntau=2.5\nn=8\nlambda=0.5\n")
    args = cli.parse_args(["gen-degrees", "--config", str(config), "--n", "4"])
    assert args.n == 4
    assert args.tau == 2.5
    assert args.lam == 0.5


def test_config_booleans(tmp_path):
    config = tmp_path / "run.conf"
    config.write_text("compensate=true\nhorizon=7\n")
    args = cli.parse_args(["limit-sim", "--config", str(config)])
    assert args.compensate is True
    assert args.horizon == 7.0


def test_missing_config_file(tmp_path):
    assert cli.main(["gen-degrees", "--config", str(tmp_path / "absent.conf")]) == cli.EXIT_ERROR


def test_invalid_tau_is_an_error():
    assert cli.main(["gen-degrees", "--tau", "3.5", "--n", "10"]) == cli.EXIT_ERROR


def test_percolate_writes_edge_list(tmp_path):
    out = tmp_path / "graph.txt"
    code = cli.main(["percolate", "--n", "500", "--p", "0.5", "--method", "fountoulakis", "--out", str(out)])
    assert code == cli.EXIT_OK
    lines = out.read_text().splitlines()
    n, m = map(int, lines[0].split())
    assert n == 500
    assert len(lines) == m + 1


def test_explore_writes_trace_and_components(tmp_path):
    trace = tmp_path / "trace.csv"
    components = tmp_path / "components.csv"
    code = cli.main(
        ["explore", "--n", "500", "--out", str(trace), "--components", str(components), "--diameters"]
    )
    assert code == cli.EXIT_OK
    frame = pd.read_csv(trace)
    assert list(frame.columns) == ["step", "S", "J", "vertex", "surplus_flag"]
    assert frame["S"].iloc[0] == 0
    table = pd.read_csv(components)
    assert {"size", "edges", "surplus", "diameter", "exact_flag", "hub_list"} <= set(table.columns)


def test_limit_sim_writes_path_and_excursions(tmp_path):
    path = tmp_path / "path.csv"
    table = tmp_path / "excursions.csv"
    code = cli.main(["limit-sim", "--horizon", "5", "--out", str(path), "--excursions", str(table)])
    assert code == cli.EXIT_OK
    assert list(pd.read_csv(path).columns) == ["jump_time", "jump_size"]
    assert "marks" in pd.read_csv(table).columns


def test_experiment_passes(tmp_path, capsys):
    out = tmp_path / "oracle.jsonl"
    code = cli.main(
        [
            "experiment", "--experiment", "oracle_suite", "--ladder", "100", "--reps", "4",
            "--law-draws", "3000", "--out", str(out),
        ]
    )
    assert code == cli.EXIT_OK
    assert len(out.read_text().splitlines()) == 4
    assert "PASS" in capsys.readouterr().out


def test_experiment_failure_exit_code(monkeypatch):
    failed = Report(
        experiment=ExperimentId.HUB_POISSON,
        master_seed=1,
        checks=[CheckResult(name="hub_edges_poisson_mean", passed=False)],
    )
    monkeypatch.setattr(cli.harness, "run_experiment", lambda config: failed)
    assert cli.main(["experiment", "--experiment", "hub_poisson", "--n", "100"]) == cli.EXIT_FAILED


def test_experiment_requires_a_name():
    assert cli.main(["experiment", "--n", "100"]) == cli.EXIT_ERROR
