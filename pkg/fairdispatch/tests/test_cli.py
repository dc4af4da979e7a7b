"""End-to-end runs of the command-line front end."""

import json

import pandas as pd
import pytest

from fairdispatch.cli import main
from fairdispatch.instance import gen_hardness, load_instance, save_instance, validate


@pytest.fixture
def hardness_file(tmp_path):
    path = tmp_path / "hardness.json"
    save_instance(gen_hardness(5, 0.1), path)
    return path


def _run(tmp_path, *argv):
    return main([*argv, "--out-dir", str(tmp_path / "out"), "--log-level", "WARNING"])


def test_generate_synthetic(tmp_path):
    argv = ["generate", "--num-drivers", "6", "--num-riders", "8", "--B", "3", "--seed", "5"]
    assert _run(tmp_path, *argv) == 0
    path = tmp_path / "out" / "instance.json"
    instance = load_instance(path)
    assert validate(instance) == []
    assert len(instance.drivers) == 6 and len(instance.riders) == 8
    assert all(1 <= d.capacity <= 3 for d in instance.drivers)
    first = path.read_text(encoding="utf-8")
    assert _run(tmp_path, *argv) == 0
    assert path.read_text(encoding="utf-8") == first


def test_generate_hardness(tmp_path):
    target = tmp_path / "h.json"
    assert _run(tmp_path, "generate", "--hardness", "--n", "3", "--eps", "0.2", "-o", str(target)) == 0
    instance = load_instance(target)
    assert len(instance.drivers) == 6
    assert instance.horizon == 3


def test_generate_rejects_bad_eta(tmp_path, capsys):
    assert _run(tmp_path, "generate", "--eta", "1.5") == 2
    assert "invalid value for --eta" in capsys.readouterr().err


def test_config_file_sets_generator_params(tmp_path):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"B": 2, "num_drivers": 5, "num_riders": 6}), encoding="utf-8")
    assert _run(tmp_path, "generate", "--config", str(config), "--num-riders", "7") == 0
    instance = load_instance(tmp_path / "out" / "instance.json")
    assert len(instance.drivers) == 5
    assert len(instance.riders) == 7
    assert all(d.capacity <= 2 for d in instance.drivers)


def test_config_file_unknown_key(tmp_path, capsys):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"bogus": 1}), encoding="utf-8")
    assert _run(tmp_path, "generate", "--config", str(config)) == 2
    assert "bogus" in capsys.readouterr().err


def test_solve_prints_optima(tmp_path, hardness_file, capsys):
    assert _run(tmp_path, "solve", "--instance", str(hardness_file)) == 0
    out = capsys.readouterr().out
    assert "OPT-P = 5.000000" in out
    assert "OPT-F = 0.090909" in out
    payload = json.loads((tmp_path / "out" / "profit_solution.json").read_text(encoding="utf-8"))
    assert payload["status"] == "optimal"
    assert payload["objective"] == pytest.approx(5.0)


def test_solve_cross_check(tmp_path):
    path = tmp_path / "h2.json"
    save_instance(gen_hardness(2, 0.5), path)
    assert _run(tmp_path, "solve", "--instance", str(path), "--cross-check", "--dump-lp") == 0
    out = tmp_path / "out"
    assert (out / "profit.lp").exists() and (out / "fairness.lp").exists()
    for name in ("profit", "fairness"):
        report = json.loads((out / f"{name}_cross_check.json").read_text(encoding="utf-8"))
        assert report["reparsed_ok"] is True
        assert report["reduced_ok"] is True


def test_solve_missing_instance(tmp_path, capsys):
    assert _run(tmp_path, "solve", "--instance", str(tmp_path / "nope.json")) == 2
    assert "--instance" in capsys.readouterr().err


def test_ingest(tmp_path, trips_path):
    assert _run(tmp_path, "ingest", str(trips_path), "--seed", "3") == 0
    report = json.loads((tmp_path / "out" / "ingest_report.json").read_text(encoding="utf-8"))
    assert report["kept_rows"] == 170
    assert validate(load_instance(tmp_path / "out" / "instance.json")) == []


def test_simulate_and_report(tmp_path, hardness_file, capsys):
    assert _run(tmp_path, "simulate", "--instance", str(hardness_file), "--policy", "greedy_p", "--trials", "200") == 0
    metrics = tmp_path / "out" / "metrics_greedy_p.csv"
    frame = pd.read_csv(metrics)
    assert list(frame["policy"]) == ["greedy_p"]
    assert frame.loc[0, "n_trials"] == 200
    capsys.readouterr()

    assert _run(tmp_path, "report", str(metrics)) == 0
    assert "greedy_p" in capsys.readouterr().out
    assert (tmp_path / "out" / "plot_data.csv").exists()
    assert (tmp_path / "out" / "plot_ratios.py").exists()


def test_calibrate_then_simulate_attenalg(tmp_path, hardness_file):
    table = tmp_path / "attenuation.csv"
    assert _run(tmp_path, "calibrate", "--instance", str(hardness_file), "--samples", "50", "-o", str(table)) == 0
    assert set(pd.read_csv(table)["kind"]) == {"vertex", "edge_x", "edge_y"}
    argv = ["simulate", "--instance", str(hardness_file), "--policy", "attenalg", "--table", str(table)]
    assert _run(tmp_path, *argv, "--trials", "100", "--trial-log", "3") == 0
    lines = (tmp_path / "out" / "trials.jsonl").read_text(encoding="utf-8").splitlines()
    assert len(lines) == 3


def test_sweep(tmp_path):
    argv = [
        "sweep",
        "--num-drivers", "6",
        "--num-riders", "8",
        "--B-grid", "2",
        "--alpha-grid", "0,1",
        "--policies", "warmup,greedy_p",
        "--trials", "100",
    ]
    assert _run(tmp_path, *argv) == 0
    out = tmp_path / "out"
    frame = pd.read_csv(out / "sweep.csv")
    assert len(frame) == 3
    assert set(frame["B"]) == {2}
    for name in ("plot_data.csv", "bounds.csv", "plot_ratios.py", "trends.json"):
        assert (out / name).exists()
    assert "2" in json.loads((out / "trends.json").read_text(encoding="utf-8"))


def test_sweep_rejects_unknown_policy(tmp_path):
    assert _run(tmp_path, "sweep", "--policies", "warmup,oracle", "--B-grid", "2", "--trials", "10") == 2


def test_verify_hardness(tmp_path, capsys):
    argv = ["verify-hardness", "--n", "5", "--eps", "0.1", "--policies", "warmup,greedy_p", "--trials", "400"]
    assert _run(tmp_path, *argv) == 0
    report = json.loads((tmp_path / "out" / "hardness_report.json").read_text(encoding="utf-8"))
    assert report["opt_p_ok"] and report["opt_f_ok"] and report["passed"]
    assert [p["policy"] for p in report["policies"]] == ["warmup(alpha=0.5,beta=0.5)", "greedy_p"]
    assert "OPT-P = 5.000000" in capsys.readouterr().out


@pytest.mark.slow
def test_sweep_trends_on_synthetic_instances(tmp_path):
    argv = [
        "sweep",
        "--num-drivers", "10",
        "--num-riders", "20",
        "--B-grid", "10,25",
        "--alpha-grid", "0,0.5,1",
        "--policies", "warmup,greedy_p,greedy_f",
        "--trials", "4000",
        "--jobs", "2",
        "--seed", "2021",
    ]
    assert _run(tmp_path, *argv) == 0
    trends = json.loads((tmp_path / "out" / "trends.json").read_text(encoding="utf-8"))
    assert set(trends) == {"10", "25"}
    for entry in trends.values():
        assert entry["profit_vs_alpha"] > 0.9
        assert entry["fairness_vs_beta"] > 0.9
        assert entry["warmup_trend_ok"]
        assert entry["greedy_p_profit"] >= entry["greedy_f_profit"]
