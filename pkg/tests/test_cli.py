import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from monodromy import cli
from monodromy.cli import InputError, RunConfig, cmd_experiment, cmd_stats, main, run_solve
from monodromy.families import nash_family
from monodromy.polysys import evaluate


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_config_round_trip():
    cfg = RunConfig(family="katsura:6", graph="complete:3,2", strategy="potential-e",
                    stop="count:30", tracker={"tol": 1e-9}, seed=2**64 - 1)
    again = RunConfig.from_json(json.dumps(cfg.to_json()))
    assert again == cfg


@pytest.mark.parametrize("data", [
    {"family": "cyclic:5", "strategy": "potential-e", "stop": "saturation"},
    {"family": "cyclic:5", "system": "x.json"},
    {},
    {"family": "cyclic:5", "graph": "star:3"},
    {"family": "cyclic:5", "seed": -1},
    {"family": "cyclic:5", "colour": "blue"},
    {"family": "cyclic:5", "strategy": "greedy"},
])
def test_config_validation(data):
    with pytest.raises(InputError):
        RunConfig.from_json(data)


def test_solve_nash(tmp_path, capsys):
    out = tmp_path / "r.json"
    code, _, err = run(["solve", "--family", "nash:3x3", "--graph", "flower:3,2",
                        "--stop", "count:10", "--seed", "4", "--out", str(out)], capsys)
    assert code == 0 and "10 solutions" in err
    rep = json.loads(out.read_text())
    assert rep["schema_version"] == cli.SCHEMA_VERSION
    assert len(rep["solutions"]) == 10 and rep["satisfied"]
    assert rep["stop_reason"] == "known-count"
    assert rep["counts"]["attempted"] == rep["counts"]["succeeded"] + rep["counts"]["failed"]
    assert rep["betti_number"] == 3 and len(rep["edges"]) == 6
    assert rep["config"]["seed"] == 4
    # Solutions solve the system at the reported parameter point.
    F = nash_family(3, 3).system
    p = np.array([complex(*z) for z in rep["parameters"]])
    for sol in rep["solutions"]:
        x = np.array([complex(*z) for z in sol])
        assert np.abs(evaluate(F, p, x)).max() < 1e-8 * (1 + np.abs(x).max())


def test_solve_crn_stabilization(capsys):
    code, out, _ = run(["solve", "--family", "crn-small", "--stop", "stabilization:10",
                        "--seed", "1"], capsys)
    rep = json.loads(out)
    assert code == 0 and len(rep["solutions"]) == 4
    assert rep["family"]["squaring_matrix"] is not None


def test_count_auto_and_dynamic(capsys):
    code, out, _ = run(["solve", "--family", "katsura:5", "--graph", "flower:2,1",
                        "--stop", "count:auto", "--dynamic", "--augment-budget", "30",
                        "--seed", "3"], capsys)
    rep = json.loads(out)
    assert code == 0 and len(rep["solutions"]) == 12
    assert rep["betti_number"] >= 1


def test_exit_code_two_when_exhausted(capsys):
    code, out, _ = run(["solve", "--family", "katsura:5", "--graph", "flower:1,1",
                        "--stop", "count:12"], capsys)
    rep = json.loads(out)
    assert code == 2 and rep["stop_reason"] == "exhausted" and not rep["satisfied"]


@pytest.mark.parametrize("argv", [
    ["solve", "--family", "mystery:3"],
    ["solve", "--family", "katsura:4", "--stop", "count:auto"],
    ["solve", "--family", "katsura:5", "--stop", "often"],
    ["solve", "--family", "katsura:5", "--strategy", "potential-e", "--stop", "saturation"],
    ["solve", "--family", "katsura:5", "--tracker.tol", "-1"],
    ["solve", "--system", "/nonexistent.json"],
])
def test_input_errors_exit_one(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == 1 and err.startswith("error:")


def test_malformed_system_json(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text('{"vars": 2, "params": 1, "equations": [[{"exps": [1]}]]}')
    code, _, err = run(["solve", "--system", str(path)], capsys)
    assert code == 1 and "error" in err


def test_system_json_input(tmp_path, capsys):
    F = nash_family(2, 2).system
    data = F.to_json()
    data["count"] = 1
    path = tmp_path / "nash22.json"
    path.write_text(json.dumps(data))
    code, out, _ = run(["solve", "--system", str(path), "--stop", "count:auto"], capsys)
    assert code == 0 and len(json.loads(out)["solutions"]) == 1


def test_determinism_and_replay(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("MONODROMY_SEED", "77")
    argv = ["solve", "--family", "katsura:5", "--graph", "complete:3,2", "--stop", "count:12"]
    _, first, _ = run(argv, capsys)
    _, second, _ = run(argv, capsys)
    a, b = json.loads(first), json.loads(second)
    assert a["config"]["seed"] == 77
    for key in ("solutions", "parameters", "counts", "edges", "history"):
        assert a[key] == b[key]
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps(a["config"]))
    monkeypatch.delenv("MONODROMY_SEED")
    _, third, _ = run(["solve", "--config", str(cfg)], capsys)
    c = json.loads(third)
    assert c["solutions"] == a["solutions"] and c["counts"] == a["counts"]
    _, other, _ = run(argv + ["--seed", "78"], capsys)
    assert json.loads(other)["history"] != a["history"]


def test_replay_from_report_file(tmp_path, capsys):
    first = tmp_path / "a.json"
    run(["solve", "--family", "katsura:5", "--graph", "complete:3,2", "--seed", "9",
         "--out", str(first)], capsys)
    second = tmp_path / "b.json"
    code, _, _ = run(["solve", "--config", str(first), "--out", str(second)], capsys)
    a, b = json.loads(first.read_text()), json.loads(second.read_text())
    assert code == 0
    assert a["config"] | {"out": None} == b["config"] | {"out": None}
    for key in ("solutions", "parameters", "counts", "edges", "history", "failures"):
        assert a[key] == b[key]


def test_tracker_flags_reach_the_tracker():
    rep = run_solve(RunConfig(family="katsura:5", stop="count:12", seed=1,
                              tracker={"max_steps": 2}))
    assert rep.counts["failed"] > 0 and not rep.satisfied
    assert {f["reason"] for f in rep.failures} == {"step-budget-exhausted"}


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_stats_rows(capsys):
    table = {int(r["d"]): r for r in rows(cmd_stats(20))}
    assert table[20]["t_d(j=2)"] == "0.94674288"
    assert table[5]["t_d(j=4)"] == "0.99115752"
    assert table[1]["E[X_d]"] == "0.00000000"
    assert all(table[1][f"t_d(j={j})"] == "1.00000000" for j in (2, 3, 4))
    assert list(table[1]) == ["d", "t_d(j=2)", "t_d(j=3)", "t_d(j=4)", "E[X_d]"]


def test_stats_cli_csv_and_monte_carlo(tmp_path, capsys):
    path = tmp_path / "t.csv"
    code, _, _ = run(["stats", "--d", "2,10", "--trials", "20000", "--seed", "1",
                      "--csv", str(path)], capsys)
    assert code == 0
    r = rows(path.read_text())
    assert [row["d"] for row in r] == ["2", "10"]
    assert abs(float(r[0]["mc_t_d(j=2)"]) - 0.75) < 0.02
    code, _, _ = run(["stats", "--d-max", "0"], capsys)
    assert code == 1


def test_experiment_single_repeat():
    cfg = RunConfig(family="nash:3x3", stop="count:10", seed=9)
    out = cmd_experiment(cfg, 1)
    assert len(out) == 2 and out[0]["seed"] == 9 and out[0]["completed"] == 1
    assert out[1]["trial"] == "summary" and out[1]["completed"] == 1.0
    assert out[1]["paths_succeeded"] == out[0]["paths_succeeded"]


def test_experiment_errors_become_rows(monkeypatch):
    real = cli.run_solve

    def flaky(cfg):
        if cfg.seed == 1:
            raise FloatingPointError("boom")
        return real(cfg)

    monkeypatch.setattr(cli, "run_solve", flaky)
    out = cmd_experiment(RunConfig(family="katsura:5", stop="count:12", seed=0), 3)
    assert [r["completed"] for r in out[:3]] == [1, 0, 1]
    assert "boom" in out[1]["error"]
    assert out[3]["completed"] == pytest.approx(2 / 3, abs=1e-4)
    with pytest.raises(InputError):
        cmd_experiment(RunConfig(family="katsura:5"), 0)


def test_experiment_cli_csv(capsys):
    code, out, _ = run(["experiment", "--family", "katsura:5", "--graph", "complete:3,2",
                        "--stop", "count:auto", "--repeats", "3", "--seed", "5"], capsys)
    r = rows(out)
    assert code == 0 and len(r) == 4
    assert list(r[0]) == list(cli.EXPERIMENT_COLUMNS)
    assert [row["seed"] for row in r[:3]] == ["5", "6", "7"]


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "monodromy", "stats", "--d-max", "3"],
                         capture_output=True, text=True, check=True)
    assert res.stdout.splitlines()[3].startswith("3,0.72222222")
