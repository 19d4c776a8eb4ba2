"""Benchmark matrix, config round-trips, and CLI surface."""

from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest

from rmfs.agent import AgentConfig
from rmfs.bench import (ExperimentConfig, ResultRow, compute_gain,
                        emit_training_curve, load_agent_core, load_config,
                        parse_policy, rows_from_csv, rows_to_csv, run_matrix,
                        write_config)
from rmfs.cli import main
from rmfs.demand import DemandConfig, orders_from_csv, scale_orders
from rmfs.layout import LayoutConfig
from rmfs.nn import build_network, save_weights

# small, fast, but saturated benchmark instance
DESK = dict(n=400, periods=20, horizon=1200.0)


def desk_demand():
    return replace(DemandConfig(), **DESK)


# ---------------------------------------------------------------------------
# gain metric
# ---------------------------------------------------------------------------

def test_gain_zero_when_equal():
    assert compute_gain(38.0, 38.0) == 0.0


def test_gain_reference_points():
    assert compute_gain(34.79, 38.69) == pytest.approx(10.08, abs=0.01)
    assert compute_gain(32.19, 37.97) == pytest.approx(15.22, abs=0.01)


def test_gain_rejects_nonpositive_baseline():
    with pytest.raises(ValueError):
        compute_gain(10.0, 0.0)
    with pytest.raises(ValueError):
        compute_gain(10.0, -1.0)


# ---------------------------------------------------------------------------
# policy-name grammar
# ---------------------------------------------------------------------------

def test_parse_policy_grammar():
    assert parse_policy("sl") == ("sl", None)
    assert parse_policy("agent+rollout:h=20") == ("agent", 20)
    assert parse_policy("class+rollout:h=0") == ("class", 0)
    for bad in ("slr", "sl+monte", "agent+rollout:h=x", "agent+rollout:h=-1",
                "sl+rollout", "turbo"):
        with pytest.raises(ValueError):
            parse_policy(bad)


def test_experiment_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(s_values=())
    with pytest.raises(ValueError):
        ExperimentConfig(s_values=(1.4,))
    with pytest.raises(ValueError):
        ExperimentConfig(policies=("warp",))
    with pytest.raises(ValueError):
        ExperimentConfig(horizons=(-2,))


# ---------------------------------------------------------------------------
# demand rescaling
# ---------------------------------------------------------------------------

def test_scale_orders_preserves_density():
    base = DemandConfig()
    desk = scale_orders(base, 5000)
    assert desk.n == 5000 and desk.periods == 240
    assert desk.horizon == pytest.approx(14400.0)
    assert desk.n / desk.periods == pytest.approx(base.n / base.periods)
    assert desk.horizon / desk.periods == pytest.approx(
        base.horizon / base.periods)
    with pytest.raises(ValueError):
        scale_orders(base, 0)


# ---------------------------------------------------------------------------
# matrix runs
# ---------------------------------------------------------------------------

def matrix_cfg(**over):
    base = dict(s_values=(0.6,), policies=("random", "class", "sl"),
                seed=7000)
    base.update(over)
    return ExperimentConfig(**base)


def test_matrix_baselines_structure():
    rows = run_matrix(matrix_cfg(), demand_cfg=desk_demand())
    assert [r.policy for r in rows] == ["class", "random", "sl"]
    rnd = next(r for r in rows if r.policy == "random")
    assert rnd.gain_percent == 0.0
    assert len({r.seed for r in rows}) == 1       # one shared instance
    for r in rows:
        assert r.t_seconds > 0
        assert r.gain_percent == pytest.approx(
            compute_gain(r.t_seconds, rnd.t_seconds))


def test_matrix_random_anchor_always_present():
    rows = run_matrix(matrix_cfg(policies=("sl",)), demand_cfg=desk_demand())
    assert [r.policy for r in rows] == ["random", "sl"]


def test_matrix_agent_requires_weights(tmp_path):
    with pytest.raises(FileNotFoundError):
        run_matrix(matrix_cfg(policies=("agent",)), demand_cfg=desk_demand())
    with pytest.raises(FileNotFoundError):
        load_agent_core(tmp_path / "missing.ffw")


def test_matrix_agent_and_rollout_rows(tmp_path):
    weights = tmp_path / "agent.ffw"
    save_weights(build_network(seed=3), weights)
    rows = run_matrix(
        matrix_cfg(policies=("agent", "sl+rollout:h=2", "agent+rollout:h=1"),
                   weights=weights),
        demand_cfg=desk_demand())
    names = [r.policy for r in rows]
    assert names == ["agent", "agent+rollout:h=1", "random", "sl+rollout:h=2"]
    by_name = {r.policy: r for r in rows}
    assert by_name["agent+rollout:h=1"].h == 1
    assert by_name["sl+rollout:h=2"].h == 2
    assert by_name["agent"].h is None


def test_matrix_rejects_bad_weight_shapes(tmp_path):
    weights = tmp_path / "tiny.ffw"
    save_weights(build_network(sizes=(4, 6), seed=0), weights)
    with pytest.raises(ValueError):
        load_agent_core(weights)


def test_matrix_deterministic_rerun():
    cfg = matrix_cfg(s_values=(0.5, 0.8))
    a = run_matrix(cfg, demand_cfg=desk_demand())
    b = run_matrix(cfg, demand_cfg=desk_demand())
    assert a == b
    assert sorted({r.s for r in a}) == [0.5, 0.8]


# ---------------------------------------------------------------------------
# CSV artifacts
# ---------------------------------------------------------------------------

def test_rows_csv_roundtrip(tmp_path):
    rows = run_matrix(matrix_cfg(), demand_cfg=desk_demand())
    path = tmp_path / "results.csv"
    rows_to_csv(rows, path)
    assert rows_from_csv(path) == rows
    header = path.read_text().splitlines()[0]
    assert header == "policy,s,h,t_seconds,gain_percent,seed"


def test_training_curve_csv(tmp_path):
    path = tmp_path / "curve.csv"
    emit_training_curve([], path)
    assert path.read_text().splitlines() == ["episode,gain_percent"]
    emit_training_curve([(100, 4.5), (200, 6.25)], path,
                        references={"sl": 10.0, "class": 8.0})
    lines = path.read_text().splitlines()
    assert lines == ["episode,gain_percent", "100,4.5", "200,6.25"]
    refs = (tmp_path / "curve_refs.csv").read_text().splitlines()
    assert refs == ["policy,gain_percent", "class,8.0", "sl,10.0"]


# ---------------------------------------------------------------------------
# INI configuration
# ---------------------------------------------------------------------------

def test_config_roundtrip_defaults(tmp_path):
    path = tmp_path / "exp.ini"
    write_config(path)
    lay, dem, agent, exp = load_config(path)
    assert lay == LayoutConfig()
    assert dem == DemandConfig()
    assert agent == AgentConfig()
    assert exp == ExperimentConfig()


def test_config_roundtrip_custom(tmp_path):
    path = tmp_path / "exp.ini"
    custom = ExperimentConfig(
        s_values=(0.6,), policies=("sl", "agent+rollout:h=20"),
        horizons=(20,), seed=123, outdir=Path("out/dir"),
        weights=Path("w.ffw"))
    write_config(path, demand_cfg=desk_demand(),
                 agent_cfg=AgentConfig(episodes=2000, seed=9),
                 exp_cfg=custom)
    _, dem, agent, exp = load_config(path)
    assert dem == desk_demand()
    assert agent == AgentConfig(episodes=2000, seed=9)
    assert exp == custom


def test_config_rejects_unknown_keys(tmp_path):
    path = tmp_path / "bad.ini"
    path.write_text("[demand]\nwarp_speed = 9\n")
    with pytest.raises(ValueError):
        load_config(path)
    path.write_text("[turbo]\nx = 1\n")
    with pytest.raises(ValueError):
        load_config(path)
    with pytest.raises(FileNotFoundError):
        load_config(tmp_path / "absent.ini")


# ---------------------------------------------------------------------------
# CLI surface
# ---------------------------------------------------------------------------

def write_desk_config(tmp_path, **exp_over):
    path = tmp_path / "desk.ini"
    exp = ExperimentConfig(s_values=(0.6,), policies=("random", "sl"),
                           horizons=(1,), outdir=tmp_path / "results",
                           **exp_over)
    write_config(path, demand_cfg=desk_demand(),
                 agent_cfg=AgentConfig(episodes=0), exp_cfg=exp)
    return path


def test_cli_generate(tmp_path, capsys):
    cfg = write_desk_config(tmp_path)
    out = tmp_path / "gen"
    assert main(["generate", "--config", str(cfg), "--out", str(out),
                 "--seed", "5"]) == 0
    orders = orders_from_csv(out / "orders.csv")
    assert orders and orders == sorted(orders, key=lambda o: (o.arrival, o.item))


def test_cli_eval_byte_identical_rerun(tmp_path):
    cfg = write_desk_config(tmp_path)
    out = tmp_path / "results"
    assert main(["eval", "--config", str(cfg)]) == 0
    first = (out / "results.csv").read_bytes()
    assert main(["eval", "--config", str(cfg)]) == 0
    assert (out / "results.csv").read_bytes() == first
    rows = rows_from_csv(out / "results.csv")
    assert [r.policy for r in rows] == ["random", "sl"]


def test_cli_train_then_tables(tmp_path):
    cfg = write_desk_config(tmp_path)
    out = tmp_path / "results"
    assert main(["train", "--config", str(cfg), "--episodes", "2",
                 "--orders", "120"]) == 0
    assert (out / "agent.ffw").exists()
    assert (out / "curve.csv").read_text().startswith("episode,gain_percent")

    assert main(["table1", "--config", str(cfg)]) == 0
    t1 = rows_from_csv(out / "table1.csv")
    assert [r.policy for r in t1] == ["agent", "class", "random", "sl"]

    assert main(["table2", "--config", str(cfg)]) == 0
    t2 = rows_from_csv(out / "table2.csv")
    assert [r.policy for r in t2] == ["agent+rollout:h=1", "random",
                                      "sl+rollout:h=1"]


def test_cli_table1_without_weights_fails(tmp_path, capsys):
    cfg = write_desk_config(tmp_path)
    assert main(["table1", "--config", str(cfg)]) == 2
    assert "error:" in capsys.readouterr().err


def test_cli_reports_config_errors(tmp_path, capsys):
    bad = tmp_path / "bad.ini"
    bad.write_text("[demand]\nnope = 3\n")
    assert main(["eval", "--config", str(bad)]) == 2
    assert "error:" in capsys.readouterr().err
