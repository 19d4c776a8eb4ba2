"""Command-line entry points: generate / train / eval / table1 / table2.

All subcommands accept --config (INI file), --seed, --out, and the
desk-scale overrides --episodes and --orders. --orders resizes the demand
instance while preserving arrival density (a shorter day, same load).
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import replace
from pathlib import Path

from .agent import AgentConfig, train
from .bench import (ExperimentConfig, emit_training_curve, load_config,
                    run_matrix, rows_to_csv)
from .demand import DemandConfig, generate_orders, orders_to_csv, scale_orders
from .layout import LayoutConfig
from .nn import save_weights

WEIGHTS_NAME = "agent.ffw"
CURVE_NAME = "curve.csv"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rmfs",
        description="Warehouse storage-policy experiments: demand generation, "
                    "agent training, and policy benchmarks.")
    sub = parser.add_subparsers(dest="command", required=True)
    specs = (
        ("generate", "write one demand instance as CSV"),
        ("train", "train the learning agent; write weights and training curve"),
        ("eval", "run the configured policy matrix; write results.csv"),
        ("table1", "policy comparison (random/class/sl/agent) over the skew sweep"),
        ("table2", "rollout comparison (sl/agent bases) over the horizon sweep"),
    )
    for name, help_text in specs:
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", type=Path, default=None,
                         help="INI configuration file")
        cmd.add_argument("--seed", type=int, default=None,
                         help="override the subcommand's base seed")
        cmd.add_argument("--out", type=Path, default=None,
                         help="output directory (default: config outdir)")
        cmd.add_argument("--episodes", type=int, default=None,
                         help="override training episode count")
        cmd.add_argument("--orders", type=int, default=None,
                         help="episode size override; rescales the instance "
                              "at constant arrival density")
    return parser


def _load(args) -> tuple[LayoutConfig, DemandConfig, AgentConfig, ExperimentConfig]:
    if args.config is not None:
        lay, dem, agent, exp = load_config(args.config)
    else:
        lay, dem, agent, exp = (LayoutConfig(), DemandConfig(),
                                AgentConfig(), ExperimentConfig())
    if args.orders is not None:
        dem = scale_orders(dem, args.orders)
    if args.episodes is not None:
        agent = replace(agent, episodes=args.episodes)
    outdir = args.out if args.out is not None else exp.outdir
    outdir.mkdir(parents=True, exist_ok=True)
    exp = replace(exp, outdir=outdir)
    return lay, dem, agent, exp


def _resolve_weights(exp: ExperimentConfig) -> ExperimentConfig:
    if exp.weights is None:
        return replace(exp, weights=exp.outdir / WEIGHTS_NAME)
    return exp


def _cmd_generate(args) -> int:
    _, dem, _, exp = _load(args)
    if args.seed is not None:
        dem = replace(dem, seed=args.seed)
    orders = generate_orders(dem)
    path = exp.outdir / "orders.csv"
    orders_to_csv(orders, path)
    print(f"wrote {len(orders)} orders ({sum(o.group_size for o in orders)} units) "
          f"to {path}")
    return 0


def _cmd_train(args) -> int:
    lay, dem, agent, exp = _load(args)
    if args.seed is not None:
        agent = replace(agent, seed=args.seed)
    start = time.time()

    def progress(episode: int, gain: float) -> None:
        print(f"episode {episode}: gain {gain:.2f}% vs random "
              f"[{time.time() - start:.0f}s]", flush=True)

    net, curve = train(agent, layout_cfg=lay, demand_cfg=dem, progress=progress)
    weights_path = exp.outdir / WEIGHTS_NAME
    save_weights(net, weights_path)
    emit_training_curve(curve, exp.outdir / CURVE_NAME)
    print(f"wrote {weights_path} and {exp.outdir / CURVE_NAME}")
    return 0


def _run_matrix_cmd(args, exp: ExperimentConfig, lay: LayoutConfig,
                    dem: DemandConfig, out_name: str) -> int:
    if args.seed is not None:
        exp = replace(exp, seed=args.seed)
    if any(p.startswith("agent") for p in exp.policies):
        exp = _resolve_weights(exp)
    rows = run_matrix(exp, layout_cfg=lay, demand_cfg=dem)
    path = exp.outdir / out_name
    rows_to_csv(rows, path)
    print(f"wrote {len(rows)} rows to {path}")
    return 0


def _cmd_eval(args) -> int:
    lay, dem, _, exp = _load(args)
    return _run_matrix_cmd(args, exp, lay, dem, "results.csv")


def _cmd_table1(args) -> int:
    lay, dem, _, exp = _load(args)
    exp = replace(exp, policies=("random", "class", "sl", "agent"))
    return _run_matrix_cmd(args, exp, lay, dem, "table1.csv")


def _cmd_table2(args) -> int:
    lay, dem, _, exp = _load(args)
    policies = tuple(f"{base}+rollout:h={h}"
                     for base in ("sl", "agent") for h in exp.horizons)
    exp = replace(exp, policies=policies)
    return _run_matrix_cmd(args, exp, lay, dem, "table2.csv")


_COMMANDS = {
    "generate": _cmd_generate,
    "train": _cmd_train,
    "eval": _cmd_eval,
    "table1": _cmd_table1,
    "table2": _cmd_table2,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
