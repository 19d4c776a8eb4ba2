#!/usr/bin/env python3
"""Look-ahead rollout comparison over horizons (desk scale).

Evaluates sl+rollout and agent+rollout for each horizon against the plain
bases on one shared instance. Requires trained weights (see
scripts/train_agent.py).
"""

import argparse
from pathlib import Path

from rmfs.bench import ExperimentConfig, run_matrix, rows_to_csv
from rmfs.demand import DemandConfig, scale_orders


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--horizons", type=int, nargs="+", default=[5, 10, 20])
    ap.add_argument("--orders", type=int, default=5000)
    ap.add_argument("--skew", type=float, default=0.6)
    ap.add_argument("--seed", type=int, default=7000)
    ap.add_argument("--weights", type=Path, default=Path("results/desk/agent.ffw"))
    ap.add_argument("--out", type=Path, default=Path("results/desk"))
    args = ap.parse_args()

    policies = ["sl", "agent"]
    for h in args.horizons:
        policies += [f"sl+rollout:h={h}", f"agent+rollout:h={h}"]

    cfg = ExperimentConfig(s_values=(args.skew,), policies=tuple(policies),
                           horizons=tuple(args.horizons), seed=args.seed,
                           outdir=args.out, weights=args.weights)
    rows = run_matrix(cfg, demand_cfg=scale_orders(DemandConfig(), args.orders))
    args.out.mkdir(parents=True, exist_ok=True)
    rows_to_csv(rows, args.out / "table2.csv")

    print(f"{'policy':>22} {'t (s)':>8} {'gain %':>7}")
    for r in rows:
        print(f"{r.policy:>22} {r.t_seconds:>8.2f} {r.gain_percent:>7.2f}")


if __name__ == "__main__":
    main()
