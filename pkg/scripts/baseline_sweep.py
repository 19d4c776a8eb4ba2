#!/usr/bin/env python3
"""Full-scale baseline comparison: Random / Class-based / Shortest Leg.

Sweeps demand skew s over the 24-hour instance and prints the gain table
(no trained agent required). Rows land in results/full/results.csv.
"""

import argparse
from pathlib import Path

from rmfs.bench import ExperimentConfig, run_matrix, rows_to_csv
from rmfs.demand import DemandConfig, scale_orders


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=7000)
    ap.add_argument("--out", type=Path, default=Path("results/full"))
    ap.add_argument("--orders", type=int, default=30000)
    args = ap.parse_args()

    cfg = ExperimentConfig(policies=("random", "class", "sl"),
                           seed=args.seed, outdir=args.out)
    demand = scale_orders(DemandConfig(), args.orders)

    rows = run_matrix(cfg, demand_cfg=demand)
    args.out.mkdir(parents=True, exist_ok=True)
    rows_to_csv(rows, args.out / "results.csv")

    print(f"{'s':>4} {'policy':>8} {'t (s)':>8} {'gain %':>7}")
    for r in rows:
        print(f"{r.s:>4} {r.policy:>8} {r.t_seconds:>8.2f} {r.gain_percent:>7.2f}")


if __name__ == "__main__":
    main()
