"""Skewed order stream: ABC demand curve, per-period Poisson draws, deadlines.

Item popularity follows the curve G(x) = x^s, so the per-period rate of the
i-th most popular of m item types is lambda_i = ((i/m)^s - ((i-1)/m)^s) * n/N
with n expected order units over N periods. A draw of k >= 2 for one item in
one period becomes a single grouped order of size k.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np


@dataclass(frozen=True)
class DemandConfig:
    m: int = 34                # item types (one shelf each)
    n: int = 30000             # expected order units over the horizon
    periods: int = 1440        # discretisation of the horizon
    s: float = 0.4             # skew exponent of the demand curve
    alpha: float = 0.4         # deadline tightness, delta ~ U[1, alpha*horizon]
    horizon: float = 86400.0   # seconds
    seed: int = 0


@dataclass(frozen=True)
class Order:
    id: int
    item: int          # item-type id in [0, m); item i is stored on shelf i
    arrival: float     # seconds, start of the generating period
    deadline: float    # arrival + delta
    group_size: int    # >= 1 units picked in one station visit


def abc_curve(x: float, s: float) -> float:
    """Cumulative demand share G(x) = x^s of the x most popular fraction."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x={x} outside [0, 1]")
    if s <= 0:
        raise ValueError(f"curve exponent must be positive, got {s}")
    return x ** s


def item_rate(i: int, cfg: DemandConfig) -> float:
    """Expected units per period of the i-th most popular item (1-based i)."""
    if not 1 <= i <= cfg.m:
        raise ValueError(f"item index {i} outside 1..{cfg.m}")
    share = abc_curve(i / cfg.m, cfg.s) - abc_curve((i - 1) / cfg.m, cfg.s)
    return share * cfg.n / cfg.periods


def all_rates(cfg: DemandConfig) -> np.ndarray:
    """Per-period rates for items 0..m-1 (0-based view of item_rate)."""
    return np.array([item_rate(i + 1, cfg) for i in range(cfg.m)])


def generate_orders(cfg: DemandConfig) -> list[Order]:
    """Draw one episode's order stream; fully determined by cfg.seed.

    Returns orders sorted by (arrival, item). Deadlines are delta seconds
    after arrival with delta ~ Uniform[1, alpha*horizon].
    """
    rng = np.random.default_rng(cfg.seed)
    rates = all_rates(cfg)
    period_len = cfg.horizon / cfg.periods
    delta_hi = cfg.alpha * cfg.horizon
    orders: list[Order] = []
    for p in range(cfg.periods):
        counts = rng.poisson(rates)
        arrival = p * period_len
        for item in np.flatnonzero(counts):
            delta = rng.uniform(1.0, delta_hi)
            orders.append(Order(id=len(orders), item=int(item),
                                arrival=arrival, deadline=arrival + delta,
                                group_size=int(counts[item])))
    orders.sort(key=lambda o: (o.arrival, o.item))
    return orders


def scale_orders(cfg: DemandConfig, n: int) -> DemandConfig:
    """Resize an instance to `n` expected units, keeping arrival intensity.

    Periods and horizon shrink with n so the per-period rate (and hence the
    queueing regime) is unchanged: a smaller instance is a shorter day, not a
    sparser one.
    """
    if n <= 0:
        raise ValueError(f"order count must be positive, got {n}")
    periods = max(1, round(cfg.periods * n / cfg.n))
    return replace(cfg, n=n, periods=periods,
                   horizon=cfg.horizon * periods / cfg.periods)


CSV_FIELDS = ("id", "item", "arrival", "deadline", "group_size")


def orders_to_csv(orders: list[Order], path: Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_FIELDS)
        for o in orders:
            writer.writerow([o.id, o.item, repr(o.arrival), repr(o.deadline),
                             o.group_size])


def orders_from_csv(path: Path) -> list[Order]:
    orders = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            orders.append(Order(id=int(row["id"]), item=int(row["item"]),
                                arrival=float(row["arrival"]),
                                deadline=float(row["deadline"]),
                                group_size=int(row["group_size"])))
    return orders
