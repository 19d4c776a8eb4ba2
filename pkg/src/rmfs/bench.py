"""Experiment matrix: policy sweeps over demand skew, gains, CSV artifacts.

Every policy at a given skew s is scored on one shared instance (same order
stream, same initial shelf placement); gains are percentage travel-time
reductions against the Random row of that instance. Rerunning with the same
configuration reproduces the output files byte for byte.
"""

from __future__ import annotations

import configparser
import csv
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Optional, Sequence

from .agent import AgentConfig, AgentPolicy, DifferentialQCore, N_FEATURES
from .demand import DemandConfig, generate_orders
from .layout import LayoutConfig, build_layout
from .nn import load_weights
from .policies import (ClassBasedPolicy, RandomPolicy, ShortestLegPolicy,
                       TurnoverTable, build_turnover_table)
from .rollout import MODE_AVG, MODE_Q, RolloutConfig, RolloutPolicy
from .sim import StoragePolicy, run_episode

DEFAULT_S_VALUES = (0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0)
DEFAULT_HORIZONS = (5, 10, 20, 30, 40)
BASE_POLICIES = ("random", "class", "sl", "agent")
RESULT_FIELDS = ("policy", "s", "h", "t_seconds", "gain_percent", "seed")

# per-sweep-cell seed offsets relative to ExperimentConfig.seed: cell k
# (the k-th s value) draws its instance from seed+1000+k / seed+2000+k and
# its stochastic policies from seed+3000+k
_DEMAND_OFF = 1000
_SIM_OFF = 2000
_POLICY_OFF = 3000


@dataclass(frozen=True)
class ExperimentConfig:
    s_values: tuple[float, ...] = DEFAULT_S_VALUES
    policies: tuple[str, ...] = ("random", "class", "sl")
    horizons: tuple[int, ...] = DEFAULT_HORIZONS
    seed: int = 7000
    train_seed: int = 0
    outdir: Path = Path("results")
    weights: Optional[Path] = None

    def __post_init__(self):
        if not self.s_values or not self.policies or not self.horizons:
            raise ValueError("s_values, policies and horizons must be nonempty")
        for s in self.s_values:
            if not 0.0 < s <= 1.0:
                raise ValueError(f"skew s={s} outside (0, 1]")
        for h in self.horizons:
            if h < 0:
                raise ValueError(f"negative horizon {h}")
        for name in self.policies:
            parse_policy(name)


@dataclass(frozen=True)
class ResultRow:
    policy: str
    s: float
    h: Optional[int]
    t_seconds: float
    gain_percent: float
    seed: int          # demand seed of the shared instance this row used


def compute_gain(t_policy: float, t_random: float) -> float:
    """Percentage decrease in travelling time against the Random anchor."""
    if t_random <= 0.0:
        raise ValueError(f"baseline travel time must be positive, got {t_random}")
    return 100.0 * (t_random - t_policy) / t_random


def parse_policy(name: str) -> tuple[str, Optional[int]]:
    """Split 'base' or 'base+rollout:h=H' into (base, horizon or None)."""
    base, sep, tail = name.partition("+")
    if base not in BASE_POLICIES:
        raise ValueError(f"unknown policy {base!r}; expected one of {BASE_POLICIES}")
    if not sep:
        return base, None
    if not tail.startswith("rollout:h="):
        raise ValueError(f"bad policy suffix {tail!r}; expected rollout:h=H")
    try:
        h = int(tail[len("rollout:h="):])
    except ValueError:
        raise ValueError(f"bad rollout horizon in {name!r}") from None
    if h < 0:
        raise ValueError(f"negative rollout horizon in {name!r}")
    return base, h


def load_agent_core(weights: Optional[Path]) -> DifferentialQCore:
    """Inference-only agent core around a persisted weights file."""
    if weights is None:
        raise FileNotFoundError("agent policy requested but no weights file configured")
    net = load_weights(Path(weights))
    if net.sizes[0] != N_FEATURES:
        raise ValueError(f"weights expect {net.sizes[0]} inputs, policy needs {N_FEATURES}")
    core = DifferentialQCore(AgentConfig(sizes=net.sizes))
    core.online = net
    return core


def build_policy(name: str, layout, table: TurnoverTable,
                 core: Optional[DifferentialQCore],
                 policy_seed: int) -> StoragePolicy:
    base, h = parse_policy(name)
    if base == "random":
        pol: StoragePolicy = RandomPolicy(seed=policy_seed)
    elif base == "class":
        pol = ClassBasedPolicy(layout, table, seed=policy_seed)
    elif base == "sl":
        pol = ShortestLegPolicy()
    else:
        if core is None:
            raise FileNotFoundError("agent policy requested but no weights loaded")
        pol = AgentPolicy(core, table, explore=False, learn=False)
    if h is None:
        return pol
    mode = MODE_Q if base == "agent" else MODE_AVG
    return RolloutPolicy(pol, RolloutConfig(h, mode), core=core, turnover=table)


def run_matrix(cfg: ExperimentConfig,
               layout_cfg: LayoutConfig = LayoutConfig(),
               demand_cfg: DemandConfig = DemandConfig()) -> list[ResultRow]:
    """Score every configured policy on one shared instance per skew value.

    The Random anchor is always evaluated (even when absent from
    cfg.policies) because all gains are relative to it.
    """
    lay = build_layout(layout_cfg)
    needs_agent = any(parse_policy(p)[0] == "agent" for p in cfg.policies)
    core = load_agent_core(cfg.weights) if needs_agent else None

    rows: list[ResultRow] = []
    for k, s in enumerate(cfg.s_values):
        dc = replace(demand_cfg, s=s, seed=cfg.seed + _DEMAND_OFF + k)
        orders = generate_orders(dc)
        table = build_turnover_table(dc)
        sim_seed = cfg.seed + _SIM_OFF + k
        policy_seed = cfg.seed + _POLICY_OFF + k

        t_random = run_episode(
            lay, orders, RandomPolicy(seed=policy_seed), seed=sim_seed
        ).avg_travel_time
        rows.append(ResultRow("random", s, None, t_random,
                              compute_gain(t_random, t_random), dc.seed))
        for name in cfg.policies:
            if name == "random":
                continue
            pol = build_policy(name, lay, table, core, policy_seed)
            t = run_episode(lay, orders, pol, seed=sim_seed).avg_travel_time
            _, h = parse_policy(name)
            rows.append(ResultRow(name, s, h, t,
                                  compute_gain(t, t_random), dc.seed))

    rows.sort(key=lambda r: (r.s, r.policy, -1 if r.h is None else r.h))
    return rows


def rows_to_csv(rows: Sequence[ResultRow], path: Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RESULT_FIELDS)
        for r in rows:
            writer.writerow([r.policy, repr(r.s),
                             "" if r.h is None else r.h,
                             repr(r.t_seconds), repr(r.gain_percent), r.seed])


def rows_from_csv(path: Path) -> list[ResultRow]:
    rows = []
    with open(path, newline="") as fh:
        for rec in csv.DictReader(fh):
            rows.append(ResultRow(
                policy=rec["policy"], s=float(rec["s"]),
                h=None if rec["h"] == "" else int(rec["h"]),
                t_seconds=float(rec["t_seconds"]),
                gain_percent=float(rec["gain_percent"]),
                seed=int(rec["seed"])))
    return rows


def emit_training_curve(curve: Sequence[tuple[int, float]], path: Path,
                        references: Optional[dict[str, float]] = None) -> None:
    """Training-curve CSV (episode, gain_percent); baseline reference gains,
    if given, go to a sibling *_refs.csv for horizontal plot lines."""
    path = Path(path)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("episode", "gain_percent"))
        for episode, gain in curve:
            writer.writerow([episode, repr(float(gain))])
    if references is not None:
        ref_path = path.with_name(path.stem + "_refs.csv")
        with open(ref_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(("policy", "gain_percent"))
            for name in sorted(references):
                writer.writerow([name, repr(float(references[name]))])


# ---------------------------------------------------------------------------
# INI configuration: one file carrying all four config dataclasses
# ---------------------------------------------------------------------------

_SECTIONS = ("layout", "demand", "agent", "experiment")


def _format_value(value) -> str:
    if isinstance(value, tuple):
        return ",".join(_format_value(v) for v in value)
    if value is None:
        return ""
    return str(value)


def write_config(path: Path, layout_cfg: LayoutConfig = LayoutConfig(),
                 demand_cfg: DemandConfig = DemandConfig(),
                 agent_cfg: AgentConfig = AgentConfig(),
                 exp_cfg: ExperimentConfig = ExperimentConfig()) -> None:
    parser = configparser.ConfigParser(interpolation=None)
    for section, cfg in zip(_SECTIONS, (layout_cfg, demand_cfg, agent_cfg, exp_cfg)):
        parser[section] = {f.name: _format_value(getattr(cfg, f.name))
                           for f in fields(cfg)}
    with open(path, "w") as fh:
        parser.write(fh)


def _coerce(raw: str, default):
    """Parse an INI value using the default's type as the template."""
    raw = raw.strip()
    if isinstance(default, bool):
        return raw.lower() in ("1", "true", "yes", "on")
    if isinstance(default, int):
        return int(raw)
    if isinstance(default, float):
        return float(raw)
    if isinstance(default, tuple):
        parts = [p.strip() for p in raw.split(",") if p.strip()]
        inner = default[0]
        return tuple(_coerce(p, inner) for p in parts)
    if isinstance(default, Path):
        return Path(raw)
    return raw


def _load_section(parser, section: str, cfg):
    if not parser.has_section(section):
        return cfg
    updates = {}
    valid = {f.name: getattr(cfg, f.name) for f in fields(cfg)}
    for key, raw in parser.items(section):
        if key not in valid:
            raise ValueError(f"unknown key {key!r} in [{section}]")
        if key == "weights":    # the only optional field: empty means unset
            updates[key] = Path(raw) if raw.strip() else None
        else:
            updates[key] = _coerce(raw, valid[key])
    return replace(cfg, **updates)


def load_config(path: Path) -> tuple[LayoutConfig, DemandConfig,
                                     AgentConfig, ExperimentConfig]:
    parser = configparser.ConfigParser(interpolation=None)
    read = parser.read(path)
    if not read:
        raise FileNotFoundError(path)
    for section in parser.sections():
        if section not in _SECTIONS:
            raise ValueError(f"unknown config section [{section}]")
    return (_load_section(parser, "layout", LayoutConfig()),
            _load_section(parser, "demand", DemandConfig()),
            _load_section(parser, "agent", AgentConfig()),
            _load_section(parser, "experiment", ExperimentConfig()))
