"""Single-step look-ahead with truncated rollout over revealed orders.

At a storage decision, each feasible zone is tried once: the simulator is
snapshotted, future arrivals are frozen so only already-revealed orders can
drive retrievals, the candidate zone is forced as the first action, and the
base policy plays out `horizon` consecutive storage tasks deterministically.
The candidate with the lowest accumulated cost wins.  Two terminal modes:

* ``q_bootstrap``   - cost = travel along the trajectory plus the online
  Q-network's masked minimum at the state where task ``horizon + 1`` would
  start (for value-learning bases);
* ``average_cycle`` - cost = mean travel per cycle decided in the window
  (for rule bases with no value function).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .agent import DifferentialQCore, extract_features, feasible_mask
from .demand import Order
from .nn import forward
from .policies import TurnoverTable
from .sim import (DecisionObserver, RobotState, Simulation, StorageChoice,
                  StoragePolicy)

MODE_Q = "q_bootstrap"
MODE_AVG = "average_cycle"


@dataclass(frozen=True)
class RolloutConfig:
    horizon: int = 20        # storage tasks simulated, counting the forced one
    mode: str = MODE_Q

    def __post_init__(self):
        if self.horizon < 0:
            raise ValueError("horizon must be nonnegative")
        if self.mode not in (MODE_Q, MODE_AVG):
            raise ValueError(f"unknown rollout mode {self.mode!r}")


def revealed_horizon(sim: Simulation) -> list[Order]:
    """Revealed orders still awaiting assignment, in processing order."""
    out = [sim.orders[oid]
           for heap in sim.pending.values()
           for _, oid in heap]
    out.sort(key=lambda o: (o.deadline, o.id))
    return out


class _ForcedFirst(StoragePolicy):
    """Plays one fixed zone for one robot's next decision, then defers."""

    def __init__(self, base: StoragePolicy, robot_id: int, zone: int):
        self.base = base
        self.robot_id = robot_id
        self.zone = zone
        self.used = False

    def choose(self, sim, robot, shelf, next_order):
        if not self.used and robot.id == self.robot_id:
            self.used = True
            # a same-instant decision by a lower-numbered robot may have
            # filled the zone meanwhile; fall back to the base rule then
            if sim.zone_available(self.zone) > 0:
                return StorageChoice(self.zone)
        return self.base.choose(sim, robot, shelf, next_order)


class _Driver(DecisionObserver):
    """Accounts travel and cycles, and stops the clone after the window."""

    def __init__(self, cfg: RolloutConfig, core, turnover):
        self.cfg = cfg
        self.core = core
        self.turnover = turnover
        self.storage_tasks = 0
        self.cycles = 0
        self.travel = 0.0
        self.terminal = 0.0

    def before_decision(self, sim, robot) -> bool:
        if self.storage_tasks < self.cfg.horizon:
            return True
        if self.cfg.mode == MODE_Q:
            f = extract_features(sim, robot.carried, sim.peek_next_retrieval(),
                                 self.turnover)
            q = forward(self.core.online, f)
            mask = feasible_mask(sim)
            self.terminal = min(q[a] for a in range(len(mask)) if mask[a])
        return False

    def after_decision(self, robot_id: int) -> None:
        self.storage_tasks += 1
        self.cycles += 1

    def on_opportunistic(self, robot_id: int) -> None:
        self.cycles += 1

    def on_reward(self, robot_id: int, travel: float) -> None:
        self.travel += travel

    def value(self) -> float:
        if self.cfg.mode == MODE_AVG:
            return self.travel / self.cycles if self.cycles else 0.0
        return self.travel + self.terminal


def action_values(sim: Simulation, robot: RobotState, base: StoragePolicy,
                  cfg: RolloutConfig,
                  core: Optional[DifferentialQCore] = None,
                  turnover: Optional[TurnoverTable] = None) -> dict[int, float]:
    """Rollout cost of every feasible first zone at the pending decision.

    Call only from within a storage decision (the decision event has been
    consumed); each candidate re-schedules it on its own frozen snapshot.
    """
    values = {}
    for zone in sim.feasible_zones():
        clone = sim.snapshot()
        clone.halted = False  # the caller consumed the decision event
        clone.freeze_arrivals()
        clone.policy = _ForcedFirst(base, robot.id, zone)
        driver = _Driver(cfg, core, turnover)
        clone.observer = driver
        clone.schedule_decision(robot.id)
        clone.run()
        values[zone] = driver.value()
    return values


def rollout_decide(sim: Simulation, robot: RobotState, base: StoragePolicy,
                   cfg: RolloutConfig,
                   core: Optional[DifferentialQCore] = None,
                   turnover: Optional[TurnoverTable] = None) -> int:
    """Zone with the lowest rollout cost; ties go to the lowest zone id."""
    feasible = sim.feasible_zones()
    if len(feasible) == 1:
        return feasible[0]
    if cfg.horizon == 0:
        # no look-ahead window: the base policy's own decision
        choice = base.choose(sim, robot, robot.carried,
                             sim.peek_next_retrieval())
        return choice.zone
    values = action_values(sim, robot, base, cfg, core, turnover)
    return min(values, key=lambda z: (values[z], z))


class RolloutPolicy(StoragePolicy):
    """Wraps a base policy, replacing each live decision with a rollout.

    Pure evaluation: no exploration, no learning, and the live state is
    only read (each candidate runs on its own snapshot).
    """

    def __init__(self, base: StoragePolicy, cfg: RolloutConfig,
                 core: Optional[DifferentialQCore] = None,
                 turnover: Optional[TurnoverTable] = None):
        if cfg.mode == MODE_Q and (core is None or turnover is None):
            raise ValueError("q_bootstrap rollouts need a value core "
                             "and a turnover table")
        self.base = base
        self.cfg = cfg
        self.core = core
        self.turnover = turnover

    def choose(self, sim, robot, shelf, next_order):
        return StorageChoice(rollout_decide(sim, robot, self.base, self.cfg,
                                            self.core, self.turnover))
