"""Double differential deep Q-learning storage policy.

The learner treats zone choices as a continuing average-cost problem: cycle
travel seconds are costs, Q-values estimate differential cost-to-go, and a
running average cost is maintained alongside the network.  Action values come
from an online network; bootstrap targets evaluate the online argmin on a
periodically synchronized target copy.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .demand import DemandConfig, Order, generate_orders
from .layout import Layout, LayoutConfig, build_layout
from .nn import (DEFAULT_SIZES, Network, build_adam, build_network,
                 clone_network, copy_weights, forward, train_batch)
from .policies import RandomPolicy, TurnoverTable, build_turnover_table
from .sim import (RobotState, SimConfig, Simulation, StorageChoice,
                  StoragePolicy, run_episode)

OPPORTUNISTIC = -1  # action id of an enforced keep-the-shelf step

N_FEATURES = DEFAULT_SIZES[0]

# seed offsets inside a training run: episode j draws demand from
# base+_TRAIN_DEMAND+j and shelf placement from base+_TRAIN_SIM+j; the
# held-out monitoring instance and its baseline use the _EVAL_* offsets
_TRAIN_DEMAND = 0
_TRAIN_SIM = 500_000
_EVAL_DEMAND = 900_000
_EVAL_SIM = 910_000
_EVAL_POLICY = 920_000


class DivergenceError(FloatingPointError):
    """Training left the numerically meaningful regime."""


@dataclass(frozen=True)
class AgentConfig:
    epsilon: float = 0.1          # exploration rate, constant
    lr: float = 0.00025           # Adam step size
    beta: float = 0.0001          # average-reward step size
    replay_capacity: int = 1000
    train_period: int = 100       # decisions between batch-training rounds
    sample_size: int = 256        # experiences sampled per round
    minibatch_size: int = 64
    sync_period: int = 500        # decisions between target-network syncs
    episodes: int = 10000
    eval_period: int = 100        # episodes between held-out evaluations
    sizes: tuple[int, ...] = DEFAULT_SIZES
    seed: int = 0

    def __post_init__(self):
        positive = (self.epsilon, self.lr, self.beta, self.replay_capacity,
                    self.train_period, self.sample_size, self.minibatch_size,
                    self.sync_period, self.eval_period)
        if any(v <= 0 for v in positive):
            raise ValueError("agent hyperparameters must be positive")
        if self.sample_size > self.replay_capacity:
            raise ValueError("sample size exceeds replay capacity")
        if self.episodes < 0:
            raise ValueError("episodes must be nonnegative")


@dataclass
class Experience:
    """One decision step: state, action, observed cycle cost, next state."""

    s: np.ndarray
    a: int                            # zone id, or OPPORTUNISTIC
    r: float                          # cycle travel seconds (a cost)
    s_next: np.ndarray
    feasible_next: tuple[bool, ...]
    next_opportunistic: bool = False  # s_next enforces a keep-the-shelf step
    greedy: bool = True               # a was the online argmin at decision time


def extract_features(sim: Simulation, shelf: int, next_order: Optional[Order],
                     turnover: TurnoverTable,
                     opportunistic: bool = False) -> np.ndarray:
    """Partial observation for a storage (or enforced) decision.

    Layout: [0] carried shelf's turnover rate, [1] its relative rank,
    [2..7] one-hot zone of the next known retrieval (all zero if none is
    known or the step is enforced), [8..13] per-zone occupied fraction,
    [14..19] per-zone robots inbound for a retrieval over fleet size,
    [20] enforced-step flag.
    """
    lay = sim.layout
    nz = len(lay.zones)
    f = np.zeros(3 * nz + 3)
    f[0] = turnover.rates[shelf]
    f[1] = turnover.ranks[shelf]
    if not opportunistic and next_order is not None:
        cell = sim.shelf_cell[next_order.item]
        f[2 + lay.zone_of[cell]] = 1.0
    fleet = len(sim.robots)
    for z in range(nz):
        taken = sim.stored_per_zone[z] + sim.reserved_per_zone[z]
        f[2 + nz + z] = taken / lay.zones[z].capacity
        f[2 + 2 * nz + z] = sim.inbound_per_zone[z] / fleet
    f[2 + 3 * nz] = 1.0 if opportunistic else 0.0
    return f


def feasible_mask(sim: Simulation) -> tuple[bool, ...]:
    return tuple(sim.zone_available(z) > 0 for z in range(len(sim.layout.zones)))


class DifferentialQCore:
    """Networks, replay ring, average cost, and the update schedule.

    Domain-agnostic: actions are output indices, states are feature rows.
    The warehouse harness lives in AgentPolicy; tests drive the core with
    synthetic decision processes as well.
    """

    def __init__(self, cfg: AgentConfig):
        self.cfg = cfg
        self.online = build_network(cfg.sizes, seed=cfg.seed)
        self.target = clone_network(self.online)
        self.adam = build_adam(self.online, lr=cfg.lr)
        self.rng = np.random.default_rng(cfg.seed)
        self.replay: deque[Experience] = deque(maxlen=cfg.replay_capacity)
        self.n_actions = cfg.sizes[-1]
        self.decisions = 0
        self.avg_reward = 0.0
        self.explored = 0       # times the uniform-random branch fired
        self.train_rounds = 0
        self.last_loss: Optional[float] = None

    # ---- action selection ----------------------------------------------

    def greedy_action(self, f, feasible) -> int:
        """Feasibility-masked argmin of the online outputs, ties to lowest id."""
        q = forward(self.online, f)
        best = -1
        best_q = np.inf
        for a in range(self.n_actions):
            if feasible[a] and q[a] < best_q:
                best, best_q = a, q[a]
        if best < 0:
            raise ValueError("no feasible action")
        return best

    def select_action(self, f, feasible, explore: bool = True) -> int:
        if explore and self.rng.random() < self.cfg.epsilon:
            options = [a for a in range(self.n_actions) if feasible[a]]
            if not options:
                raise ValueError("no feasible action")
            self.explored += 1
            return options[int(self.rng.integers(len(options)))]
        return self.greedy_action(f, feasible)

    # ---- learning -------------------------------------------------------

    def state_value(self, net: Network, e: Experience) -> float:
        """Bootstrap value of e.s_next under `net`.

        Enforced next steps leave no choice, so their value is shared by all
        actions; we read it as the mean output.  Otherwise double-Q applies:
        the online argmin is evaluated on `net`.
        """
        q = forward(net, e.s_next)
        if e.next_opportunistic:
            return float(q.mean())
        return float(q[self.greedy_action(e.s_next, e.feasible_next)])

    def compute_target(self, e: Experience) -> float:
        return e.r - self.avg_reward + self.state_value(self.target, e)

    def _q_taken(self, e: Experience) -> float:
        q = forward(self.online, e.s)
        if e.a == OPPORTUNISTIC:
            return float(q.mean())
        return float(q[e.a])

    def observe(self, e: Experience) -> None:
        """Push one experience and run the due parts of the update schedule."""
        if e.r < 0:
            raise ValueError("cycle cost must be nonnegative")
        self.replay.append(e)
        self.decisions += 1
        if e.greedy:
            self.update_avg_reward(e, self.compute_target(e))
        if self.decisions % self.cfg.train_period == 0:
            self._train_round()
        if self.decisions % self.cfg.sync_period == 0:
            self.sync()

    def observe_opportunistic(self, f, r: float, s_next,
                              feasible_next: tuple[bool, ...],
                              next_opportunistic: bool = False) -> None:
        """Record an enforced step; its target trains all outputs equally."""
        self.observe(Experience(f, OPPORTUNISTIC, r, s_next, feasible_next,
                                next_opportunistic, greedy=True))

    def update_avg_reward(self, e: Experience, y: float) -> None:
        self.avg_reward += self.cfg.beta * (y - self._q_taken(e))
        if not np.isfinite(self.avg_reward) or abs(self.avg_reward) > 1e6:
            raise DivergenceError(
                f"average reward diverged to {self.avg_reward!r}")

    def _sample_indices(self) -> np.ndarray:
        return self.rng.integers(len(self.replay), size=self.cfg.sample_size)

    def _train_round(self) -> None:
        buf = list(self.replay)
        batch = [buf[i] for i in self._sample_indices()]
        X = np.stack([e.s for e in batch])
        M = np.zeros((len(batch), self.n_actions), dtype=bool)
        T = np.zeros((len(batch), self.n_actions))
        for row, e in enumerate(batch):
            y = self.compute_target(e)
            if e.a == OPPORTUNISTIC:
                M[row, :] = True
                T[row, :] = y
            else:
                M[row, e.a] = True
                T[row, e.a] = y
        mb = self.cfg.minibatch_size
        for k in range(0, len(batch), mb):
            self.last_loss = train_batch(self.online, self.adam, X[k:k + mb],
                                         M[k:k + mb], T[k:k + mb])
        self.train_rounds += 1

    def sync(self) -> None:
        copy_weights(self.online, self.target)


@dataclass
class _Pending:
    """A decision whose next state (and possibly cost legs) are still ahead."""

    s: np.ndarray
    a: int
    greedy: bool
    r: float = 0.0


class AgentPolicy(StoragePolicy):
    """Simulator harness: assembles per-robot experiences around the core.

    Each robot's decision closes its previous open experience (the current
    features become that experience's next state), so every cycle's travel
    legs - even those reported only once a retrieval is later assigned -
    accrue before the experience is consumed.  Retrieval-only dispatch
    rewards with no open decision are dropped.  Open experiences persist
    across episodes: the task is continuing, with no terminal states.
    """

    def __init__(self, core: DifferentialQCore, turnover: TurnoverTable,
                 explore: bool = True, learn: bool = True):
        self.core = core
        self.turnover = turnover
        self.explore = explore
        self.learn = learn
        self.pending: dict[int, _Pending] = {}

    def _close(self, rid: int, f_next, mask_next,
               next_opportunistic: bool) -> None:
        p = self.pending.pop(rid, None)
        if p is not None:
            self.core.observe(Experience(p.s, p.a, p.r, f_next, mask_next,
                                         next_opportunistic, p.greedy))

    def choose(self, sim: Simulation, robot: RobotState, shelf: int,
               next_order: Optional[Order]) -> StorageChoice:
        f = extract_features(sim, shelf, next_order, self.turnover)
        mask = feasible_mask(sim)
        if not self.learn:
            return StorageChoice(self.core.select_action(f, mask, explore=False))
        self._close(robot.id, f, mask, next_opportunistic=False)
        a = self.core.select_action(f, mask, explore=self.explore)
        self.pending[robot.id] = _Pending(
            f, a, a == self.core.greedy_action(f, mask))
        return StorageChoice(a)

    def on_opportunistic(self, sim: Simulation, robot: RobotState,
                         order: Order) -> None:
        if not self.learn:
            return
        f = extract_features(sim, robot.carried, None, self.turnover,
                             opportunistic=True)
        mask = feasible_mask(sim)
        self._close(robot.id, f, mask, next_opportunistic=True)
        self.pending[robot.id] = _Pending(f, OPPORTUNISTIC, greedy=True)

    def on_reward(self, robot_id: int, travel: float, final: bool) -> None:
        p = self.pending.get(robot_id)
        if p is not None:
            p.r += travel


def evaluate_policy(lay: Layout, orders: list[Order], policy: StoragePolicy,
                    sim_seed: int) -> float:
    """Average storage-cycle travel of one episode under `policy`."""
    return run_episode(lay, orders, policy, seed=sim_seed).avg_travel_time


def train(agent_cfg: AgentConfig,
          layout_cfg: LayoutConfig = LayoutConfig(),
          demand_cfg: DemandConfig = DemandConfig(),
          progress: Optional[Callable[[int, float], None]] = None,
          ) -> tuple[Network, list[tuple[int, float]]]:
    """Train over fresh demand instances; return weights and learning curve.

    Episode j uses its own generated instance.  Every `eval_period` episodes
    the greedy policy is scored on one fixed held-out instance against a
    Random-policy reference, and (episode, gain_percent) is appended to the
    curve.  Raises DivergenceError if the loss turns non-finite or the
    average-cost estimate leaves [-1e6, 1e6].
    """
    lay = build_layout(layout_cfg)
    table = build_turnover_table(demand_cfg)
    core = DifferentialQCore(agent_cfg)
    policy = AgentPolicy(core, table, explore=True, learn=True)
    base = agent_cfg.seed

    eval_orders = generate_orders(replace(demand_cfg, seed=base + _EVAL_DEMAND))
    random_avg = evaluate_policy(lay, eval_orders,
                                 RandomPolicy(seed=base + _EVAL_POLICY),
                                 sim_seed=base + _EVAL_SIM)
    curve: list[tuple[int, float]] = []
    for j in range(agent_cfg.episodes):
        orders = generate_orders(
            replace(demand_cfg, seed=base + _TRAIN_DEMAND + j))
        sim = Simulation(lay, orders, policy, seed=base + _TRAIN_SIM + j)
        try:
            sim.run()
        except FloatingPointError as err:
            raise DivergenceError(
                f"training diverged in episode {j + 1} after "
                f"{core.decisions} decisions "
                f"(avg reward {core.avg_reward:.6g}): {err}") from err
        if (j + 1) % agent_cfg.eval_period == 0:
            greedy = AgentPolicy(core, table, explore=False, learn=False)
            avg = evaluate_policy(lay, eval_orders, greedy,
                                  sim_seed=base + _EVAL_SIM)
            gain = 100.0 * (random_avg - avg) / random_avg
            curve.append((j + 1, gain))
            if progress is not None:
                progress(j + 1, gain)
    return core.online, curve
