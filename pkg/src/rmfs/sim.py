"""Discrete-event warehouse simulator with dual-command robot cycles.

Robots alternate storage and retrieval legs: after a pick at the station the
robot stores its carried shelf at a zone chosen by the storage policy, drives
(unloaded) to the shelf of the next order, and brings it back to the single
FIFO picking station. Orders for a shelf that is already on a robot are taken
opportunistically: the robot re-queues at the station without storing first.

Timing model: travel = distance / speed, plus a fixed handle time per shelf
load/unload and a fixed pick time per order unit at the station. Waiting in
the station queue costs time but never counts as travel.

All ties are broken deterministically: same-timestamp events process order
arrivals first, then robot events in robot-id order.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .demand import Order
from .layout import GridPosition, Layout

# event kinds
_ARRIVAL = 0
_STORE_DONE = 1
_RETRIEVE_ARRIVE = 2
_ARRIVE_STATION = 3
_PICK_DONE = 4
_DECIDE_STORAGE = 5

# shelf states
SHELF_STORED = 0    # on the floor, free to be targeted
SHELF_RESERVED = 1  # on the floor, a robot is committed to fetch it
SHELF_CARRIED = 2   # on a robot


class SimContractError(RuntimeError):
    """A policy or caller violated the simulator's preconditions."""


class SimStallError(RuntimeError):
    """The episode cannot make progress (diagnostic guard)."""


class StorageChoice(NamedTuple):
    """A storage decision: target zone, optionally an exact cell in it."""

    zone: int
    cell: Optional[GridPosition] = None


class StoragePolicy:
    """Interface consulted at every storage decision.

    `choose` must return a feasible zone (>= 1 available cell). The optional
    hooks let learning policies track opportunistic tasks and the travel of
    the cycle each decision started; `final=False` rewards are partial (the
    retrieval part of the cycle was not known yet) and are later completed by
    a second call with the remainder.
    """

    def choose(self, sim: "Simulation", robot: "RobotState", shelf: int,
               next_order: Optional[Order]) -> StorageChoice:
        raise NotImplementedError

    def on_opportunistic(self, sim: "Simulation", robot: "RobotState",
                         order: Order) -> None:
        pass

    def on_reward(self, robot_id: int, travel: float, final: bool) -> None:
        pass


class DecisionObserver:
    """Hook surface used by look-ahead rollouts to drive a cloned simulator."""

    def before_decision(self, sim: "Simulation", robot: "RobotState") -> bool:
        """Return False to halt the run before this decision is made."""
        return True

    def after_decision(self, robot_id: int) -> None:
        pass

    def on_opportunistic(self, robot_id: int) -> None:
        pass

    def on_reward(self, robot_id: int, travel: float) -> None:
        pass


@dataclass
class RobotState:
    id: int
    pos: GridPosition
    carried: int = -1          # shelf id, -1 when unloaded
    committed: int = -1        # order id this robot will fulfil next
    target_cell: Optional[GridPosition] = None
    store_cell: Optional[GridPosition] = None
    idle: bool = False
    cycle_travel: float = 0.0
    cycle_zone: int = -1
    cycle_opp: bool = False
    cycle_storage: bool = False

    def clone(self) -> "RobotState":
        return RobotState(self.id, self.pos, self.carried, self.committed,
                          self.target_cell, self.store_cell, self.idle,
                          self.cycle_travel, self.cycle_zone, self.cycle_opp,
                          self.cycle_storage)

    def fingerprint(self):
        return (self.id, self.pos, self.carried, self.committed,
                self.target_cell, self.store_cell, self.idle,
                self.cycle_travel, self.cycle_zone, self.cycle_opp,
                self.cycle_storage)


@dataclass
class VisitRecord:
    """One completed station visit (= one cycle)."""

    clock: float
    robot: int
    shelf: int
    zone: int            # storage zone the cycle started with, -1 if none
    travel: float        # seconds of travel in the cycle, waiting excluded
    opportunistic: bool


@dataclass
class EpisodeMetrics:
    """Travel statistics of one episode, first `warmup` visits excluded.

    `avg_travel_time` divides by storage cycles only; opportunistic visits
    contribute zero travel and are reported separately (and folded into
    `avg_travel_per_visit`).
    """

    total_travel: float
    storage_travel: float
    storage_cycles: int
    visits: int
    opportunistic_visits: int
    avg_travel_time: float
    avg_travel_per_visit: float
    finish_clock: float
    log: Optional[list[VisitRecord]] = None


@dataclass(frozen=True)
class SimConfig:
    warmup_cycles: int = 100
    shelves: Optional[int] = None      # default: storage capacity - 2
    check_invariants: bool = False
    record_log: bool = False
    max_clock: Optional[float] = None


class Simulation:
    """Mutable episode state plus the event loop that advances it."""

    def __init__(self, layout: Layout, orders: list[Order],
                 policy: StoragePolicy, seed: int,
                 config: SimConfig = SimConfig()):
        self.layout = layout
        self.orders = orders
        self.policy = policy
        self.config = config
        self.observer: Optional[DecisionObserver] = None

        n_cells = len(layout.storage_cells)
        self.n_shelves = config.shelves if config.shelves is not None else n_cells - 2
        if self.n_shelves > n_cells:
            raise SimContractError("more shelves than storage cells")
        for o in orders:
            if not 0 <= o.item < self.n_shelves:
                raise SimContractError(f"order {o.id} wants unknown shelf {o.item}")

        self.clock = 0.0
        self.seq = 0
        self.heap: list[tuple] = []
        self.halted = False
        self.complete = not orders

        # shelves: uniformly random initial placement, determined by seed
        rng = np.random.default_rng(seed)
        placement = rng.choice(n_cells, size=self.n_shelves, replace=False)
        self.shelf_cell: list[Optional[GridPosition]] = [
            layout.storage_cells[i] for i in placement]
        self.shelf_state = bytearray([SHELF_STORED] * self.n_shelves)
        self.occupied: set[GridPosition] = set(self.shelf_cell)
        self.reserved_cells: set[GridPosition] = set()
        nz = len(layout.zones)
        self.stored_per_zone = [0] * nz
        self.reserved_per_zone = [0] * nz
        self.inbound_per_zone = [0] * nz
        for cell in self.shelf_cell:
            self.stored_per_zone[layout.zone_of[cell]] += 1

        self.robots = [RobotState(i, layout.station, idle=True)
                       for i in range(5)]

        # revealed, unassigned, unfulfilled orders: one deadline-heap per item
        # plus a lazily refreshed index heap over the per-item heads
        self.pending: dict[int, list[tuple[float, int]]] = {
            i: [] for i in range(self.n_shelves)}
        self.item_heads: list[tuple[float, int, int]] = []
        self.assigned: dict[int, int] = {}
        self.fulfilled = bytearray(len(orders))
        self.unfulfilled = len(orders)
        self.next_order_idx = 0

        self.station_queue: deque[int] = deque()
        self.operator_busy = False

        self.visit_index = 0
        self.total_travel = 0.0
        self.storage_travel = 0.0
        self.storage_cycles = 0
        self.counted_visits = 0
        self.opp_visits = 0
        self.log: Optional[list[VisitRecord]] = [] if config.record_log else None

        self._last_clock = 0.0
        if orders:
            self._push(orders[0].arrival, 0, -1, _ARRIVAL)

    # ---- event plumbing ------------------------------------------------

    def _push(self, time: float, cls: int, rid: int, kind: int) -> None:
        self.seq += 1
        heapq.heappush(self.heap, (time, cls, rid, self.seq, kind))

    def schedule_decision(self, robot_id: int) -> None:
        """Queue a storage decision for `robot_id` at the current clock."""
        self._push(self.clock, 1, robot_id, _DECIDE_STORAGE)

    def run(self, max_events: Optional[int] = None) -> "Simulation":
        """Process events until the episode completes (or halts)."""
        handlers = {
            _ARRIVAL: self._handle_arrival,
            _STORE_DONE: self._handle_store_done,
            _RETRIEVE_ARRIVE: self._handle_retrieve_arrive,
            _ARRIVE_STATION: self._handle_arrive_station,
            _PICK_DONE: self._handle_pick_done,
            _DECIDE_STORAGE: self._handle_decide,
        }
        n = 0
        while self.heap and not self.complete and not self.halted:
            if max_events is not None and n >= max_events:
                break
            time, _cls, rid, _seq, kind = heapq.heappop(self.heap)
            if time < self.clock - 1e-9:
                raise SimStallError("event queue went backwards in time")
            self.clock = time
            handlers[kind](rid)
            if self.config.max_clock is not None and self.clock > self.config.max_clock:
                raise SimStallError(f"clock passed max_clock with "
                                    f"{self.unfulfilled} orders unfulfilled")
            if self.config.check_invariants:
                self._verify()
            n += 1
        if not self.heap and not self.complete and not self.halted:
            if self.unfulfilled == 0:
                # all revealed work was already done when arrivals were frozen
                self.complete = True
            else:
                raise SimStallError(f"no events left but {self.unfulfilled} "
                                    "orders unfulfilled")
        return self

    # ---- pending-order index -------------------------------------------

    def _reveal(self, order: Order) -> None:
        heap = self.pending[order.item]
        entry = (order.deadline, order.id)
        heapq.heappush(heap, entry)
        if heap[0] == entry:
            heapq.heappush(self.item_heads, (order.deadline, order.id, order.item))

    def peek_next_retrieval(self) -> Optional[Order]:
        """Earliest-deadline eligible order, or None. Does not mutate."""
        stash = []
        result = None
        while self.item_heads:
            dl, oid, item = heapq.heappop(self.item_heads)
            heap = self.pending[item]
            if not heap or heap[0] != (dl, oid):
                continue  # stale index entry
            stash.append((dl, oid, item))
            if self.shelf_state[item] == SHELF_STORED:
                result = self.orders[oid]
                break
        for entry in stash:
            heapq.heappush(self.item_heads, entry)
        return result

    def _assign(self, robot: RobotState, order: Order) -> None:
        """Pop `order` (a per-item head) from pending and tie it to `robot`."""
        heap = self.pending[order.item]
        _dl, oid = heapq.heappop(heap)
        if oid != order.id:
            raise SimContractError("commit target is not the per-item head")
        if heap:
            heapq.heappush(self.item_heads, (heap[0][0], heap[0][1], order.item))
        self.assigned[order.id] = robot.id
        robot.committed = order.id

    def _commit(self, robot: RobotState, order: Order) -> None:
        """Assign `order` to `robot` and reserve its stored shelf."""
        if self.shelf_state[order.item] != SHELF_STORED:
            raise SimContractError("committing to a blocked shelf")
        self._assign(robot, order)
        self.shelf_state[order.item] = SHELF_RESERVED
        robot.target_cell = self.shelf_cell[order.item]

    def check_opportunistic(self, robot: RobotState) -> Optional[Order]:
        """Pending order satisfiable from the carried shelf, if it is next up.

        The external sequencer serves orders by increasing deadline, so the
        robot keeps its shelf only when the carried item's earliest order
        precedes every stored-shelf order in (deadline, id) order; otherwise
        the shelf must be stored and the sequence followed.
        """
        if robot.carried < 0:
            return None
        heap = self.pending[robot.carried]
        if not heap:
            return None
        stored_head = self.peek_next_retrieval()
        if stored_head is None or heap[0] < (stored_head.deadline, stored_head.id):
            return self.orders[heap[0][1]]
        return None

    # ---- derived views --------------------------------------------------

    def zone_available(self, zone_id: int) -> int:
        z = self.layout.zones[zone_id]
        return z.capacity - self.stored_per_zone[zone_id] - self.reserved_per_zone[zone_id]

    def feasible_zones(self) -> list[int]:
        return [z.id for z in self.layout.zones if self.zone_available(z.id) > 0]

    def cell_taken(self, cell: GridPosition) -> bool:
        return cell in self.occupied or cell in self.reserved_cells

    def closest_open(self, zone_id: int) -> Optional[GridPosition]:
        taken = self.occupied | self.reserved_cells
        return self.layout.closest_open_location(taken, zone_id)

    def free_cells(self, cells) -> list[GridPosition]:
        return [c for c in cells if not self.cell_taken(c)]

    # ---- handlers -------------------------------------------------------

    def _handle_arrival(self, _rid: int) -> None:
        orders = self.orders
        while (self.next_order_idx < len(orders)
               and orders[self.next_order_idx].arrival == self.clock):
            self._reveal(orders[self.next_order_idx])
            self.next_order_idx += 1
        if self.next_order_idx < len(orders):
            self._push(orders[self.next_order_idx].arrival, 0, -1, _ARRIVAL)
        for robot in self.robots:
            if robot.idle:
                self._try_dispatch(robot)

    def _try_dispatch(self, robot: RobotState) -> None:
        """Give an idle unloaded robot its next retrieval, if any is eligible."""
        order = self.peek_next_retrieval()
        if order is None:
            return
        self._commit(robot, order)
        robot.idle = False
        self._depart_for_retrieval(robot, report_reward=True)

    def _depart_for_retrieval(self, robot: RobotState, report_reward: bool) -> None:
        lay = self.layout
        target = robot.target_cell
        self.inbound_per_zone[lay.zone_of[target]] += 1
        leg_ii = lay.travel_time(lay.unloaded_distance(robot.pos, target))
        self._push(self.clock + leg_ii, 1, robot.id, _RETRIEVE_ARRIVE)
        if report_reward:
            # retrieval legs were unknown when this cycle's storage decision
            # was made; report them now to close the cycle's reward
            leg_iii = lay.travel_time(lay.loaded_distance(target, lay.station))
            self._report_reward(robot.id, leg_ii + leg_iii, final=True)

    def _handle_store_done(self, rid: int) -> None:
        robot = self.robots[rid]
        lay = self.layout
        cell = robot.store_cell
        zone = lay.zone_of[cell]
        self.reserved_cells.remove(cell)
        self.reserved_per_zone[zone] -= 1
        self.occupied.add(cell)
        self.stored_per_zone[zone] += 1
        shelf = robot.carried
        robot.carried = -1
        self.shelf_cell[shelf] = cell
        self.shelf_state[shelf] = SHELF_STORED
        robot.cycle_travel += lay.travel_time(lay.loaded_distance(lay.station, cell))
        robot.pos = cell
        robot.store_cell = None

        if robot.committed >= 0:
            self._depart_for_retrieval(robot, report_reward=False)
        else:
            order = self.peek_next_retrieval()
            if order is not None:
                self._commit(robot, order)
                self._depart_for_retrieval(robot, report_reward=True)
            else:
                robot.idle = True
        # the stored shelf may unblock orders other idle robots can take
        for other in self.robots:
            if other.idle and other.id != rid:
                self._try_dispatch(other)

    def _handle_retrieve_arrive(self, rid: int) -> None:
        robot = self.robots[rid]
        lay = self.layout
        cell = robot.target_cell
        zone = lay.zone_of[cell]
        self.inbound_per_zone[zone] -= 1
        robot.cycle_travel += lay.travel_time(lay.unloaded_distance(robot.pos, cell))
        robot.pos = cell
        shelf = self.orders[robot.committed].item
        self.occupied.remove(cell)
        self.stored_per_zone[zone] -= 1
        self.shelf_cell[shelf] = None
        self.shelf_state[shelf] = SHELF_CARRIED
        robot.carried = shelf
        robot.target_cell = None
        ride = lay.handle_time + lay.travel_time(lay.loaded_distance(cell, lay.station))
        self._push(self.clock + ride, 1, rid, _ARRIVE_STATION)

    def _handle_arrive_station(self, rid: int) -> None:
        robot = self.robots[rid]
        lay = self.layout
        robot.cycle_travel += lay.travel_time(
            lay.loaded_distance(robot.pos, lay.station))
        robot.pos = lay.station
        self.station_queue.append(rid)
        self._maybe_start_pick()

    def _maybe_start_pick(self) -> None:
        if self.operator_busy or not self.station_queue:
            return
        rid = self.station_queue.popleft()
        robot = self.robots[rid]
        order = self.orders[robot.committed]
        self.operator_busy = True
        self._push(self.clock + order.group_size * self.layout.pick_time,
                   1, rid, _PICK_DONE)

    def _handle_pick_done(self, rid: int) -> None:
        robot = self.robots[rid]
        order = self.orders[robot.committed]
        self.fulfilled[order.id] = 1
        del self.assigned[order.id]
        robot.committed = -1
        self.unfulfilled -= 1
        self.operator_busy = False

        self._record_visit(robot)

        if self.unfulfilled == 0 and self.next_order_idx >= len(self.orders):
            self.complete = True
            return

        opp = self.check_opportunistic(robot)
        if opp is not None:
            self._assign(robot, opp)  # shelf already on this robot
            robot.cycle_opp = True
            robot.cycle_zone = -1
            robot.cycle_storage = False
            self.policy.on_opportunistic(self, robot, opp)
            if self.observer is not None:
                self.observer.on_opportunistic(rid)
            self._report_reward(rid, 0.0, final=True)
            self.station_queue.append(rid)
        else:
            self.schedule_decision(rid)
        self._maybe_start_pick()

    def _record_visit(self, robot: RobotState) -> None:
        self.visit_index += 1
        if self.visit_index > self.config.warmup_cycles:
            self.counted_visits += 1
            self.total_travel += robot.cycle_travel
            if robot.cycle_opp:
                self.opp_visits += 1
            elif robot.cycle_storage:
                self.storage_cycles += 1
                self.storage_travel += robot.cycle_travel
            if self.log is not None:
                self.log.append(VisitRecord(
                    self.clock, robot.id, robot.carried, robot.cycle_zone,
                    robot.cycle_travel, robot.cycle_opp))
        robot.cycle_travel = 0.0
        robot.cycle_zone = -1
        robot.cycle_opp = False
        robot.cycle_storage = False

    def _handle_decide(self, rid: int) -> None:
        robot = self.robots[rid]
        if self.observer is not None:
            if not self.observer.before_decision(self, robot):
                self.halted = True
                return
        lay = self.layout
        next_order = self.peek_next_retrieval()
        feasible = self.feasible_zones()
        if not feasible:
            raise SimStallError("no feasible storage zone")

        choice = self.policy.choose(self, robot, robot.carried, next_order)
        zone = choice.zone
        if zone not in range(len(lay.zones)) or self.zone_available(zone) <= 0:
            raise SimContractError(f"policy chose infeasible zone {zone}")
        if choice.cell is not None:
            cell = choice.cell
            if lay.zone_of.get(cell) != zone or self.cell_taken(cell):
                raise SimContractError(f"policy chose unusable cell {cell}")
        else:
            cell = self.closest_open(zone)

        if next_order is not None:
            self._commit(robot, next_order)
        self.reserved_cells.add(cell)
        self.reserved_per_zone[zone] += 1
        robot.store_cell = cell
        robot.cycle_zone = zone
        robot.cycle_storage = True
        robot.cycle_opp = False

        leg_i = lay.travel_time(lay.loaded_distance(lay.station, cell))
        self._push(self.clock + leg_i + lay.handle_time, 1, rid, _STORE_DONE)
        if next_order is not None:
            target = robot.target_cell
            legs = (leg_i
                    + lay.travel_time(lay.unloaded_distance(cell, target))
                    + lay.travel_time(lay.loaded_distance(target, lay.station)))
            self._report_reward(rid, legs, final=True)
        else:
            self._report_reward(rid, leg_i, final=False)
        if self.observer is not None:
            self.observer.after_decision(rid)

    def _report_reward(self, rid: int, travel: float, final: bool) -> None:
        self.policy.on_reward(rid, travel, final)
        if self.observer is not None:
            self.observer.on_reward(rid, travel)

    # ---- snapshot / restore ---------------------------------------------

    def snapshot(self) -> "Simulation":
        """Cheap deep-enough copy: orders and layout are shared, state is not."""
        new = object.__new__(Simulation)
        new.layout = self.layout
        new.orders = self.orders
        new.policy = self.policy
        new.config = self.config
        new.observer = None
        new.n_shelves = self.n_shelves
        new.clock = self.clock
        new.seq = self.seq
        new.heap = list(self.heap)
        new.halted = self.halted
        new.complete = self.complete
        new.shelf_cell = list(self.shelf_cell)
        new.shelf_state = bytearray(self.shelf_state)
        new.occupied = set(self.occupied)
        new.reserved_cells = set(self.reserved_cells)
        new.stored_per_zone = list(self.stored_per_zone)
        new.reserved_per_zone = list(self.reserved_per_zone)
        new.inbound_per_zone = list(self.inbound_per_zone)
        new.robots = [r.clone() for r in self.robots]
        new.pending = {item: list(h) for item, h in self.pending.items()}
        new.item_heads = list(self.item_heads)
        new.assigned = dict(self.assigned)
        new.fulfilled = bytearray(self.fulfilled)
        new.unfulfilled = self.unfulfilled
        new.next_order_idx = self.next_order_idx
        new.station_queue = deque(self.station_queue)
        new.operator_busy = self.operator_busy
        new.visit_index = self.visit_index
        new.total_travel = self.total_travel
        new.storage_travel = self.storage_travel
        new.storage_cycles = self.storage_cycles
        new.counted_visits = self.counted_visits
        new.opp_visits = self.opp_visits
        new.log = list(self.log) if self.log is not None else None
        new._last_clock = self._last_clock
        return new

    def freeze_arrivals(self) -> None:
        """Drop all future order arrivals (look-ahead sees revealed orders only)."""
        dropped = len(self.orders) - self.next_order_idx
        self.heap = [ev for ev in self.heap if ev[4] != _ARRIVAL]
        heapq.heapify(self.heap)
        self.next_order_idx = len(self.orders)
        self.unfulfilled -= dropped

    def state_fingerprint(self):
        return (self.clock, self.complete, self.halted,
                tuple(r.fingerprint() for r in self.robots),
                tuple(self.shelf_cell), bytes(self.shelf_state),
                tuple(sorted(self.heap)),
                tuple(self.stored_per_zone), tuple(self.reserved_per_zone),
                tuple(self.inbound_per_zone),
                tuple(sorted((i, tuple(sorted(h)))
                             for i, h in self.pending.items() if h)),
                tuple(sorted(self.assigned.items())), bytes(self.fulfilled),
                self.unfulfilled, self.next_order_idx,
                tuple(self.station_queue), self.operator_busy,
                self.visit_index, self.total_travel, self.storage_travel,
                self.storage_cycles, self.counted_visits, self.opp_visits)

    def __eq__(self, other):
        if not isinstance(other, Simulation):
            return NotImplemented
        return self.state_fingerprint() == other.state_fingerprint()

    __hash__ = None

    # ---- invariants ------------------------------------------------------

    def _verify(self) -> None:
        assert self.clock >= self._last_clock - 1e-9
        self._last_clock = self.clock
        carried = {}
        for r in self.robots:
            if r.carried >= 0:
                assert r.carried not in carried, "shelf on two robots"
                carried[r.carried] = r.id
        stored_cells = set()
        per_zone = [0] * len(self.layout.zones)
        for shelf in range(self.n_shelves):
            state = self.shelf_state[shelf]
            cell = self.shelf_cell[shelf]
            if state == SHELF_CARRIED:
                assert cell is None and shelf in carried
            else:
                assert cell is not None and shelf not in carried
                stored_cells.add(cell)
                per_zone[self.layout.zone_of[cell]] += 1
        assert stored_cells == self.occupied
        assert per_zone == self.stored_per_zone
        assert len(stored_cells) + len(carried) == self.n_shelves
        res_zone = [0] * len(self.layout.zones)
        for cell in self.reserved_cells:
            assert cell not in self.occupied
            res_zone[self.layout.zone_of[cell]] += 1
        assert res_zone == self.reserved_per_zone
        total_avail = sum(self.zone_available(z.id) for z in self.layout.zones)
        assert total_avail >= 2, "fewer than two cells available"
        for item, heap in self.pending.items():
            for _dl, oid in heap:
                assert not self.fulfilled[oid]
                assert oid not in self.assigned
                assert self.orders[oid].item == item
        for rid in self.station_queue:
            assert self.robots[rid].pos == self.layout.station

    # ---- results ---------------------------------------------------------

    def metrics(self) -> EpisodeMetrics:
        cycles = self.storage_cycles
        visits = self.counted_visits
        return EpisodeMetrics(
            total_travel=self.total_travel,
            storage_travel=self.storage_travel,
            storage_cycles=cycles,
            visits=visits,
            opportunistic_visits=self.opp_visits,
            avg_travel_time=self.storage_travel / cycles if cycles else 0.0,
            avg_travel_per_visit=self.total_travel / visits if visits else 0.0,
            finish_clock=self.clock,
            log=self.log)


def run_episode(layout: Layout, orders: list[Order], policy: StoragePolicy,
                seed: int, config: SimConfig = SimConfig()) -> EpisodeMetrics:
    """Simulate one episode to completion and return its travel metrics."""
    sim = Simulation(layout, orders, policy, seed, config)
    sim.run()
    return sim.metrics()
