"""Classic real-time storage policies: random, class-based, shortest leg."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .demand import DemandConfig, Order, all_rates
from .layout import GridPosition, Layout
from .sim import RobotState, Simulation, StorageChoice, StoragePolicy


@dataclass(frozen=True)
class TurnoverTable:
    """Per-shelf demand intensity: raw rate (units/period) and rank in [0,1].

    Rank 1.0 marks the fastest-moving shelf. Ranks are a permutation of
    {0, 1/(m-1), ..., 1}; rate ties break toward the lower shelf id.
    """

    rates: tuple[float, ...]
    ranks: tuple[float, ...]

    @property
    def m(self) -> int:
        return len(self.rates)


def table_from_rates(rates) -> TurnoverTable:
    m = len(rates)
    order = sorted(range(m), key=lambda i: (-rates[i], i))
    ranks = [0.0] * m
    for pos, item in enumerate(order):
        ranks[item] = 1.0 - pos / (m - 1) if m > 1 else 1.0
    return TurnoverTable(rates=tuple(float(r) for r in rates),
                         ranks=tuple(ranks))


def build_turnover_table(cfg: DemandConfig) -> TurnoverTable:
    return table_from_rates(all_rates(cfg))


class RandomPolicy(StoragePolicy):
    """Equal probability for every open location on the floor.

    The chosen zone is therefore drawn with probability proportional to its
    free-cell count.
    """

    def __init__(self, seed: int):
        self.rng = np.random.default_rng(seed)

    def choose(self, sim: Simulation, robot: RobotState, shelf: int,
               next_order: Order | None) -> StorageChoice:
        free = sim.free_cells(sim.layout.storage_cells)
        cell = free[int(self.rng.integers(len(free)))]
        return StorageChoice(sim.layout.zone_of[cell], cell)


class ClassBasedPolicy(StoragePolicy):
    """Three turnover classes mapped to concentric bands of cells.

    Shelves and cells are both split 20/30/50%: shelves by turnover rank,
    cells into concentric bands by unloaded distance to the station. A shelf
    goes to a uniformly random free cell of its band, spilling to the
    nearest band with space.
    """

    def __init__(self, layout: Layout, turnover: TurnoverTable, seed: int):
        self.rng = np.random.default_rng(seed)
        m = turnover.m
        n_a = round(0.2 * m)
        n_b = round(0.3 * m)
        by_rank = sorted(range(m), key=lambda i: -turnover.ranks[i])
        self.shelf_class = [0] * m
        for pos, shelf in enumerate(by_rank):
            self.shelf_class[shelf] = 0 if pos < n_a else (1 if pos < n_a + n_b else 2)
        cells = layout.cells_by_station_distance
        nc = len(cells)
        b1 = round(0.2 * nc)
        b2 = round(0.3 * nc)
        self.bands: list[tuple[GridPosition, ...]] = [
            cells[:b1], cells[b1:b1 + b2], cells[b1 + b2:]]

    def choose(self, sim: Simulation, robot: RobotState, shelf: int,
               next_order: Order | None) -> StorageChoice:
        home = self.shelf_class[shelf]
        for band_id in sorted(range(3), key=lambda b: (abs(b - home), b)):
            free = sim.free_cells(self.bands[band_id])
            if free:
                cell = free[int(self.rng.integers(len(free)))]
                return StorageChoice(sim.layout.zone_of[cell], cell)
        raise RuntimeError("no free cell in any band")


class ShortestLegPolicy(StoragePolicy):
    """Minimize store leg plus the interleaving leg to the next retrieval.

    Each zone is represented by its closest open location; cost is the loaded
    distance station->candidate plus the unloaded distance candidate->next
    retrieval shelf (absent a known retrieval, the store leg alone). Ties go
    to the lower zone id.
    """

    def choose(self, sim: Simulation, robot: RobotState, shelf: int,
               next_order: Order | None) -> StorageChoice:
        lay = sim.layout
        target = (sim.shelf_cell[next_order.item]
                  if next_order is not None else None)
        best_zone, best_cost = -1, None
        for z in lay.zones:
            if sim.zone_available(z.id) <= 0:
                continue
            cand = sim.closest_open(z.id)
            cost = lay.loaded_distance(lay.station, cand)
            if target is not None:
                cost += lay.unloaded_distance(cand, target)
            if best_cost is None or cost < best_cost:
                best_zone, best_cost = z.id, cost
        return StorageChoice(best_zone)
