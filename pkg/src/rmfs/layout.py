"""Warehouse grid: storage blocks, aisles, zones, station, travel metrics.

The floor is a rectangular grid of cells. Storage cells hold one shelf each
and come in rectangular blocks surrounded on all four sides by one-cell-wide
aisles. A single picking station sits one cell below the bottom aisle.
Unloaded robots drive under shelves (Manhattan metric); loaded robots must
keep to aisles except for the first/last cell of a trip.
"""

from __future__ import annotations

import collections
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

AISLE = 0
STORAGE = 1
STATION = 2


class GridPosition(NamedTuple):
    col: int
    row: int


@dataclass(frozen=True)
class LayoutConfig:
    """Geometry and physical parameters of the storage area."""

    blocks_across: int = 3
    blocks_deep: int = 2
    block_cols: int = 2
    block_rows: int = 3
    cell_pitch: float = 1.0   # meters between adjacent cell centers
    speed: float = 0.6        # m/s, same loaded and unloaded
    pick_time: float = 8.0    # seconds per pick at the station
    handle_time: float = 3.0  # seconds per shelf load or unload


@dataclass(frozen=True)
class Zone:
    """One storage block, addressable as a macro storage decision."""

    id: int
    cells: tuple[GridPosition, ...]

    @property
    def capacity(self) -> int:
        return len(self.cells)


class Layout:
    """Immutable warehouse geometry with precomputed distance tables.

    Safe to share between concurrently running episodes; nothing here is
    mutated after construction.
    """

    def __init__(self, config: LayoutConfig, grid: np.ndarray,
                 zones: list[Zone], station: GridPosition):
        self.config = config
        self.grid = grid
        self.rows, self.cols = grid.shape
        self.zones = zones
        self.station = station
        self.cell_pitch = config.cell_pitch
        self.speed = config.speed
        self.pick_time = config.pick_time
        self.handle_time = config.handle_time

        self.storage_cells: tuple[GridPosition, ...] = tuple(
            GridPosition(c, r)
            for r in range(self.rows) for c in range(self.cols)
            if grid[r, c] == STORAGE)
        self.zone_of: dict[GridPosition, int] = {}
        for z in zones:
            for cell in z.cells:
                self.zone_of[cell] = z.id

        self._loaded_steps = self._compute_loaded_steps()
        # zone cells and all storage cells ordered by closeness to the station
        self._sorted_zone_cells: list[tuple[GridPosition, ...]] = [
            tuple(sorted(z.cells, key=self._station_order_key)) for z in zones]
        self.cells_by_station_distance: tuple[GridPosition, ...] = tuple(
            sorted(self.storage_cells, key=self._station_order_key))

    # ---- basic queries -------------------------------------------------

    def in_bounds(self, pos: GridPosition) -> bool:
        return 0 <= pos.col < self.cols and 0 <= pos.row < self.rows

    def kind(self, pos: GridPosition) -> int:
        if not self.in_bounds(pos):
            raise ValueError(f"position {pos} outside the grid")
        return int(self.grid[pos.row, pos.col])

    def _index(self, pos: GridPosition) -> int:
        return pos.row * self.cols + pos.col

    def _station_order_key(self, cell: GridPosition):
        return (self.unloaded_steps(cell, self.station), cell.row, cell.col)

    # ---- distances -----------------------------------------------------

    def unloaded_steps(self, a: GridPosition, b: GridPosition) -> int:
        """Grid steps between two cells for an unloaded robot."""
        if not self.in_bounds(a) or not self.in_bounds(b):
            raise ValueError(f"position outside the grid: {a} or {b}")
        return abs(a.col - b.col) + abs(a.row - b.row)

    def unloaded_distance(self, a: GridPosition, b: GridPosition) -> float:
        """Meters traveled by an unloaded robot (drives under shelves)."""
        return self.unloaded_steps(a, b) * self.cell_pitch

    def loaded_steps(self, a: GridPosition, b: GridPosition) -> int:
        """Grid steps of the shortest loaded path between two cells.

        Intermediate cells must be aisle or station; the endpoints may be
        storage cells (a loaded robot enters/leaves a storage cell from an
        adjacent aisle, the storage cell itself counting one step).
        """
        if not self.in_bounds(a) or not self.in_bounds(b):
            raise ValueError(f"position outside the grid: {a} or {b}")
        steps = int(self._loaded_steps[self._index(a), self._index(b)])
        if steps < 0:
            raise ValueError(f"no loaded path between {a} and {b}")
        return steps

    def loaded_distance(self, a: GridPosition, b: GridPosition) -> float:
        """Meters traveled by a loaded robot along aisles."""
        return self.loaded_steps(a, b) * self.cell_pitch

    def travel_time(self, distance: float) -> float:
        """Seconds to cover `distance` meters at the fleet speed."""
        if distance < 0:
            raise ValueError(f"negative distance: {distance}")
        return distance / self.speed

    def closest_open_location(self, occupied, zone_id: int) -> Optional[GridPosition]:
        """Nearest-to-station free cell of a zone, or None when full.

        Ties broken by (row, col). `occupied` is any container supporting
        membership tests on GridPosition.
        """
        for cell in self._sorted_zone_cells[zone_id]:
            if cell not in occupied:
                return cell
        return None

    # ---- construction helpers ------------------------------------------

    def _neighbors(self, pos: GridPosition):
        for dc, dr in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            q = GridPosition(pos.col + dc, pos.row + dr)
            if self.in_bounds(q):
                yield q

    def _compute_loaded_steps(self) -> np.ndarray:
        """All-pairs loaded step counts (aisle-graph BFS + entry/exit steps)."""
        n = self.rows * self.cols
        passable = [GridPosition(c, r)
                    for r in range(self.rows) for c in range(self.cols)
                    if self.grid[r, c] != STORAGE]
        aisle_dist: dict[GridPosition, dict[GridPosition, int]] = {}
        for src in passable:
            dist = {src: 0}
            queue = collections.deque([src])
            while queue:
                u = queue.popleft()
                for v in self._neighbors(u):
                    if self.grid[v.row, v.col] != STORAGE and v not in dist:
                        dist[v] = dist[u] + 1
                        queue.append(v)
            aisle_dist[src] = dist
        if any(len(aisle_dist[src]) != len(passable) for src in passable):
            raise ValueError("aisle graph is not connected")

        steps = np.full((n, n), -1, dtype=np.int32)
        for src in passable:
            i = self._index(src)
            for dst, d in aisle_dist[src].items():
                steps[i, self._index(dst)] = d

        entries = {cell: [q for q in self._neighbors(cell)
                          if self.grid[q.row, q.col] != STORAGE]
                   for cell in self.storage_cells}
        for cell in self.storage_cells:
            if not entries[cell]:
                raise ValueError(f"storage cell {cell} has no adjacent aisle")

        for cell in self.storage_cells:
            i = self._index(cell)
            for dst in passable:
                j = self._index(dst)
                best = min(1 + aisle_dist[e][dst] for e in entries[cell])
                steps[i, j] = best
                steps[j, i] = best
        for a in self.storage_cells:
            i = self._index(a)
            for b in self.storage_cells:
                j = self._index(b)
                if i == j:
                    steps[i, j] = 0
                    continue
                best = min(2 + aisle_dist[ea][eb]
                           for ea in entries[a] for eb in entries[b])
                if self.unloaded_steps(a, b) == 1:
                    best = min(best, 1)  # direct hop, empty intermediate set
                steps[i, j] = best
        return steps


def build_layout(config: LayoutConfig = LayoutConfig()) -> Layout:
    """Construct the layout described by `config`.

    Blocks are laid out `blocks_across` x `blocks_deep` with one-cell aisles
    on all four sides of every block; the station sits one cell below the
    bottom aisle at the centered column. Zone ids are assigned by
    nondecreasing unloaded distance from block centroid to station.
    """
    cols = config.blocks_across * (config.block_cols + 1) + 1
    rows = config.blocks_deep * (config.block_rows + 1) + 1 + 1  # +station row
    grid = np.full((rows, cols), AISLE, dtype=np.int8)

    blocks: list[tuple[float, float, list[GridPosition]]] = []
    for bd in range(config.blocks_deep):
        for ba in range(config.blocks_across):
            c0 = 1 + ba * (config.block_cols + 1)
            r0 = 1 + bd * (config.block_rows + 1)
            cells = [GridPosition(c, r)
                     for r in range(r0, r0 + config.block_rows)
                     for c in range(c0, c0 + config.block_cols)]
            for cell in cells:
                grid[cell.row, cell.col] = STORAGE
            centroid = (c0 + (config.block_cols - 1) / 2.0,
                        r0 + (config.block_rows - 1) / 2.0)
            blocks.append((centroid[0], centroid[1], cells))

    station = GridPosition(cols // 2, rows - 1)
    grid[station.row, station.col] = STATION

    def centroid_key(block):
        cx, cy, _ = block
        dist = abs(cx - station.col) + abs(cy - station.row)
        return (dist, cy, cx)

    zones = [Zone(zid, tuple(cells))
             for zid, (_, _, cells) in enumerate(sorted(blocks, key=centroid_key))]
    return Layout(config, grid, zones, station)


def build_default_layout() -> Layout:
    return build_layout(LayoutConfig())
