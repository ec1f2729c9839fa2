"""Dungeon evaluation: reachability, tile measures, binning, and the solver.

Room tiles are 0 floor, 1 wall-like, 2 water; only floor is walkable. A
dungeon is an up-to MxN grid of 16x11 rooms whose 12x7 interiors sit inside
a two-tile wall ring. Doors are carved through the shared ring at the middle
of each touching edge. The solver searches cell by cell with key handling
under a hard budget of expanded states.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from .encodings import (
    DOOR_LOCKED,
    DOOR_NONE,
    DOOR_SOFT_LOCKED,
    ZELDA_INTERIOR_COLS,
    ZELDA_INTERIOR_ROWS,
    ZELDA_ROOM_HEIGHT,
    ZELDA_ROOM_WIDTH,
    DungeonLayout,
)

ZELDA_TILESET = 3
FLOOR, WALL, WATER = 0, 1, 2

SOLVER_BUDGET = 100_000

# Door tunnels through the two-tile wall ring, in room-local (row, col)
# coordinates: a right door exits at the middle row, a down door at the
# middle column.
_DOOR_ROW = ZELDA_ROOM_HEIGHT // 2
_DOOR_COL = ZELDA_ROOM_WIDTH // 2
RIGHT_DOOR_CELLS = ((_DOOR_ROW, 14), (_DOOR_ROW, 15))
RIGHT_DOOR_FAR_CELLS = ((_DOOR_ROW, 0), (_DOOR_ROW, 1))
DOWN_DOOR_CELLS = ((9, _DOOR_COL), (10, _DOOR_COL))
DOWN_DOOR_FAR_CELLS = ((0, _DOOR_COL), (1, _DOOR_COL))


class EvaluationError(Exception):
    """The individual cannot be measured and must be discarded."""


def reachable_rooms(layout: DungeonLayout) -> set[tuple[int, int]]:
    """Rooms connected to the start by any chain of doors, of any kind."""
    if layout.start is None:
        return set()
    seen = {layout.start}
    frontier = [layout.start]
    while frontier:
        i, j = frontier.pop()
        neighbors = []
        if layout.doors_right[i][j] != DOOR_NONE:
            neighbors.append((i, j + 1))
        if layout.doors_down[i][j] != DOOR_NONE:
            neighbors.append((i + 1, j))
        if j > 0 and layout.doors_right[i][j - 1] != DOOR_NONE:
            neighbors.append((i, j - 1))
        if i > 0 and layout.doors_down[i - 1][j] != DOOR_NONE:
            neighbors.append((i - 1, j))
        for room in neighbors:
            if room not in seen:
                seen.add(room)
                frontier.append(room)
    return seen


def water_wall_percentages(
    layout: DungeonLayout, reachable: set[tuple[int, int]] | None = None
) -> tuple[float, float]:
    """Water and wall percentages over the interiors of reachable rooms."""
    if reachable is None:
        reachable = reachable_rooms(layout)
    if not reachable:
        raise EvaluationError("no reachable rooms to measure")
    water = wall = total = 0
    for i, j in reachable:
        interior = layout.rooms[i][j].cells[ZELDA_INTERIOR_ROWS, ZELDA_INTERIOR_COLS]
        water += int((interior == WATER).sum())
        wall += int((interior == WALL).sum())
        total += interior.size
    return 100.0 * water / total, 100.0 * wall / total


def zelda_bin(water_pct: float, wall_pct: float, reachable_count: int) -> tuple[int, int, int]:
    """10% ranges for the tile measures, one bin per reachable-room count."""
    water_bin = min(int(water_pct // 10.0), 9)
    wall_bin = min(int(wall_pct // 10.0), 9)
    return water_bin, wall_bin, reachable_count


@dataclass
class DungeonSolution:
    rooms: list[tuple[int, int]]  # consecutive distinct rooms along the path
    cells: list[tuple[int, int]]  # global (row, col) cell trace
    expanded: int

    @property
    def distinct_rooms(self) -> set[tuple[int, int]]:
        return set(self.rooms)

    def __len__(self) -> int:
        return len(self.cells) - 1


def _build_canvas(layout: DungeonLayout, soft_locked_open: bool):
    """Flatten the dungeon onto one walkability canvas.

    Returns (passage, lock_cells, n_locks): ``passage`` holds 0 for blocked
    cells and 1 for freely walkable cells; locked-door tunnel cells appear in
    ``lock_cells`` as cell -> lock index and are blocked until opened.
    """
    rh, rw = ZELDA_ROOM_HEIGHT, ZELDA_ROOM_WIDTH
    height = layout.grid_rows * rh
    width = layout.grid_cols * rw
    passage = np.zeros((height, width), dtype=np.uint8)
    lock_cells: dict[tuple[int, int], int] = {}
    n_locks = 0

    for i, j in layout.present_rooms():
        interior = layout.rooms[i][j].cells[ZELDA_INTERIOR_ROWS, ZELDA_INTERIOR_COLS]
        passage[
            i * rh + ZELDA_INTERIOR_ROWS.start : i * rh + ZELDA_INTERIOR_ROWS.stop,
            j * rw + ZELDA_INTERIOR_COLS.start : j * rw + ZELDA_INTERIOR_COLS.stop,
        ] = (interior == FLOOR).astype(np.uint8)

    def carve(kind: str, near, far, base_y: int, base_x: int, far_y: int, far_x: int):
        nonlocal n_locks
        if kind == DOOR_NONE:
            return
        if kind == DOOR_SOFT_LOCKED and not soft_locked_open:
            return
        cells = [(base_y + r, base_x + c) for r, c in near]
        cells += [(far_y + r, far_x + c) for r, c in far]
        if kind == DOOR_LOCKED:
            for cell in cells:
                lock_cells[cell] = n_locks
            n_locks += 1
        else:
            for y, x in cells:
                passage[y, x] = 1

    for i in range(layout.grid_rows):
        for j in range(layout.grid_cols):
            carve(layout.doors_right[i][j], RIGHT_DOOR_CELLS, RIGHT_DOOR_FAR_CELLS,
                  i * rh, j * rw, i * rh, (j + 1) * rw)
            carve(layout.doors_down[i][j], DOWN_DOOR_CELLS, DOWN_DOOR_FAR_CELLS,
                  i * rh, j * rw, (i + 1) * rh, j * rw)
    return passage, lock_cells, n_locks


def solve_dungeon(
    layout: DungeonLayout,
    budget: int = SOLVER_BUDGET,
    soft_locked_open: bool = True,
) -> DungeonSolution | None:
    """Shortest cell path from the start-room center to the goal room.

    Movement is 4-directional over floor cells and carved door tunnels.
    Stepping onto a key cell collects the key; crossing a locked door
    consumes one held key and leaves that door open. The heuristic is the
    Manhattan distance between room coordinates; states are deduplicated on
    (cell, keys collected). Search gives up once ``budget`` states have been
    expanded. Soft-locked doors are treated as open unless disabled.
    """
    if layout.start is None or layout.goal is None:
        return None
    if layout.start == layout.goal:
        si, sj = layout.start
        cell = (si * ZELDA_ROOM_HEIGHT + _DOOR_ROW, sj * ZELDA_ROOM_WIDTH + _DOOR_COL)
        return DungeonSolution([layout.start], [cell], 0)
    if layout.goal not in reachable_rooms(layout):
        return None  # cell search cannot cross where no door exists

    passage, lock_cells, _ = _build_canvas(layout, soft_locked_open)
    height, width = passage.shape
    rh, rw = ZELDA_ROOM_HEIGHT, ZELDA_ROOM_WIDTH

    key_bits: dict[tuple[int, int], int] = {}
    for idx, (room, cell) in enumerate(layout.keys):
        pos = (room[0] * rh + cell[0], room[1] * rw + cell[1])
        key_bits[pos] = key_bits.get(pos, 0) | (1 << idx)

    gi, gj = layout.goal
    si, sj = layout.start
    start_cell = (si * rh + _DOOR_ROW, sj * rw + _DOOR_COL)

    def room_of(cell):
        return cell[0] // rh, cell[1] // rw

    def heuristic(cell):
        ri, rj = room_of(cell)
        return abs(ri - gi) + abs(rj - gj)

    start_keys = key_bits.get(start_cell, 0)
    start_state = (start_cell, start_keys)
    # Node payload: held keys and opened-door mask ride along; only
    # (cell, keys collected) deduplicates.
    heap = [(heuristic(start_cell), 0, si * layout.grid_cols + sj,
             start_cell[0] * width + start_cell[1], start_state)]
    best_g = {start_state: 0}
    held = {start_state: bin(start_keys).count("1")}
    opened = {start_state: 0}
    parents: dict[tuple, tuple | None] = {start_state: None}
    expanded = 0

    while heap:
        f, g, _, _, state = heapq.heappop(heap)
        if g > best_g.get(state, -1):
            continue
        expanded += 1
        if expanded > budget:
            return None
        cell, keys = state
        if room_of(cell) == (gi, gj):
            return _reconstruct(parents, state, expanded)
        cur_held = held[state]
        cur_opened = opened[state]
        y, x = cell
        for ny, nx in ((y - 1, x), (y + 1, x), (y, x - 1), (y, x + 1)):
            if not (0 <= ny < height and 0 <= nx < width):
                continue
            nheld = cur_held
            nopened = cur_opened
            if not passage[ny, nx]:
                lock = lock_cells.get((ny, nx))
                if lock is None:
                    continue
                if not (cur_opened >> lock) & 1:
                    if cur_held < 1:
                        continue
                    nheld = cur_held - 1
                    nopened = cur_opened | (1 << lock)
            nkeys = keys
            bits = key_bits.get((ny, nx))
            if bits is not None and (bits & ~nkeys):
                gained = bin(bits & ~nkeys).count("1")
                nkeys |= bits
                nheld += gained
            nstate = ((ny, nx), nkeys)
            ng = g + 1
            if ng < best_g.get(nstate, 1 << 60):
                best_g[nstate] = ng
                held[nstate] = nheld
                opened[nstate] = nopened
                parents[nstate] = state
                ri, rj = ny // rh, nx // rw
                heapq.heappush(
                    heap,
                    (ng + abs(ri - gi) + abs(rj - gj), ng,
                     ri * layout.grid_cols + rj, ny * width + nx, nstate),
                )
    return None


def _reconstruct(parents: dict, state, expanded: int) -> DungeonSolution:
    cells = []
    node = state
    while node is not None:
        cells.append(node[0])
        node = parents[node]
    cells.reverse()
    rooms: list[tuple[int, int]] = []
    for y, x in cells:
        room = (y // ZELDA_ROOM_HEIGHT, x // ZELDA_ROOM_WIDTH)
        if not rooms or rooms[-1] != room:
            rooms.append(room)
    return DungeonSolution(rooms, cells, expanded)


def zelda_fitness(
    layout: DungeonLayout,
    budget: int = SOLVER_BUDGET,
    soft_locked_open: bool = True,
    reachable: set[tuple[int, int]] | None = None,
) -> float:
    """Fraction of reachable rooms the shortest solution path traverses."""
    if reachable is None:
        reachable = reachable_rooms(layout)
    if not reachable:
        return 0.0
    solution = solve_dungeon(layout, budget=budget, soft_locked_open=soft_locked_open)
    if solution is None:
        return 0.0
    return len(solution.distinct_rooms) / len(reachable)
