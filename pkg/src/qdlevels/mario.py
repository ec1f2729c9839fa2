"""Platformer level evaluation: behavior scores, binning, and the solver.

Tile ids 0..12: stone, breakable, empty, question-coin, question-powerup,
coin, pipe, plant pipe, bullet bill, then the four walking enemies. The
solver runs simplified physics on a stitched level: the avatar occupies one
tile, jumps rise one tile per action for four actions, everything except
empty and coin tiles blocks movement, and falling past the bottom row is
death. Fitness is shortest solution length in actions, 0 when unsolvable.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from .tiles import TileGrid, stitch_horizontal

MARIO_TILESET = 13
SEGMENT_WIDTH = 28
SEGMENT_HEIGHT = 14
SEGMENT_CELLS = SEGMENT_WIDTH * SEGMENT_HEIGHT

STONE, BREAKABLE, EMPTY, Q_COIN, Q_POWER, COIN = 0, 1, 2, 3, 4, 5
PIPE, PLANT_PIPE, BULLET_BILL = 6, 7, 8
GOOMBA, GREEN_KOOPA, RED_KOOPA, SPINY = 9, 10, 11, 12

STANDABLE = frozenset({STONE, BREAKABLE, Q_COIN, Q_POWER, PIPE, PLANT_PIPE, BULLET_BILL})
DECORATION = frozenset({BREAKABLE, Q_COIN, Q_POWER, PIPE, PLANT_PIPE, BULLET_BILL,
                        GOOMBA, GREEN_KOOPA, RED_KOOPA, SPINY})
# Per-tile leniency values; ground gaps add an extra -0.5 term per column.
LENIENCY = np.array(
    [0.0, 0.0, 0.0, 1.0, 1.0, 0.0, -0.5, -0.5, -0.5, -1.0, -1.0, -1.0, -1.0]
)
GAP_PENALTY = -0.5

# Cells the avatar can occupy; every other tile blocks (and supports).
PASSABLE = frozenset({EMPTY, COIN})

_STANDABLE_MASK = np.zeros(MARIO_TILESET, dtype=bool)
_STANDABLE_MASK[list(STANDABLE)] = True
_DECORATION_MASK = np.zeros(MARIO_TILESET, dtype=bool)
_DECORATION_MASK[list(DECORATION)] = True


@dataclass(frozen=True)
class MarioScores:
    decoration: float
    space: float
    leniency: float


def extend_pipes(grid: TileGrid) -> TileGrid:
    """Fill below each pipe indicator with pipe body down to the next
    standable tile (or the bottom row), mirroring the corpus encoding."""
    cells = grid.cells.copy()
    height, width = cells.shape
    for x in range(width):
        for y in range(height):
            if cells[y, x] in (PIPE, PLANT_PIPE):
                yy = y + 1
                while yy < height and cells[yy, x] not in STANDABLE:
                    cells[yy, x] = PIPE
                    yy += 1
    return TileGrid(cells, grid.tileset_size)


def _check_segment(seg: TileGrid) -> None:
    if seg.cells.shape != (SEGMENT_HEIGHT, SEGMENT_WIDTH):
        raise ValueError(f"segment must be {SEGMENT_WIDTH}x{SEGMENT_HEIGHT}")
    if seg.cells.max() >= MARIO_TILESET:
        raise ValueError("segment holds tile ids outside the known set")


def segment_scores(seg: TileGrid) -> tuple[float, float, float]:
    """Decoration frequency, space coverage, and leniency of one segment."""
    _check_segment(seg)
    cells = seg.cells
    decoration = float(_DECORATION_MASK[cells].sum()) / SEGMENT_CELLS
    space = float(_STANDABLE_MASK[cells].sum()) / SEGMENT_CELLS
    gaps = int((cells[-1, :] == EMPTY).sum())
    leniency = (float(LENIENCY[cells].sum()) + GAP_PENALTY * gaps) / SEGMENT_CELLS
    return decoration, space, leniency


def level_scores(segments: list[TileGrid]) -> MarioScores:
    """Per-segment scores summed across the level."""
    totals = np.zeros(3)
    for seg in segments:
        totals += segment_scores(seg)
    return MarioScores(*totals.tolist())


def _axis_bin(value: float) -> int:
    return min(max(int(np.floor(10.0 * value)), 0), 9)


def mario_bin(scores: MarioScores) -> tuple[int, int, int]:
    """Scale to the nominal [0, 1] / [-0.5, 0.5] ranges and cut into 10 bins;
    out-of-range values land in the nearest bin."""
    d_bin = _axis_bin(3.0 * scores.decoration)
    s_bin = _axis_bin(3.0 * scores.space)
    l_bin = _axis_bin(5.0 * scores.leniency + 0.5)
    return d_bin, s_bin, l_bin


# Solver. States are (x, y, phase): phase 0 covers grounded and falling,
# phases 1..3 count completed rise actions of the current jump (the fourth
# rise returns to phase 0, after which gravity takes over).


@dataclass
class MarioSolution:
    actions: list[str]
    trace: list[tuple[int, int]]  # (x, y) per visited state, start included

    def __len__(self) -> int:
        return len(self.actions)


def find_start(cells: np.ndarray) -> tuple[int, int] | None:
    """Lowest passable cell above a standable tile, in the leftmost column
    that has one."""
    height, width = cells.shape
    for x in range(width):
        for y in range(height - 2, -1, -1):
            if cells[y, x] in PASSABLE and cells[y + 1, x] in STANDABLE:
                return x, y
    return None


def successors(cells: np.ndarray, state: tuple[int, int, int]):
    """Yield (action, next_state) pairs under the simplified physics."""
    height, width = cells.shape
    x, y, phase = state

    def passable(px: int, py: int) -> bool:
        return 0 <= px < width and 0 <= py < height and cells[py, px] in PASSABLE

    supported = y + 1 < height and cells[y + 1, x] not in PASSABLE

    if phase == 0 and supported:
        if passable(x - 1, y):
            yield "left", (x - 1, y, 0)
        if passable(x + 1, y):
            yield "right", (x + 1, y, 0)
        if passable(x, y - 1):
            yield "jump", (x, y - 1, 1)
        return

    if phase > 0:
        # Ascending: rise unless blocked, then the chosen horizontal move.
        seen = set()
        for dx, label in ((-1, "air-left"), (0, "air-none"), (1, "air-right")):
            if passable(x, y - 1):
                ny, nphase = y - 1, (phase + 1) % 4
            else:
                ny, nphase = y, 0
            nx = x + dx if dx and passable(x + dx, ny) else x
            nxt = (nx, ny, nphase)
            if nxt not in seen:
                seen.add(nxt)
                yield label, nxt
        return

    # Falling. Below the bottom row is a pit: no successors.
    if y + 1 >= height:
        return
    seen = set()
    for dx, label in ((-1, "air-left"), (0, "air-none"), (1, "air-right")):
        ny = y + 1
        nx = x + dx if dx and passable(x + dx, ny) else x
        nxt = (nx, ny, 0)
        if nxt not in seen:
            seen.add(nxt)
            yield label, nxt


def solve_mario(segments: list[TileGrid]) -> MarioSolution | None:
    """A* to the rightmost column; the heuristic is remaining horizontal
    distance, admissible because no action moves more than one column."""
    level = extend_pipes(stitch_horizontal(segments))
    cells = level.cells
    width = cells.shape[1]
    start = find_start(cells)
    if start is None:
        return None
    start_state = (start[0], start[1], 0)

    heap = [(width - 1 - start[0], 0, start[1], start[0], 0, start_state)]
    best_g = {start_state: 0}
    parents: dict[tuple, tuple] = {start_state: (None, "")}
    tick = 0
    while heap:
        f, g, _, _, _, state = heapq.heappop(heap)
        if g > best_g.get(state, -1):
            continue
        if state[0] == width - 1:
            return _reconstruct(parents, state)
        for action, nxt in successors(cells, state):
            ng = g + 1
            if ng < best_g.get(nxt, 1 << 60):
                best_g[nxt] = ng
                parents[nxt] = (state, action)
                tick += 1
                heapq.heappush(
                    heap, (ng + width - 1 - nxt[0], ng, nxt[1], nxt[0], tick, nxt)
                )
    return None


def _reconstruct(parents: dict, state: tuple) -> MarioSolution:
    actions: list[str] = []
    trace: list[tuple[int, int]] = []
    node = state
    while node is not None:
        trace.append((node[0], node[1]))
        node, action = parents[node]
        if node is not None:
            actions.append(action)
    actions.reverse()
    trace.reverse()
    return MarioSolution(actions, trace)


def mario_fitness(segments: list[TileGrid]) -> float:
    solution = solve_mario(segments)
    return float(len(solution)) if solution is not None else 0.0
