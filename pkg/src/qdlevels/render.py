"""Text renderers for levels and dungeons, with optional solution overlays."""
from __future__ import annotations

from .encodings import (
    DOOR_BOMBABLE,
    DOOR_LOCKED,
    DOOR_NONE,
    DOOR_PLAIN,
    DOOR_SOFT_LOCKED,
    ZELDA_ROOM_HEIGHT,
    ZELDA_ROOM_WIDTH,
    DungeonLayout,
)
from .tiles import TileGrid
from .zelda import (
    DOWN_DOOR_CELLS,
    DOWN_DOOR_FAR_CELLS,
    RIGHT_DOOR_CELLS,
    RIGHT_DOOR_FAR_CELLS,
    DungeonSolution,
    reachable_rooms,
)

MARIO_ID_TO_SYMBOL = "Xx-qQotpbgkrs"

ZELDA_TILE_GLYPHS = {0: ".", 1: "#", 2: "~"}
DOOR_GLYPHS = {
    DOOR_PLAIN: "+",
    DOOR_SOFT_LOCKED: "=",
    DOOR_BOMBABLE: "%",
    DOOR_LOCKED: "K",
}


ZELDA_CANONICAL_SYMBOLS = "FWP"  # one representative symbol per tile class


def zelda_room_symbols(room: TileGrid) -> str:
    """Corpus-style symbol text for one room. The corpus collapse of many
    wall-like and water-like symbols is lossy, so each class renders as its
    canonical symbol."""
    rows = ("".join(ZELDA_CANONICAL_SYMBOLS[v] for v in row) for row in room.cells.tolist())
    return "\n".join(rows) + "\n"


def mario_text(level: TileGrid, trace: list[tuple[int, int]] | None = None) -> str:
    """One line per row using the corpus symbols; trace cells become '*'."""
    rows = [[MARIO_ID_TO_SYMBOL[v] for v in row] for row in level.cells.tolist()]
    if trace:
        for x, y in trace:
            rows[y][x] = "*"
    return "\n".join("".join(row) for row in rows) + "\n"


def dungeon_text(
    layout: DungeonLayout,
    solution: DungeonSolution | None = None,
    mark_unreachable: bool = False,
) -> str:
    """Rooms tiled onto one character canvas.

    Floors are '.', walls '#', water '~'; doors are carved through the wall
    ring with a glyph per kind (+ plain, = soft-locked, % bombable,
    K locked). Keys are '*', the start '@', the goal 'T'. A solution overlay
    marks path cells with 'x'; unreachable rooms get a 3x3 'X' block in the
    middle when requested.
    """
    rh, rw = ZELDA_ROOM_HEIGHT, ZELDA_ROOM_WIDTH
    height, width = layout.grid_rows * rh, layout.grid_cols * rw
    canvas = [[" "] * width for _ in range(height)]

    for i, j in layout.present_rooms():
        cells = layout.rooms[i][j].cells
        for y in range(rh):
            for x in range(rw):
                canvas[i * rh + y][j * rw + x] = ZELDA_TILE_GLYPHS[int(cells[y, x])]

    def carve(kind, near, far, base, far_base):
        if kind == DOOR_NONE:
            return
        glyph = DOOR_GLYPHS[kind]
        for r, c in near:
            canvas[base[0] + r][base[1] + c] = glyph
        for r, c in far:
            canvas[far_base[0] + r][far_base[1] + c] = glyph

    for i in range(layout.grid_rows):
        for j in range(layout.grid_cols):
            carve(layout.doors_right[i][j], RIGHT_DOOR_CELLS, RIGHT_DOOR_FAR_CELLS,
                  (i * rh, j * rw), (i * rh, (j + 1) * rw))
            carve(layout.doors_down[i][j], DOWN_DOOR_CELLS, DOWN_DOOR_FAR_CELLS,
                  (i * rh, j * rw), ((i + 1) * rh, j * rw))

    if solution is not None:
        for y, x in solution.cells:
            canvas[y][x] = "x"

    if mark_unreachable:
        reachable = reachable_rooms(layout)
        for i, j in layout.present_rooms():
            if (i, j) not in reachable:
                for dy in (-1, 0, 1):
                    for dx in (-1, 0, 1):
                        canvas[i * rh + rh // 2 + dy][j * rw + rw // 2 + dx] = "X"

    for (i, j), (r, c) in layout.keys:
        canvas[i * rh + r][j * rw + c] = "*"
    if layout.start is not None:
        si, sj = layout.start
        canvas[si * rh + rh // 2][sj * rw + rw // 2] = "@"
    if layout.goal is not None:
        gi, gj = layout.goal
        canvas[gi * rh + rh // 2][gj * rw + rw // 2] = "T"

    return "\n".join("".join(row) for row in canvas) + "\n"
