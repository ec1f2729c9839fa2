import random
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from qdlevels.encodings import DOOR_NONE, DOOR_PLAIN, DungeonLayout
from qdlevels.mario import MARIO_TILESET, extend_pipes
from qdlevels.tiles import TileGrid
from qdlevels.zelda import ZELDA_TILESET


def random_mario_segments(rng: random.Random, count: int) -> list[TileGrid]:
    """Small levels with gaps, platforms, walls, and a few enemies."""
    segments = []
    for _ in range(count):
        cells = np.full((14, 28), 2, dtype=np.int16)
        cells[13, :] = 0
        for x in range(28):
            if rng.random() < 0.12:
                cells[13, x] = 2  # pit
            if rng.random() < 0.10:
                top = rng.randrange(7, 13)
                cells[top:13, x] = 0  # wall of random height
        for _ in range(10):
            y, x = rng.randrange(4, 12), rng.randrange(28)
            cells[y, x] = rng.choice([0, 1, 3, 4, 5])
        for _ in range(3):
            y, x = rng.randrange(6, 13), rng.randrange(28)
            cells[y, x] = rng.choice([9, 10, 11, 12])
        if rng.random() < 0.3:
            cells[rng.randrange(8, 12), rng.randrange(28)] = 6
        segments.append(extend_pipes(TileGrid(cells, MARIO_TILESET)))
    return segments


def open_room() -> TileGrid:
    """16x11 room: two-tile wall ring around an all-floor interior."""
    cells = np.ones((11, 16), dtype=np.int16)
    cells[2:9, 2:14] = 0
    return TileGrid(cells, ZELDA_TILESET)


def empty_layout(rows: int, cols: int) -> DungeonLayout:
    return DungeonLayout(
        rows, cols,
        [[None] * cols for _ in range(rows)],
        [[DOOR_NONE] * cols for _ in range(rows)],
        [[DOOR_NONE] * cols for _ in range(rows)],
        [], None, None,
    )


def chain_layout(length: int, kind: str = DOOR_PLAIN) -> DungeonLayout:
    """A 1xL corridor of open rooms joined by doors of one kind."""
    layout = empty_layout(1, length)
    for j in range(length):
        layout.rooms[0][j] = open_room()
    for j in range(length - 1):
        layout.doors_right[0][j] = kind
    layout.start = (0, 0)
    layout.goal = (0, length - 1)
    return layout


def fifty_room_fixture() -> DungeonLayout:
    """50 reachable rooms, of which a forced 19-room chain is the only route.

    The start sits at (0, 0), the goal at (1, 1); the path runs across row 0,
    drops at column 9, and returns along row 1 (10 + 9 = 19 rooms). The other
    31 rooms hang off row 1 as dead-end branches, so the room graph is a tree
    and no shorter route exists.
    """
    layout = empty_layout(10, 10)

    def add(i, j):
        layout.rooms[i][j] = open_room()

    for j in range(10):
        add(0, j)
    for j in range(1, 10):
        add(1, j)
    for j in range(9):
        layout.doors_right[0][j] = DOOR_PLAIN
    layout.doors_down[0][9] = DOOR_PLAIN
    for j in range(1, 9):
        layout.doors_right[1][j] = DOOR_PLAIN

    branch_cols = range(1, 10)
    for i in (2, 3, 4):
        for j in branch_cols:
            add(i, j)
            layout.doors_down[i - 1][j] = DOOR_PLAIN
    for j in range(1, 5):
        add(5, j)
        layout.doors_down[4][j] = DOOR_PLAIN

    layout.start = (0, 0)
    layout.goal = (1, 1)
    assert len(layout.present_rooms()) == 50
    return layout


@pytest.fixture
def rng_seeded():
    import random

    return random.Random(1234)
