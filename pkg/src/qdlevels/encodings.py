"""Genotype-to-phenotype mappings for platformer levels and dungeon grids.

Two encodings share one downstream decoder: a pattern-network genome queried
per segment position, and a flat real vector chopped into per-segment blocks.
For dungeons, each grid cell decodes to a latent vector plus six auxiliary
values (room presence, right/down door presence, right/down door type, and
start/goal preference).
"""
from __future__ import annotations

import math
import random
import struct
from dataclasses import dataclass

import numpy as np

from .cppn import CppnGenome, activate_many
from .tiles import TileGrid

MARIO_SEGMENT_WIDTH = 28
MARIO_SEGMENT_HEIGHT = 14
ZELDA_ROOM_WIDTH = 16
ZELDA_ROOM_HEIGHT = 11
# Interior floor region of a room: the surrounding walls are two tiles thick.
ZELDA_INTERIOR_ROWS = slice(2, 9)
ZELDA_INTERIOR_COLS = slice(2, 14)

AUX_OUTPUTS = 6

DOOR_NONE = "none"
DOOR_PLAIN = "plain"
DOOR_SOFT_LOCKED = "soft_locked"
DOOR_BOMBABLE = "bombable"
DOOR_LOCKED = "locked"
DOOR_KINDS = (DOOR_PLAIN, DOOR_SOFT_LOCKED, DOOR_BOMBABLE, DOOR_LOCKED)

POLY_MUTATION_RATE = 0.30
POLY_MUTATION_ETA = 20.0
DIRECT_CROSSOVER_RATE = 0.50


@dataclass(frozen=True)
class MarioGenomeSpec:
    segments: int
    latent_size: int

    def __post_init__(self):
        if self.segments < 1 or self.latent_size < 1:
            raise ValueError("segments and latent_size must be positive")

    @property
    def direct_length(self) -> int:
        return self.segments * self.latent_size


@dataclass(frozen=True)
class DungeonGenomeSpec:
    grid_rows: int
    grid_cols: int
    latent_size: int

    def __post_init__(self):
        if min(self.grid_rows, self.grid_cols, self.latent_size) < 1:
            raise ValueError("grid dims and latent_size must be positive")

    @property
    def block_length(self) -> int:
        return self.latent_size + AUX_OUTPUTS

    @property
    def direct_length(self) -> int:
        return self.grid_rows * self.grid_cols * self.block_length


@dataclass
class RoomDecode:
    """Raw per-cell decoder outputs, all clamped to [-1, 1]."""

    z: np.ndarray
    present: float
    right_door: float
    down_door: float
    right_type: float
    down_type: float
    start_end_pref: float


@dataclass
class DungeonLayout:
    grid_rows: int
    grid_cols: int
    rooms: list[list[TileGrid | None]]
    doors_right: list[list[str]]
    doors_down: list[list[str]]
    keys: list[tuple[tuple[int, int], tuple[int, int]]]
    start: tuple[int, int] | None
    goal: tuple[int, int] | None

    def present_rooms(self) -> list[tuple[int, int]]:
        return [
            (i, j)
            for i in range(self.grid_rows)
            for j in range(self.grid_cols)
            if self.rooms[i][j] is not None
        ]

    def door_list(self) -> list[tuple[int, int, str, str]]:
        """All placed doors as (row, col, direction, kind), row-major order."""
        doors = []
        for i in range(self.grid_rows):
            for j in range(self.grid_cols):
                if self.doors_right[i][j] != DOOR_NONE:
                    doors.append((i, j, "right", self.doors_right[i][j]))
                if self.doors_down[i][j] != DOOR_NONE:
                    doors.append((i, j, "down", self.doors_down[i][j]))
        return doors


def scaled_coordinate(index: int, count: int) -> float:
    """Map index 0..count-1 onto [-1, 1]; a single position maps to 0."""
    if index < 0 or index >= count:
        raise ValueError(f"index {index} out of range for {count} positions")
    if count == 1:
        return 0.0
    return -1.0 + 2.0 * index / (count - 1)


def mario_segment_input(index: int, segments: int) -> float:
    return scaled_coordinate(index, segments)


def door_kind_from(value: float) -> str:
    """Door type from a [-1, 1] output: the four ranges split the positives."""
    if value <= 0.0:
        return DOOR_PLAIN
    if value <= 0.33:
        return DOOR_SOFT_LOCKED
    if value <= 0.66:
        return DOOR_BOMBABLE
    return DOOR_LOCKED


def _seed_from_output(value: float) -> int:
    return struct.unpack("<Q", struct.pack("<d", value))[0]


def place_keys(
    layout: DungeonLayout,
    right_types: list[list[float]],
    down_types: list[list[float]],
) -> list[tuple[tuple[int, int], tuple[int, int]]]:
    """One key per locked door, at a spot derived only from that door's
    type output: its 64-bit float pattern seeds a private generator that
    picks a present room and an interior floor cell.
    """
    present = layout.present_rooms()
    keys = []
    for i in range(layout.grid_rows):
        for j in range(layout.grid_cols):
            for kind_grid, type_grid in (
                (layout.doors_right, right_types),
                (layout.doors_down, down_types),
            ):
                if kind_grid[i][j] != DOOR_LOCKED:
                    continue
                rng = random.Random(_seed_from_output(type_grid[i][j]))
                room = present[rng.randrange(len(present))]
                cells = _interior_floor_cells(layout.rooms[room[0]][room[1]])
                keys.append((room, cells[rng.randrange(len(cells))]))
    return keys


def _interior_floor_cells(room: TileGrid) -> list[tuple[int, int]]:
    interior = room.cells[ZELDA_INTERIOR_ROWS, ZELDA_INTERIOR_COLS]
    rows, cols = np.nonzero(interior == 0)
    cells = [(int(r) + 2, int(c) + 2) for r, c in zip(rows, cols)]
    if not cells:  # no floor at all: fall back to the whole interior
        cells = [(r, c) for r in range(2, 9) for c in range(2, 14)]
    return cells


def assemble_dungeon(
    decodes: list[list[RoomDecode]], decoder, spec: DungeonGenomeSpec
) -> DungeonLayout:
    """Shared back half of both encodings: rooms, doors, keys, start and goal.

    Rooms exist where the presence output is strictly positive. Doors need a
    strictly positive presence output and two present rooms. The start room
    has the smallest start/goal preference and the goal the largest; ties go
    to the row-major first room for the start and the row-major last for the
    goal, which keeps them distinct whenever two rooms are present.
    """
    m, n = spec.grid_rows, spec.grid_cols
    rooms: list[list[TileGrid | None]] = [[None] * n for _ in range(m)]
    doors_right = [[DOOR_NONE] * n for _ in range(m)]
    doors_down = [[DOOR_NONE] * n for _ in range(m)]
    right_types = [[0.0] * n for _ in range(m)]
    down_types = [[0.0] * n for _ in range(m)]

    for i in range(m):
        for j in range(n):
            cell = decodes[i][j]
            if cell.present > 0.0:
                rooms[i][j] = decoder.decode(cell.z, ZELDA_ROOM_WIDTH, ZELDA_ROOM_HEIGHT)

    for i in range(m):
        for j in range(n):
            cell = decodes[i][j]
            if rooms[i][j] is None:
                continue
            if j + 1 < n and rooms[i][j + 1] is not None and cell.right_door > 0.0:
                doors_right[i][j] = door_kind_from(cell.right_type)
                right_types[i][j] = cell.right_type
            if i + 1 < m and rooms[i + 1][j] is not None and cell.down_door > 0.0:
                doors_down[i][j] = door_kind_from(cell.down_type)
                down_types[i][j] = cell.down_type

    layout = DungeonLayout(m, n, rooms, doors_right, doors_down, [], None, None)
    present = layout.present_rooms()
    if present:
        prefs = {(i, j): decodes[i][j].start_end_pref for i, j in present}
        layout.start = min(present, key=lambda rc: (prefs[rc], rc))
        layout.goal = max(present, key=lambda rc: (prefs[rc], rc))
        layout.keys = place_keys(layout, right_types, down_types)
    return layout


def _dungeon_inputs(spec: DungeonGenomeSpec) -> np.ndarray:
    rows = []
    for i in range(spec.grid_rows):
        y = scaled_coordinate(i, spec.grid_rows)
        for j in range(spec.grid_cols):
            x = scaled_coordinate(j, spec.grid_cols)
            rows.append((x, y, math.hypot(x, y)))
    return np.asarray(rows, dtype=np.float64)


def _decodes_from_rows(rows: np.ndarray, spec: DungeonGenomeSpec) -> list[list[RoomDecode]]:
    z_len = spec.latent_size
    decodes = []
    for i in range(spec.grid_rows):
        line = []
        for j in range(spec.grid_cols):
            row = rows[i * spec.grid_cols + j]
            line.append(
                RoomDecode(
                    z=row[:z_len],
                    present=float(row[z_len]),
                    right_door=float(row[z_len + 1]),
                    down_door=float(row[z_len + 2]),
                    right_type=float(row[z_len + 3]),
                    down_type=float(row[z_len + 4]),
                    start_end_pref=float(row[z_len + 5]),
                )
            )
        decodes.append(line)
    return decodes


def cppn_to_mario_level(genome: CppnGenome, decoder, spec: MarioGenomeSpec) -> list[TileGrid]:
    """Query the network once per segment x coordinate; decode each latent."""
    if genome.input_count != 2 or genome.output_count != spec.latent_size:
        raise ValueError(
            f"genome signature ({genome.input_count - 1}+bias, {genome.output_count}) "
            f"does not fit (1+bias, {spec.latent_size})"
        )
    xs = np.asarray(
        [[scaled_coordinate(i, spec.segments)] for i in range(spec.segments)]
    )
    latents = activate_many(genome, xs)
    return [
        decoder.decode(latents[i], MARIO_SEGMENT_WIDTH, MARIO_SEGMENT_HEIGHT)
        for i in range(spec.segments)
    ]


def cppn_to_zelda_dungeon(genome: CppnGenome, decoder, spec: DungeonGenomeSpec) -> DungeonLayout:
    """Query the network once per grid cell on (x, y, radius) inputs."""
    if genome.input_count != 4 or genome.output_count != spec.block_length:
        raise ValueError(
            f"genome signature ({genome.input_count - 1}+bias, {genome.output_count}) "
            f"does not fit (3+bias, {spec.block_length})"
        )
    rows = activate_many(genome, _dungeon_inputs(spec))
    return assemble_dungeon(_decodes_from_rows(rows, spec), decoder, spec)


def direct_to_mario(values, decoder, spec: MarioGenomeSpec) -> list[TileGrid]:
    """Chop the flat vector into per-segment latents, left to right."""
    values = np.asarray(values, dtype=np.float64)
    if values.shape != (spec.direct_length,):
        raise ValueError(
            f"direct genome length {values.size} != {spec.direct_length}"
        )
    z_len = spec.latent_size
    return [
        decoder.decode(values[i * z_len : (i + 1) * z_len],
                       MARIO_SEGMENT_WIDTH, MARIO_SEGMENT_HEIGHT)
        for i in range(spec.segments)
    ]


def direct_to_zelda(values, decoder, spec: DungeonGenomeSpec) -> DungeonLayout:
    """Blocks map to grid cells in row-major order; within a block the
    latent comes first, then the six auxiliary values."""
    values = np.asarray(values, dtype=np.float64)
    if values.shape != (spec.direct_length,):
        raise ValueError(
            f"direct genome length {values.size} != {spec.direct_length}"
        )
    rows = values.reshape(spec.grid_rows * spec.grid_cols, spec.block_length)
    return assemble_dungeon(_decodes_from_rows(rows, spec), decoder, spec)


def random_direct_genome(length: int, rng: random.Random) -> np.ndarray:
    return np.asarray([rng.uniform(-1.0, 1.0) for _ in range(length)])


def _polynomial_mutation(x: float, u: float, eta: float) -> float:
    """Deb's bounded polynomial mutation on [-1, 1]."""
    lo, hi = -1.0, 1.0
    mut_pow = 1.0 / (eta + 1.0)
    if u <= 0.5:
        delta = (x - lo) / (hi - lo)
        val = 2.0 * u + (1.0 - 2.0 * u) * (1.0 - delta) ** (eta + 1.0)
        dq = val**mut_pow - 1.0
    else:
        delta = (hi - x) / (hi - lo)
        val = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * (1.0 - delta) ** (eta + 1.0)
        dq = 1.0 - val**mut_pow
    return min(hi, max(lo, x + dq * (hi - lo)))


def direct_variation(parent_a, parent_b, rng: random.Random) -> np.ndarray:
    """Half the time a single-point crossover of the parents, otherwise a
    clone of the first; each gene then mutates independently at 30%."""
    a = np.asarray(parent_a, dtype=np.float64)
    b = np.asarray(parent_b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError("parent genomes differ in length")
    if rng.random() < DIRECT_CROSSOVER_RATE and a.size >= 2:
        cut = rng.randrange(1, a.size)
        child = np.concatenate([a[:cut], b[cut:]])
    else:
        child = a.copy()
    for idx in range(child.size):
        if rng.random() < POLY_MUTATION_RATE:
            child[idx] = _polynomial_mutation(child[idx], rng.random(), POLY_MUTATION_ETA)
    return child
