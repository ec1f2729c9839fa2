"""Corpus ingestion: symbol-text parsing, training windows, unique rooms."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .mario import MARIO_TILESET, SEGMENT_HEIGHT, SEGMENT_WIDTH, extend_pipes
from .render import MARIO_ID_TO_SYMBOL
from .tiles import TileGrid
from .zelda import ZELDA_TILESET

MARIO_SYMBOL_TO_ID = {sym: idx for idx, sym in enumerate(MARIO_ID_TO_SYMBOL)}

# The corpus distinguishes many wall-like and water-like tiles; they collapse
# onto floor/wall/water, and doors become walls (layout handles doors).
ZELDA_SYMBOL_TO_ID = {
    "F": 0,
    "W": 1, "B": 1, "D": 1, "S": 1, "M": 1,
    "P": 2, "O": 2, "I": 2,
}
ZELDA_VOID_CHARS = {"-", " "}

ZELDA_ROOM_WIDTH = 16
ZELDA_ROOM_HEIGHT = 11


class ParseError(Exception):
    def __init__(self, message: str, row: int | None = None, col: int | None = None):
        if row is not None:
            message = f"row {row}, col {col}: {message}"
        super().__init__(message)
        self.row = row
        self.col = col


def parse_mario(text: str) -> TileGrid:
    """Symbol text to tile ids; pipe indicators are extended downward."""
    lines = [line for line in text.splitlines() if line.strip()]
    if len(lines) != SEGMENT_HEIGHT:
        raise ParseError(f"level must have {SEGMENT_HEIGHT} rows, got {len(lines)}")
    width = len(lines[0])
    rows = []
    for y, line in enumerate(lines):
        if len(line) != width:
            raise ParseError(f"ragged line of width {len(line)}", row=y, col=width)
        row = []
        for x, char in enumerate(line):
            if char not in MARIO_SYMBOL_TO_ID:
                raise ParseError(f"unknown symbol {char!r}", row=y, col=x)
            row.append(MARIO_SYMBOL_TO_ID[char])
        rows.append(row)
    return extend_pipes(TileGrid.from_rows(rows, MARIO_TILESET))


def extract_windows(level: TileGrid, w: int = SEGMENT_WIDTH, h: int = SEGMENT_HEIGHT) -> list[TileGrid]:
    """All w-wide windows, sliding one column at a time, left to right."""
    if level.height != h:
        raise ValueError(f"level height {level.height} != window height {h}")
    if level.width < w:
        return []
    return [
        TileGrid(level.cells[:, x : x + w], level.tileset_size)
        for x in range(level.width - w + 1)
    ]


def parse_zelda_rooms(text: str) -> list[TileGrid]:
    """Rooms cut from one dungeon file on the 16x11 lattice, in reading
    order. Blocks that are entirely void are skipped; a partially void
    block is an error."""
    lines = [line for line in text.splitlines() if line]
    if not lines:
        return []
    width = max(len(line) for line in lines)
    if width % ZELDA_ROOM_WIDTH or len(lines) % ZELDA_ROOM_HEIGHT:
        raise ParseError(
            f"file is {width}x{len(lines)}, not a multiple of "
            f"{ZELDA_ROOM_WIDTH}x{ZELDA_ROOM_HEIGHT}"
        )
    padded = [line.ljust(width) for line in lines]
    rooms = []
    for by in range(0, len(lines), ZELDA_ROOM_HEIGHT):
        for bx in range(0, width, ZELDA_ROOM_WIDTH):
            block = [padded[by + y][bx : bx + ZELDA_ROOM_WIDTH] for y in range(ZELDA_ROOM_HEIGHT)]
            chars = set("".join(block))
            if chars <= ZELDA_VOID_CHARS:
                continue
            rows = []
            for y, line in enumerate(block):
                row = []
                for x, char in enumerate(line):
                    if char in ZELDA_VOID_CHARS:
                        raise ParseError("void inside a room block", row=by + y, col=bx + x)
                    if char not in ZELDA_SYMBOL_TO_ID:
                        raise ParseError(f"unknown symbol {char!r}", row=by + y, col=bx + x)
                    row.append(ZELDA_SYMBOL_TO_ID[char])
                rows.append(row)
            rooms.append(TileGrid.from_rows(rows, ZELDA_TILESET))
    return rooms


def parse_zelda_dungeons(texts) -> list[TileGrid]:
    """Unique rooms across all dungeon files, first-seen order preserved."""
    unique: list[TileGrid] = []
    seen: set[bytes] = set()
    for text in texts:
        for room in parse_zelda_rooms(text):
            key = room.key()
            if key not in seen:
                seen.add(key)
                unique.append(room)
    return unique


def one_hot(grid: TileGrid, depth: int) -> np.ndarray:
    """(height, width, depth) float32 with a single 1 per cell; argmax over
    the last axis inverts it."""
    if grid.cells.max() >= depth:
        raise ValueError(f"tile id {grid.cells.max()} does not fit depth {depth}")
    out = np.zeros((grid.height, grid.width, depth), dtype=np.float32)
    rows, cols = np.indices(grid.cells.shape)
    out[rows, cols, grid.cells] = 1.0
    return out


@dataclass
class MarioCorpusStats:
    files: list[tuple[str, int, int]]  # name, width, window count

    @property
    def total_windows(self) -> int:
        return sum(count for _, _, count in self.files)


@dataclass
class ZeldaCorpusStats:
    total_rooms: int
    unique_rooms: int
    tile_histogram: dict[int, int]


def mario_corpus_stats(directory) -> MarioCorpusStats:
    files = []
    for path in sorted(Path(directory).glob("*.txt")):
        level = parse_mario(path.read_text())
        files.append((path.name, level.width, max(level.width - SEGMENT_WIDTH + 1, 0)))
    return MarioCorpusStats(files)


def zelda_corpus_stats(directory) -> ZeldaCorpusStats:
    paths = sorted(Path(directory).glob("*.txt"))
    total = 0
    for path in paths:
        total += len(parse_zelda_rooms(path.read_text()))
    unique = parse_zelda_dungeons(path.read_text() for path in paths)
    histogram = {t: 0 for t in range(ZELDA_TILESET)}
    for room in unique:
        for tile, count in zip(*np.unique(room.cells, return_counts=True)):
            histogram[int(tile)] += int(count)
    return ZeldaCorpusStats(total, len(unique), histogram)
