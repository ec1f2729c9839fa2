"""Versioned text formats: levels, dungeons, genomes, dumps, logs, heatmaps.

Every document starts with a one-line format name and version. Fitness and
genome weights are written as float hex so round-trips are exact.
"""
from __future__ import annotations

import numpy as np

from .archive import QdArchive
from .cppn import CppnGenome, genome_from_text, genome_to_text
from .encodings import DOOR_KINDS, DOOR_NONE, DungeonLayout
from .tiles import TileGrid

MARIO_LEVEL_HEADER = "qdlevels-mario-level 1"
DUNGEON_HEADER = "qdlevels-dungeon 1"
DIRECT_HEADER = "qdlevels-direct 1"
ARCHIVE_HEADER = "qdlevels-archive 1"
LOG_HEADER = "# qdlevels-log 1"
HEATMAP_HEADER = "# qdlevels-heatmap 1"


def _grid_lines(grid: TileGrid) -> list[str]:
    return [" ".join(str(v) for v in row) for row in grid.cells.tolist()]


def _parse_grid(lines: list[str], tileset_size: int) -> TileGrid:
    rows = [[int(tok) for tok in line.split()] for line in lines]
    return TileGrid.from_rows(rows, tileset_size)


def mario_level_to_text(segments: list[TileGrid]) -> str:
    lines = [MARIO_LEVEL_HEADER, f"segments {len(segments)}"]
    for index, seg in enumerate(segments):
        lines.append(f"segment {index}")
        lines.extend(_grid_lines(seg))
    return "\n".join(lines) + "\n"


def mario_level_from_text(text: str) -> list[TileGrid]:
    from .mario import MARIO_TILESET, SEGMENT_HEIGHT

    lines = [l for l in text.splitlines() if l.strip()]
    if not lines or lines[0] != MARIO_LEVEL_HEADER:
        raise ValueError("not a mario level document")
    count = int(lines[1].split()[1])
    segments = []
    pos = 2
    for index in range(count):
        if lines[pos] != f"segment {index}":
            raise ValueError(f"expected 'segment {index}' at line {pos + 1}")
        pos += 1
        segments.append(_parse_grid(lines[pos : pos + SEGMENT_HEIGHT], MARIO_TILESET))
        pos += SEGMENT_HEIGHT
    return segments


def dungeon_to_text(layout: DungeonLayout) -> str:
    from .zelda import ZELDA_TILESET  # noqa: F401  (documented tileset)

    lines = [DUNGEON_HEADER, f"grid {layout.grid_rows} {layout.grid_cols}"]
    for i, j in layout.present_rooms():
        lines.append(f"room {i} {j}")
        lines.extend(_grid_lines(layout.rooms[i][j]))
    for i, j, direction, kind in layout.door_list():
        lines.append(f"door {direction} {i} {j} {kind}")
    for (i, j), (r, c) in layout.keys:
        lines.append(f"key {i} {j} {r} {c}")
    if layout.start is not None:
        lines.append(f"start {layout.start[0]} {layout.start[1]}")
    if layout.goal is not None:
        lines.append(f"goal {layout.goal[0]} {layout.goal[1]}")
    return "\n".join(lines) + "\n"


def dungeon_from_text(text: str) -> DungeonLayout:
    from .encodings import ZELDA_ROOM_HEIGHT
    from .zelda import ZELDA_TILESET

    lines = [l for l in text.splitlines() if l.strip()]
    if not lines or lines[0] != DUNGEON_HEADER:
        raise ValueError("not a dungeon document")
    rows, cols = (int(tok) for tok in lines[1].split()[1:])
    layout = DungeonLayout(
        rows, cols,
        [[None] * cols for _ in range(rows)],
        [[DOOR_NONE] * cols for _ in range(rows)],
        [[DOOR_NONE] * cols for _ in range(rows)],
        [], None, None,
    )
    pos = 2
    while pos < len(lines):
        parts = lines[pos].split()
        if parts[0] == "room":
            i, j = int(parts[1]), int(parts[2])
            grid = _parse_grid(lines[pos + 1 : pos + 1 + ZELDA_ROOM_HEIGHT], ZELDA_TILESET)
            layout.rooms[i][j] = grid
            pos += 1 + ZELDA_ROOM_HEIGHT
            continue
        if parts[0] == "door":
            direction, i, j, kind = parts[1], int(parts[2]), int(parts[3]), parts[4]
            if kind not in DOOR_KINDS:
                raise ValueError(f"unknown door kind {kind!r}")
            (layout.doors_right if direction == "right" else layout.doors_down)[i][j] = kind
        elif parts[0] == "key":
            i, j, r, c = (int(tok) for tok in parts[1:])
            layout.keys.append(((i, j), (r, c)))
        elif parts[0] == "start":
            layout.start = (int(parts[1]), int(parts[2]))
        elif parts[0] == "goal":
            layout.goal = (int(parts[1]), int(parts[2]))
        else:
            raise ValueError(f"unknown dungeon line {parts[0]!r}")
        pos += 1
    return layout


def direct_genome_to_text(values) -> str:
    values = np.asarray(values, dtype=np.float64)
    body = " ".join(float(v).hex() for v in values)
    return f"{DIRECT_HEADER}\nlength {values.size}\nvalues {body}\n"


def direct_genome_from_text(text: str) -> np.ndarray:
    lines = [l for l in text.splitlines() if l.strip()]
    if not lines or lines[0] != DIRECT_HEADER:
        raise ValueError("not a direct genome document")
    length = int(lines[1].split()[1])
    values = np.asarray([float.fromhex(tok) for tok in lines[2].split()[1:]])
    if values.size != length:
        raise ValueError("direct genome length mismatch")
    return values


def archive_to_text(archive: QdArchive, domain: str, encoding: str) -> str:
    """Archive dump: one record per occupied bin plus inline genome blocks."""
    lines = [
        ARCHIVE_HEADER,
        f"domain {domain}",
        f"encoding {encoding}",
        f"evaluations {archive.evaluations}",
        f"bins {archive.filled_bin_count()}",
    ]
    genome_blocks = []
    for index, key in enumerate(sorted(archive.occupied)):
        elite = archive.occupied[key]
        key_text = " ".join(str(v) for v in key)
        lines.append(
            f"bin {key_text} fitness {float(elite.fitness).hex()} "
            f"birth {elite.birth_index} genome g{index}"
        )
        if isinstance(elite.genome, CppnGenome):
            body = genome_to_text(elite.genome)
        else:
            body = direct_genome_to_text(elite.genome)
        genome_blocks.append(f"genome g{index}\n{body}end")
    return "\n".join(lines + genome_blocks) + "\n"


def archive_records_from_text(text: str) -> list[tuple[tuple[int, ...], float]]:
    """Bin records (key, fitness) from a dump; genome blocks are skipped."""
    lines = text.splitlines()
    if not lines or lines[0] != ARCHIVE_HEADER:
        raise ValueError("not an archive dump")
    records = []
    for line in lines:
        parts = line.split()
        if parts and parts[0] == "bin":
            fit_at = parts.index("fitness")
            key = tuple(int(tok) for tok in parts[1:fit_at])
            records.append((key, float.fromhex(parts[fit_at + 1])))
    return records


def genome_block_from_text(text: str, name: str) -> str:
    """Extract one inline genome block from an archive dump."""
    lines = text.splitlines()
    try:
        start = lines.index(f"genome {name}") + 1
    except ValueError as exc:
        raise ValueError(f"no genome block {name!r}") from exc
    end = lines.index("end", start)
    return "\n".join(lines[start:end]) + "\n"


def log_to_csv(archive: QdArchive) -> str:
    lines = [LOG_HEADER, "evaluations,filled_bins"]
    lines += [f"{evals},{filled}" for evals, filled in archive.log]
    return "\n".join(lines) + "\n"


def heatmap_csv(records: list[tuple[tuple[int, ...], float]], domain: str) -> str:
    """Long-format grid: one row per occupied bin, coordinates then fitness."""
    header = "d_bin,s_bin,l_bin,fitness" if domain == "mario" else "water_bin,wall_bin,rooms_bin,fitness"
    lines = [HEATMAP_HEADER, header]
    for key, fitness in sorted(records):
        lines.append(",".join(str(v) for v in key) + f",{fitness!r}")
    return "\n".join(lines) + "\n"
