"""Rectangular grids of integer tile identities."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(eq=False)
class TileGrid:
    """A width x height grid of tile ids, each in [0, tileset_size).

    ``cells`` is indexed [row, col]; row 0 is the top of the level/room.
    Instances are treated as immutable values once constructed.
    """

    cells: np.ndarray
    tileset_size: int

    def __post_init__(self) -> None:
        cells = np.asarray(self.cells, dtype=np.int16)
        if cells.ndim != 2 or cells.size == 0:
            raise ValueError("tile grid must be a non-empty 2-D array")
        if self.tileset_size < 1:
            raise ValueError("tileset_size must be positive")
        if cells.min() < 0 or cells.max() >= self.tileset_size:
            raise ValueError(
                f"tile ids must lie in [0, {self.tileset_size}), "
                f"got range [{cells.min()}, {cells.max()}]"
            )
        self.cells = cells

    @property
    def height(self) -> int:
        return self.cells.shape[0]

    @property
    def width(self) -> int:
        return self.cells.shape[1]

    @property
    def tiles(self) -> list[int]:
        """Row-major flat list of tile ids."""
        return self.cells.reshape(-1).tolist()

    @classmethod
    def from_tiles(cls, tiles, width: int, height: int, tileset_size: int) -> TileGrid:
        flat = np.asarray(list(tiles), dtype=np.int16)
        if flat.size != width * height:
            raise ValueError(f"expected {width * height} tiles, got {flat.size}")
        return cls(flat.reshape(height, width), tileset_size)

    @classmethod
    def from_rows(cls, rows, tileset_size: int) -> TileGrid:
        return cls(np.asarray(rows, dtype=np.int16), tileset_size)

    def key(self) -> bytes:
        """Byte string identifying the grid contents; usable for dedup."""
        return self.cells.shape[0].to_bytes(4, "little") + self.cells.tobytes()

    def __eq__(self, other) -> bool:
        if not isinstance(other, TileGrid):
            return NotImplemented
        return (
            self.tileset_size == other.tileset_size
            and self.cells.shape == other.cells.shape
            and bool(np.array_equal(self.cells, other.cells))
        )

    def __repr__(self) -> str:
        return f"TileGrid({self.width}x{self.height}, tileset={self.tileset_size})"


def stitch_horizontal(grids: list[TileGrid]) -> TileGrid:
    """Concatenate equally tall grids left to right into one grid."""
    if not grids:
        raise ValueError("nothing to stitch")
    height = grids[0].height
    tileset = grids[0].tileset_size
    for g in grids:
        if g.height != height or g.tileset_size != tileset:
            raise ValueError("stitched grids must share height and tileset")
    return TileGrid(np.concatenate([g.cells for g in grids], axis=1), tileset)
