import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import bfs_mario
from qdlevels.mario import (
    MARIO_TILESET,
    MarioScores,
    extend_pipes,
    find_start,
    level_scores,
    mario_bin,
    mario_fitness,
    segment_scores,
    solve_mario,
)
from qdlevels.tiles import TileGrid, stitch_horizontal

from conftest import random_mario_segments as random_segments

EMPTY, STONE, Q_COIN, PIPE = 2, 0, 3, 6


def flat_segment() -> TileGrid:
    cells = np.full((14, 28), EMPTY, dtype=np.int16)
    cells[13, :] = STONE
    return TileGrid(cells, MARIO_TILESET)


class TestScores:
    def test_flat_segment(self):
        decoration, space, leniency = segment_scores(flat_segment())
        assert decoration == 0.0
        assert space == 28 / 392
        assert leniency == 0.0

    def test_one_question_block(self):
        seg = flat_segment()
        cells = seg.cells.copy()
        cells[6, 10] = Q_COIN
        decoration, space, leniency = segment_scores(TileGrid(cells, MARIO_TILESET))
        assert decoration == 1 / 392
        assert space == 29 / 392
        assert leniency == 1 / 392

    def test_open_bottom_row_counts_gap_columns(self):
        cells = np.full((14, 28), EMPTY, dtype=np.int16)
        _, space, leniency = segment_scores(TileGrid(cells, MARIO_TILESET))
        assert space == 0.0
        assert leniency == (28 * -0.5) / 392

    def test_wrong_shape_rejected(self):
        with pytest.raises(ValueError):
            segment_scores(TileGrid(np.zeros((14, 27), dtype=np.int16), MARIO_TILESET))

    def test_level_sum_is_monotone_in_segments(self):
        rng = random.Random(0)
        segments = random_segments(rng, 3)
        two = level_scores(segments[:2])
        three = level_scores(segments)
        assert three.decoration >= two.decoration
        assert three.space >= two.space


class TestBinning:
    def test_zero_scores(self):
        assert mario_bin(MarioScores(0.0, 0.0, 0.0)) == (0, 0, 5)

    def test_documented_decoration_example(self):
        assert mario_bin(MarioScores(0.25, 0.0, 0.0))[0] == 7

    def test_out_of_range_clamps_to_nearest_bin(self):
        assert mario_bin(MarioScores(0.0, 0.0, -10.0))[2] == 0
        assert mario_bin(MarioScores(0.0, 0.0, 10.0))[2] == 9
        assert mario_bin(MarioScores(50.0, 50.0, 0.0))[:2] == (9, 9)

    @given(st.floats(-1e9, 1e9), st.floats(-1e9, 1e9), st.floats(-1e9, 1e9))
    @settings(max_examples=300)
    def test_totality(self, d, s, l):
        bins = mario_bin(MarioScores(d, s, l))
        assert all(0 <= b <= 9 for b in bins)


class TestPipes:
    def test_extension_reaches_the_ground(self):
        cells = np.full((14, 28), EMPTY, dtype=np.int16)
        cells[13, :] = STONE
        cells[5, 4] = PIPE
        extended = extend_pipes(TileGrid(cells, MARIO_TILESET))
        assert extended.cells[5:13, 4].tolist() == [PIPE] * 8  # rows 5..12
        assert extended.cells[13, 4] == STONE
        assert extended.cells[4, 4] == EMPTY

    def test_extension_stops_at_solids(self):
        cells = np.full((14, 28), EMPTY, dtype=np.int16)
        cells[13, :] = STONE
        cells[9, 3] = STONE
        cells[5, 3] = PIPE
        extended = extend_pipes(TileGrid(cells, MARIO_TILESET))
        assert extended.cells[6:9, 3].tolist() == [PIPE] * 3
        assert extended.cells[9, 3] == STONE


class TestSolver:
    def test_flat_level_is_27_right_moves(self):
        solution = solve_mario([flat_segment()])
        assert solution is not None
        assert len(solution) == 27
        assert solution.actions == ["right"] * 27

    def test_full_height_wall_is_unsolvable(self):
        seg = flat_segment()
        cells = seg.cells.copy()
        cells[:, 14] = STONE
        assert solve_mario([TileGrid(cells, MARIO_TILESET)]) is None

    def test_four_tall_wall_is_jumpable(self):
        seg = flat_segment()
        cells = seg.cells.copy()
        cells[9:13, 14] = STONE
        segments = [TileGrid(cells, MARIO_TILESET)]
        solution = solve_mario(segments)
        assert solution is not None
        level = stitch_horizontal(segments)
        start = find_start(level.cells)
        oracle = bfs_mario(level.cells, (start[0], start[1], 0), 27)
        assert len(solution) == oracle

    def test_pit_detour_strictly_lengthens_the_path(self):
        plain = [flat_segment()]
        pit = flat_segment().cells.copy()
        pit[13, 10] = EMPTY
        with_pit = [TileGrid(pit, MARIO_TILESET)]
        assert mario_fitness(with_pit) > mario_fitness(plain) > 0

    def test_unsolvable_fitness_zero(self):
        seg = flat_segment()
        cells = seg.cells.copy()
        cells[:, 20] = STONE
        assert mario_fitness([TileGrid(cells, MARIO_TILESET)]) == 0.0

    def test_start_scans_right_when_needed(self):
        seg = flat_segment()
        cells = seg.cells.copy()
        cells[:, 0] = STONE  # no room in column 0
        assert find_start(cells) == (1, 12)

    def test_all_stone_level_has_no_start(self):
        cells = np.zeros((14, 28), dtype=np.int16)
        assert find_start(cells) is None
        assert solve_mario([TileGrid(cells, MARIO_TILESET)]) is None

    def test_agreement_with_bfs_oracle_on_random_levels(self):
        rng = random.Random(2024)
        for _ in range(30):
            segments = random_segments(rng, rng.choice([1, 2]))
            level = stitch_horizontal(segments)
            solution = solve_mario(segments)
            start = find_start(level.cells)
            if start is None:
                assert solution is None
                continue
            oracle = bfs_mario(level.cells, (start[0], start[1], 0), level.width - 1)
            if oracle is None:
                assert solution is None
            else:
                assert solution is not None
                assert len(solution) == oracle
