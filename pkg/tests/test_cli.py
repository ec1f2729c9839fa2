import numpy as np
import pytest

from conftest import chain_layout
from qdlevels.cli import main
from qdlevels.documents import dungeon_to_text, mario_level_to_text
from qdlevels.tiles import TileGrid

TINY_CONFIG = """qdlevels-config 1
domain = zelda
encoding = cppn2gan
seed = 9
init_count = 15
generated_count = 40
grid_rows = 3
grid_cols = 3
latent_size = 4
"""


class TestRunCommand:
    def test_missing_config_exits_2(self, capsys, tmp_path):
        code = main(["run", "--config", str(tmp_path / "missing.cfg")])
        assert code == 2
        assert "not found" in capsys.readouterr().err

    def test_bad_config_exits_2(self, capsys, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("not a config\n")
        assert main(["run", "--config", str(cfg)]) == 2

    def test_run_is_reproducible(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(TINY_CONFIG)
        assert main(["run", "--config", str(cfg), "--out", str(tmp_path / "a")]) == 0
        assert main(["run", "--config", str(cfg), "--out", str(tmp_path / "b")]) == 0
        assert (tmp_path / "a/archive.txt").read_bytes() == (tmp_path / "b/archive.txt").read_bytes()
        assert (tmp_path / "a/log.csv").read_bytes() == (tmp_path / "b/log.csv").read_bytes()

    def test_seed_override_changes_output(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(TINY_CONFIG)
        main(["run", "--config", str(cfg), "--out", str(tmp_path / "a")])
        main(["run", "--config", str(cfg), "--seed", "77", "--out", str(tmp_path / "c")])
        assert (tmp_path / "a/archive.txt").read_text() != (tmp_path / "c/archive.txt").read_text()


class TestRenderCommand:
    def test_dungeon_render(self, tmp_path, capsys):
        doc = tmp_path / "dungeon.txt"
        doc.write_text(dungeon_to_text(chain_layout(3)))
        assert main(["render", "--in", str(doc)]) == 0
        out = capsys.readouterr().out
        assert "@" in out and "T" in out and "#" in out

    def test_dungeon_render_with_solution(self, tmp_path, capsys):
        doc = tmp_path / "dungeon.txt"
        doc.write_text(dungeon_to_text(chain_layout(3)))
        assert main(["render", "--in", str(doc), "--solve"]) == 0
        assert "x" in capsys.readouterr().out

    def test_mario_render(self, tmp_path, capsys):
        cells = np.full((14, 28), 2, dtype=np.int16)
        cells[13, :] = 0
        doc = tmp_path / "level.txt"
        doc.write_text(mario_level_to_text([TileGrid(cells, 13)]))
        assert main(["render", "--in", str(doc)]) == 0
        out = capsys.readouterr().out
        assert out.splitlines()[13] == "X" * 28

    def test_unknown_document(self, tmp_path, capsys):
        doc = tmp_path / "what.txt"
        doc.write_text("mystery 9\n")
        assert main(["render", "--in", str(doc)]) == 2

    def test_missing_file(self, tmp_path):
        assert main(["render", "--in", str(tmp_path / "nope")]) == 2


class TestStatsAndHeatmap:
    def test_corpus_stats_zelda(self, tmp_path, capsys):
        room = ["W" * 16] * 2 + ["WW" + "F" * 12 + "WW"] * 7 + ["W" * 16] * 2
        (tmp_path / "d1.txt").write_text("\n".join(room) + "\n")
        (tmp_path / "d2.txt").write_text("\n".join(room) + "\n")
        assert main(["corpus-stats", "--game", "zelda", "--dir", str(tmp_path)]) == 0
        out = capsys.readouterr().out
        assert "total rooms 2" in out
        assert "unique rooms 1" in out

    def test_corpus_stats_missing_dir(self, tmp_path):
        assert main(["corpus-stats", "--game", "mario", "--dir", str(tmp_path / "x")]) == 2

    def test_heatmap_from_run(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(TINY_CONFIG)
        main(["run", "--config", str(cfg), "--out", str(tmp_path / "a")])
        out_csv = tmp_path / "heat.csv"
        assert main(["heatmap", "--archive", str(tmp_path / "a/archive.txt"),
                     "--out", str(out_csv)]) == 0
        lines = out_csv.read_text().splitlines()
        assert lines[0] == "# qdlevels-heatmap 1"
        assert lines[1] == "water_bin,wall_bin,rooms_bin,fitness"
        assert len(lines) > 2

    def test_unknown_subcommand_exits_2(self):
        with pytest.raises(SystemExit) as err:
            main(["frobnicate"])
        assert err.value.code == 2
