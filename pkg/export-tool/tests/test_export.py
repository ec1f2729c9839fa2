import json
import struct

import numpy as np
import pytest
import torch
from torch import nn

from ganexport.export import export_checkpoint, FIXTURE_HEADER
from ganexport.model import (
    CheckpointError,
    UnsupportedLayerError,
    build_module,
    generator_arch,
    load_checkpoint,
    synthesize_checkpoint,
)


def read_ganw_header(path):
    blob = path.read_bytes()
    assert blob[:4] == b"GANW"
    return struct.unpack("<6I", blob[4:28])  # version, latent, w, h, c, records


def read_ganw_records(path):
    blob = path.read_bytes()
    pos = 28
    records = []
    while pos < len(blob):
        (name_len,) = struct.unpack_from("<I", blob, pos); pos += 4
        name = blob[pos : pos + name_len].decode(); pos += name_len
        (meta_len,) = struct.unpack_from("<I", blob, pos); pos += 4
        meta = blob[pos : pos + meta_len].decode(); pos += meta_len
        (rank,) = struct.unpack_from("<I", blob, pos); pos += 4
        shape = struct.unpack_from(f"<{rank}I", blob, pos); pos += 4 * rank
        count = int(np.prod(shape))
        data = np.frombuffer(blob, dtype="<f4", count=count, offset=pos).reshape(shape)
        pos += 4 * count
        records.append((name, dict(p.split("=", 1) for p in meta.split()), data))
    return records


@pytest.fixture(scope="module")
def zelda_export(tmp_path_factory):
    root = tmp_path_factory.mktemp("zelda")
    ckpt = root / "g.pt"
    synthesize_checkpoint(10, 3, seed=7, path=ckpt)
    manifest = export_checkpoint(ckpt, root / "g.ganw", root / "g_fixture.txt", seed=7)
    return root, manifest


class TestSynthesis:
    def test_architecture_shapes(self):
        arch = generator_arch(10, 3)
        module = build_module(arch)
        out = module(torch.zeros(1, 10, 1, 1))
        assert tuple(out.shape) == (1, 3, 32, 32)

    def test_mario_depth(self):
        module = build_module(generator_arch(30, 13))
        out = module(torch.zeros(1, 30, 1, 1))
        assert tuple(out.shape) == (1, 13, 32, 32)

    def test_checkpoint_round_trip(self, tmp_path):
        path = tmp_path / "g.pt"
        synthesize_checkpoint(10, 3, seed=1, path=path)
        arch, module = load_checkpoint(path)
        assert arch["latent_size"] == 10
        assert not module.training


class TestExport:
    def test_header_fields(self, zelda_export):
        root, manifest = zelda_export
        version, latent, w, h, c, n_records = read_ganw_header(root / "g.ganw")
        assert (version, latent, w, h, c) == (1, 10, 32, 32, 3)
        assert n_records == 7  # three conv+norm blocks and the projection
        assert manifest.latent_size == 10 and manifest.out_channels == 3

    def test_mario_header(self, tmp_path):
        ckpt = tmp_path / "m.pt"
        synthesize_checkpoint(30, 13, seed=3, path=ckpt)
        export_checkpoint(ckpt, tmp_path / "m.ganw", tmp_path / "m_fixture.txt", seed=3)
        _, latent, w, h, c, _ = read_ganw_header(tmp_path / "m.ganw")
        assert (latent, w, h, c) == (30, 32, 32, 13)

    def test_records_carry_weights_untransformed(self, zelda_export):
        root, _ = zelda_export
        arch, module = load_checkpoint(root / "g.pt")
        records = read_ganw_records(root / "g.ganw")
        first_conv = module[0].weight.detach().numpy()
        assert records[0][1]["kind"] == "conv_transpose"
        assert np.array_equal(records[0][2], first_conv.astype("<f4"))
        norm = records[1]
        assert norm[1]["kind"] == "batch_norm"
        assert np.array_equal(norm[2][0], module[1].weight.detach().numpy())
        assert np.array_equal(norm[2][3], module[1].running_var.numpy())

    def test_activation_tags(self, zelda_export):
        root, manifest = zelda_export
        metas = [layer["meta"] for layer in manifest.layers]
        assert [m["activation"] for m in metas] == [
            "none", "relu", "none", "relu", "none", "relu", "tanh",
        ]

    def test_reexport_is_byte_identical(self, tmp_path, zelda_export):
        root, _ = zelda_export
        export_checkpoint(root / "g.pt", tmp_path / "again.ganw",
                          tmp_path / "again_fixture.txt", seed=7)
        assert (tmp_path / "again.ganw").read_bytes() == (root / "g.ganw").read_bytes()
        assert (
            (tmp_path / "again_fixture.txt").read_bytes()
            == (root / "g_fixture.txt").read_bytes()
        )

    def test_different_seed_changes_fixture_only(self, tmp_path, zelda_export):
        root, _ = zelda_export
        export_checkpoint(root / "g.pt", tmp_path / "s9.ganw",
                          tmp_path / "s9_fixture.txt", seed=9)
        assert (tmp_path / "s9.ganw").read_bytes() == (root / "g.ganw").read_bytes()
        assert (
            (tmp_path / "s9_fixture.txt").read_bytes()
            != (root / "g_fixture.txt").read_bytes()
        )

    def test_fixture_structure_and_score_consistency(self, zelda_export):
        root, _ = zelda_export
        lines = (root / "g_fixture.txt").read_text().splitlines()
        assert lines[0] == FIXTURE_HEADER
        assert lines[1] == "latent_size 10"
        assert lines[2] == "channels 3"
        assert lines[3] == "cases 10"
        z = np.asarray([float.fromhex(t) for t in lines[5].split()[1:]])
        scores = np.asarray([float.fromhex(t) for t in lines[6].split()[1:]])
        assert z.size == 10 and scores.size == 3 * 32 * 32
        assert np.all(np.abs(z) <= 1.0)
        assert np.all(np.abs(scores) <= 1.0)  # tanh output
        tiles = np.asarray([[int(t) for t in row.split()] for row in lines[8:40]])
        assert np.array_equal(tiles, scores.reshape(3, 32, 32).argmax(axis=0))

    def test_unreadable_checkpoint(self, tmp_path):
        bad = tmp_path / "bad.pt"
        bad.write_bytes(b"not a checkpoint")
        with pytest.raises(CheckpointError):
            export_checkpoint(bad, tmp_path / "x.ganw", tmp_path / "x_fixture.txt")

    def test_unsupported_layer_is_named(self, tmp_path):
        arch = generator_arch(10, 3)
        arch["layers"].insert(3, {"kind": "gru"})
        with pytest.raises(UnsupportedLayerError, match="layer 3.*gru"):
            build_module(arch)

    def test_unsupported_module_in_export(self, tmp_path):
        module = nn.Sequential(
            nn.ConvTranspose2d(4, 3, 4, stride=1, padding=0, bias=False),
            nn.Dropout(),
        )
        ckpt = tmp_path / "odd.pt"
        torch.save(
            {"arch": {"latent_size": 4, "depth": 3,
                      "layers": [{"kind": "conv_transpose", "in": 4, "out": 3,
                                  "kernel": 4, "stride": 1, "pad": 0}]},
             "state_dict": module[:1].state_dict()},
            ckpt,
        )
        manifest = export_checkpoint(ckpt, tmp_path / "odd.ganw",
                                     tmp_path / "odd_fixture.txt")
        assert manifest.out_width == 4  # single 4x4 layer, exported fine

    def test_manifest_json_round_trips(self, zelda_export):
        _, manifest = zelda_export
        data = json.loads(manifest.to_json())
        assert data["latent_size"] == 10
        assert [l["name"] for l in data["layers"]][:2] == ["block0.conv", "block0.norm"]
