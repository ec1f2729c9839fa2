"""GANW serialization and reference-fixture emission.

The GANW layout written here is the wire contract with the level engine:
little-endian, magic "GANW", version 1, then latent size, output width,
height, channel depth, and record count, followed by named tensor records
whose layer_meta is space-separated key=value text. Torch's ConvTranspose2d
weights already use the (in, out, k, k) layout GANW expects, so tensors are
exported unchanged; batch-norm layers become (4, channels) records holding
scale, shift, running mean, and running variance.
"""
from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field

import numpy as np
import torch
from torch import nn

from .model import UnsupportedLayerError, load_checkpoint

FIXTURE_HEADER = "ganw-fixture 1"


@dataclass
class ExportManifest:
    source: str
    ganw_path: str
    fixture_path: str
    latent_size: int
    out_width: int
    out_height: int
    out_channels: int
    layers: list[dict] = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(self.__dict__, indent=2) + "\n"


def _activation_after(layers, index: int) -> str:
    if index + 1 < len(layers) and isinstance(layers[index + 1], (nn.ReLU, nn.Tanh)):
        return "relu" if isinstance(layers[index + 1], nn.ReLU) else "tanh"
    return "none"


def _records_from_module(module: nn.Sequential):
    """(name, meta, float32 ndarray) per weight-bearing layer; activations
    fold onto the preceding record."""
    layers = list(module)
    records = []
    block = 0
    for index, layer in enumerate(layers):
        if isinstance(layer, nn.ConvTranspose2d):
            if layer.bias is not None:
                raise UnsupportedLayerError(f"layer {index}: conv bias is not representable")
            meta = (
                f"kind=conv_transpose kernel={layer.kernel_size[0]} "
                f"stride={layer.stride[0]} pad={layer.padding[0]} "
                f"activation={_activation_after(layers, index)}"
            )
            records.append(
                (f"block{block}.conv", meta, layer.weight.detach().numpy().astype("<f4"))
            )
        elif isinstance(layer, nn.BatchNorm2d):
            stats = np.stack(
                [
                    layer.weight.detach().numpy(),
                    layer.bias.detach().numpy(),
                    layer.running_mean.numpy(),
                    layer.running_var.numpy(),
                ]
            ).astype("<f4")
            meta = (
                f"kind=batch_norm eps={layer.eps} "
                f"activation={_activation_after(layers, index)}"
            )
            records.append((f"block{block}.norm", meta, stats))
            block += 1
        elif isinstance(layer, (nn.ReLU, nn.Tanh)):
            continue
        else:
            raise UnsupportedLayerError(
                f"layer {index}: unsupported module {type(layer).__name__}"
            )
    return records


def write_ganw(path, latent_size, out_w, out_h, out_c, records) -> None:
    blob = b"GANW" + struct.pack("<6I", 1, latent_size, out_w, out_h, out_c, len(records))
    for name, meta, data in records:
        data = np.ascontiguousarray(data, dtype="<f4")
        blob += struct.pack("<I", len(name.encode())) + name.encode()
        blob += struct.pack("<I", len(meta.encode())) + meta.encode()
        blob += struct.pack("<I", data.ndim)
        blob += struct.pack(f"<{data.ndim}I", *data.shape)
        blob += data.tobytes()
    with open(path, "wb") as fh:
        fh.write(blob)


def _hex_row(values) -> str:
    return " ".join(float(v).hex() for v in values)


def write_fixture(path, latents, scores, grids) -> None:
    depth = scores[0].shape[0]
    lines = [
        FIXTURE_HEADER,
        f"latent_size {len(latents[0])}",
        f"channels {depth}",
        f"cases {len(latents)}",
    ]
    for index, (z, score, grid) in enumerate(zip(latents, scores, grids)):
        lines.append(f"case {index}")
        lines.append("z " + _hex_row(z))
        lines.append("scores " + _hex_row(score.reshape(-1)))
        lines.append("tiles")
        lines.extend(" ".join(str(v) for v in row) for row in grid.tolist())
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def export_checkpoint(src, out_ganw, out_fixture, n_fixtures: int = 10, seed: int = 0) -> ExportManifest:
    """Convert one checkpoint and emit reference outputs for cross-checks.

    The fixture holds seeded uniform [-1, 1] latents together with the
    native runtime's raw channel scores and argmax tile grids, so any
    reimplementation of the forward pass can be validated file-to-file.
    """
    arch, module = load_checkpoint(src)
    records = _records_from_module(module)

    probe = torch.zeros(1, arch["latent_size"], 1, 1)
    with torch.no_grad():
        out = module(probe)
    depth, out_h, out_w = out.shape[1], out.shape[2], out.shape[3]

    write_ganw(out_ganw, arch["latent_size"], out_w, out_h, depth, records)

    rng = np.random.default_rng(seed)
    latents, scores, grids = [], [], []
    for _ in range(n_fixtures):
        z = rng.uniform(-1.0, 1.0, arch["latent_size"]).astype(np.float32)
        with torch.no_grad():
            score = module(torch.from_numpy(z).reshape(1, -1, 1, 1))[0].numpy()
        latents.append(z)
        scores.append(score)
        grids.append(np.argmax(score, axis=0))
    write_fixture(out_fixture, latents, scores, grids)

    return ExportManifest(
        source=str(src),
        ganw_path=str(out_ganw),
        fixture_path=str(out_fixture),
        latent_size=arch["latent_size"],
        out_width=out_w,
        out_height=out_h,
        out_channels=depth,
        layers=[
            {"name": name, "shape": list(data.shape),
             "meta": dict(pair.split("=", 1) for pair in meta.split())}
            for name, meta, data in records
        ],
    )
