"""Checkpoint schema and the torch module built from it.

A checkpoint is a torch-saved dict with two entries: ``arch`` describes the
layer stack as plain data, and ``state_dict`` holds the tensors. Keeping the
architecture in the file means the exporter never hard-codes one model
shape; anything it does not understand fails loudly instead of being
approximated.
"""
from __future__ import annotations

import torch
from torch import nn


class CheckpointError(Exception):
    """Checkpoint missing, unreadable, or structurally broken."""


class UnsupportedLayerError(Exception):
    """The architecture lists a layer kind the exporter cannot translate."""


SUPPORTED_KINDS = ("conv_transpose", "batch_norm", "relu", "tanh")


def build_module(arch: dict) -> nn.Sequential:
    layers = []
    for index, layer in enumerate(arch["layers"]):
        kind = layer.get("kind")
        if kind == "conv_transpose":
            layers.append(
                nn.ConvTranspose2d(
                    layer["in"], layer["out"], layer["kernel"],
                    stride=layer["stride"], padding=layer["pad"], bias=False,
                )
            )
        elif kind == "batch_norm":
            layers.append(nn.BatchNorm2d(layer["channels"]))
        elif kind == "relu":
            layers.append(nn.ReLU())
        elif kind == "tanh":
            layers.append(nn.Tanh())
        else:
            raise UnsupportedLayerError(f"layer {index}: unsupported kind {kind!r}")
    return nn.Sequential(*layers)


def generator_arch(latent_size: int, depth: int, widths=(128, 64, 32)) -> dict:
    """The shipped stack: three upsampling blocks then a tanh projection,
    growing a 1x1 latent column to a 32x32 tile-score map."""
    layers = []
    channels = [latent_size, *widths]
    for i in range(len(widths)):
        stride, pad = (1, 0) if i == 0 else (2, 1)
        layers.append(
            {"kind": "conv_transpose", "in": channels[i], "out": channels[i + 1],
             "kernel": 4, "stride": stride, "pad": pad}
        )
        layers.append({"kind": "batch_norm", "channels": channels[i + 1]})
        layers.append({"kind": "relu"})
    layers.append(
        {"kind": "conv_transpose", "in": channels[-1], "out": depth,
         "kernel": 4, "stride": 2, "pad": 1}
    )
    layers.append({"kind": "tanh"})
    return {"latent_size": latent_size, "depth": depth, "layers": layers}


def synthesize_checkpoint(latent_size: int, depth: int, seed: int, path) -> dict:
    """Write a deterministic stand-in checkpoint with the shipped
    architecture. Batch-norm statistics are randomized so the export has to
    carry them faithfully."""
    torch.manual_seed(seed)
    arch = generator_arch(latent_size, depth)
    module = build_module(arch)
    with torch.no_grad():
        for layer in module:
            if isinstance(layer, nn.ConvTranspose2d):
                nn.init.normal_(layer.weight, 0.0, 0.08)
            elif isinstance(layer, nn.BatchNorm2d):
                nn.init.uniform_(layer.weight, 0.6, 1.4)
                nn.init.uniform_(layer.bias, -0.3, 0.3)
                layer.running_mean.uniform_(-0.4, 0.4)
                layer.running_var.uniform_(0.5, 1.5)
    checkpoint = {"arch": arch, "state_dict": module.state_dict()}
    torch.save(checkpoint, path)
    return checkpoint


def load_checkpoint(path) -> tuple[dict, nn.Sequential]:
    try:
        checkpoint = torch.load(path, map_location="cpu", weights_only=False)
    except Exception as exc:
        raise CheckpointError(f"cannot read checkpoint {path}: {exc}") from exc
    if not isinstance(checkpoint, dict) or "arch" not in checkpoint or "state_dict" not in checkpoint:
        raise CheckpointError(f"{path} is not a generator checkpoint (arch + state_dict)")
    module = build_module(checkpoint["arch"])
    try:
        module.load_state_dict(checkpoint["state_dict"])
    except Exception as exc:
        raise CheckpointError(f"state_dict does not fit the declared arch: {exc}") from exc
    module.eval()
    return checkpoint["arch"], module
