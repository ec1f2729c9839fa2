"""Generator-network inference from portable GANW weight files.

The GANW container is a little-endian binary format:

    magic "GANW" | version u32 (=1) | latent_size u32 | out_width u32 |
    out_height u32 | out_channels u32 | record_count u32

followed by one record per layer tensor:

    name_len u32 | name utf-8 | layer_meta_len u32 | layer_meta utf-8 |
    rank u32 | dims u32 x rank | data f32 x prod(dims), row-major

``layer_meta`` is a space-separated list of key=value pairs. Supported
record kinds:

    kind=conv_transpose kernel=K stride=S pad=P activation=A
        tensor shape (in_channels, out_channels, K, K)
    kind=batch_norm eps=E activation=A
        tensor shape (4, channels): rows are scale, shift, running mean,
        running variance

with activation one of none|relu|tanh|sigmoid, applied after the layer.
"""
from __future__ import annotations

import math
import struct
from dataclasses import dataclass

import numpy as np

from .tiles import TileGrid

MAGIC = b"GANW"
VERSION = 1

ACTIVATIONS = ("none", "relu", "tanh", "sigmoid")
RECORD_KINDS = ("conv_transpose", "batch_norm")


class GanwError(Exception):
    """Base class for weight-file problems."""


class GanwFormatError(GanwError):
    """Not a GANW file, or an unsupported container version."""


class GanwCorruptError(GanwError):
    """Structurally valid header but inconsistent or truncated payload."""


class GeneratorModelError(GanwError):
    """Well-formed records that do not describe a usable generator."""


@dataclass
class TensorRecord:
    name: str
    meta: dict[str, str]
    shape: tuple[int, ...]
    data: np.ndarray  # float32, shape == self.shape

    @property
    def kind(self) -> str:
        return self.meta.get("kind", "")

    @property
    def activation(self) -> str:
        return self.meta.get("activation", "none")


@dataclass
class GeneratorWeights:
    records: list[TensorRecord]
    latent_size: int
    out_width: int
    out_height: int
    out_channels: int


def _parse_meta(text: str) -> dict[str, str]:
    meta: dict[str, str] = {}
    for token in text.split():
        if "=" not in token:
            raise GanwCorruptError(f"bad layer_meta token {token!r}")
        key, value = token.split("=", 1)
        meta[key] = value
    return meta


class _Reader:
    def __init__(self, blob: bytes):
        self.blob = blob
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.blob):
            raise GanwCorruptError("unexpected end of file")
        out = self.blob[self.pos : self.pos + n]
        self.pos += n
        return out

    def u32(self) -> int:
        return struct.unpack("<I", self.take(4))[0]


def _check_record(record: TensorRecord) -> None:
    kind = record.kind
    if kind not in RECORD_KINDS:
        raise GeneratorModelError(f"record {record.name!r}: unknown kind {kind!r}")
    if record.activation not in ACTIVATIONS:
        raise GeneratorModelError(
            f"record {record.name!r}: unknown activation {record.activation!r}"
        )
    if kind == "conv_transpose":
        if len(record.shape) != 4:
            raise GeneratorModelError(f"record {record.name!r}: conv tensors are rank 4")
        k = int(record.meta.get("kernel", "0"))
        if record.shape[2] != k or record.shape[3] != k:
            raise GeneratorModelError(
                f"record {record.name!r}: kernel meta {k} does not match tensor shape"
            )
        for key in ("stride", "pad"):
            if key not in record.meta:
                raise GeneratorModelError(f"record {record.name!r}: missing {key}")
    else:  # batch_norm
        if len(record.shape) != 2 or record.shape[0] != 4:
            raise GeneratorModelError(
                f"record {record.name!r}: batch_norm tensors have shape (4, channels)"
            )


def _check_chain(weights: GeneratorWeights) -> None:
    """Channel and spatial dimensions must chain from z to the output grid."""
    channels = weights.latent_size
    h = w = 1
    saw_conv = False
    for record in weights.records:
        if record.kind == "conv_transpose":
            saw_conv = True
            cin, cout, k, _ = record.shape
            if cin != channels:
                raise GeneratorModelError(
                    f"record {record.name!r}: expects {cin} input channels, "
                    f"chain provides {channels}"
                )
            stride = int(record.meta["stride"])
            pad = int(record.meta["pad"])
            h = (h - 1) * stride + k - 2 * pad
            w = (w - 1) * stride + k - 2 * pad
            if h < 1 or w < 1:
                raise GeneratorModelError(f"record {record.name!r}: collapses the grid")
            channels = cout
        else:
            if record.shape[1] != channels:
                raise GeneratorModelError(
                    f"record {record.name!r}: normalizes {record.shape[1]} channels, "
                    f"chain provides {channels}"
                )
    if not saw_conv:
        raise GeneratorModelError("generator needs at least one conv_transpose layer")
    if channels != weights.out_channels:
        raise GeneratorModelError(
            f"chain ends with {channels} channels, header declares {weights.out_channels}"
        )
    if (h, w) != (weights.out_height, weights.out_width):
        raise GeneratorModelError(
            f"chain produces {w}x{h} output, header declares "
            f"{weights.out_width}x{weights.out_height}"
        )


def parse_generator_weights(blob: bytes) -> GeneratorWeights:
    reader = _Reader(blob)
    if len(blob) < 4 or reader.take(4) != MAGIC:
        raise GanwFormatError("missing GANW magic")
    version = reader.u32()
    if version != VERSION:
        raise GanwFormatError(f"unsupported GANW version {version}")
    latent_size = reader.u32()
    out_width = reader.u32()
    out_height = reader.u32()
    out_channels = reader.u32()
    record_count = reader.u32()
    if min(latent_size, out_width, out_height, out_channels) < 1:
        raise GanwCorruptError("header dimensions must be positive")
    if record_count == 0:
        raise GeneratorModelError("generator needs at least one layer record")

    records: list[TensorRecord] = []
    seen_names: set[str] = set()
    for _ in range(record_count):
        name = reader.take(reader.u32()).decode("utf-8")
        if not name or name in seen_names:
            raise GanwCorruptError(f"record name {name!r} empty or duplicated")
        seen_names.add(name)
        meta = _parse_meta(reader.take(reader.u32()).decode("utf-8"))
        rank = reader.u32()
        if rank < 1 or rank > 8:
            raise GanwCorruptError(f"record {name!r}: bad rank {rank}")
        shape = tuple(reader.u32() for _ in range(rank))
        count = math.prod(shape)
        if count < 1:
            raise GanwCorruptError(f"record {name!r}: empty tensor")
        data = np.frombuffer(reader.take(4 * count), dtype="<f4").reshape(shape)
        record = TensorRecord(name=name, meta=meta, shape=shape, data=data)
        _check_record(record)
        records.append(record)
    if reader.pos != len(blob):
        raise GanwCorruptError(f"{len(blob) - reader.pos} trailing bytes")

    weights = GeneratorWeights(
        records=records,
        latent_size=latent_size,
        out_width=out_width,
        out_height=out_height,
        out_channels=out_channels,
    )
    _check_chain(weights)
    return weights


def load_generator_weights(path) -> GeneratorWeights:
    with open(path, "rb") as fh:
        return parse_generator_weights(fh.read())


def clamp_latent(z) -> np.ndarray:
    """Latent values are clamped to [-1, 1] before any decoding."""
    return np.clip(np.asarray(z, dtype=np.float64), -1.0, 1.0)


def _conv_transpose(x: np.ndarray, record: TensorRecord) -> np.ndarray:
    """Transposed convolution, float32 in/out with float64 accumulation.

    The scatter order over (input channel, kernel row, kernel col) is fixed
    so results are bit-stable across runs.
    """
    stride = int(record.meta["stride"])
    pad = int(record.meta["pad"])
    cin, cout, k, _ = record.shape
    h, w = x.shape[1], x.shape[2]
    full_h = (h - 1) * stride + k
    full_w = (w - 1) * stride + k
    acc = np.zeros((cout, full_h, full_w), dtype=np.float64)
    kernel = record.data.astype(np.float64)
    for i in range(cin):
        plane = x[i].astype(np.float64)
        for ky in range(k):
            for kx in range(k):
                acc[:, ky : ky + h * stride : stride, kx : kx + w * stride : stride] += (
                    kernel[i, :, ky, kx][:, None, None] * plane[None, :, :]
                )
    out_h = full_h - 2 * pad
    out_w = full_w - 2 * pad
    return acc[:, pad : pad + out_h, pad : pad + out_w].astype(np.float32)


def _batch_norm(x: np.ndarray, record: TensorRecord) -> np.ndarray:
    eps = float(record.meta.get("eps", "1e-5"))
    params = record.data.astype(np.float64)
    scale, shift, mean, var = (params[i][:, None, None] for i in range(4))
    y = scale * (x.astype(np.float64) - mean) / np.sqrt(var + eps) + shift
    return y.astype(np.float32)


def _apply_activation(x: np.ndarray, name: str) -> np.ndarray:
    if name == "none":
        return x
    if name == "relu":
        return np.maximum(x, np.float32(0.0))
    if name == "tanh":
        return np.tanh(x)
    if name == "sigmoid":
        return (1.0 / (1.0 + np.exp(-x.astype(np.float64)))).astype(np.float32)
    raise GeneratorModelError(f"unknown activation {name!r}")


def forward_scores(weights: GeneratorWeights, z) -> np.ndarray:
    """Raw channel scores (out_channels, out_height, out_width) for latent z."""
    z = clamp_latent(z)
    if z.ndim != 1 or z.size != weights.latent_size:
        raise ValueError(
            f"latent length {z.size} does not match model latent_size "
            f"{weights.latent_size}"
        )
    x = z.astype(np.float32).reshape(weights.latent_size, 1, 1)
    for record in weights.records:
        if record.kind == "conv_transpose":
            x = _conv_transpose(x, record)
        else:
            x = _batch_norm(x, record)
        x = _apply_activation(x, record.activation)
    return x


def argmax_tiles(scores: np.ndarray, tileset_size: int | None = None) -> TileGrid:
    """Per-cell argmax over channel scores; ties go to the lowest channel."""
    cells = np.argmax(scores, axis=0).astype(np.int16)
    return TileGrid(cells, tileset_size if tileset_size is not None else scores.shape[0])


def generate_segment(weights: GeneratorWeights, z, crop_w: int, crop_h: int) -> TileGrid:
    """Decode latent z to a tile grid cropped to the upper-left region."""
    if crop_w < 1 or crop_w > weights.out_width or crop_h < 1 or crop_h > weights.out_height:
        raise ValueError(
            f"crop {crop_w}x{crop_h} exceeds model output "
            f"{weights.out_width}x{weights.out_height}"
        )
    scores = forward_scores(weights, z)
    grid = argmax_tiles(scores)
    return TileGrid(grid.cells[:crop_h, :crop_w], weights.out_channels)


# Analytic stand-in decoder: a fixed sinusoidal basis keyed by latent index
# and cell position, so every downstream component can run without weights.

_STUB_BASIS: dict[tuple[int, int, int], np.ndarray] = {}


def _stub_basis(n: int, w: int, h: int) -> np.ndarray:
    key = (n, w, h)
    basis = _STUB_BASIS.get(key)
    if basis is None:
        i = np.arange(1, n + 1, dtype=np.float64)[:, None, None]
        y = np.arange(1, h + 1, dtype=np.float64)[None, :, None]
        x = np.arange(1, w + 1, dtype=np.float64)[None, None, :]
        basis = np.sin(0.5 * i * x + 0.3 * i * y).reshape(n, h * w)
        _STUB_BASIS[key] = basis
    return basis


def stub_decode(z, w: int, h: int, tileset_size: int) -> TileGrid:
    """tile(x, y) = floor(1000 * |sum_i z_i sin(...)|) mod tileset_size."""
    if w < 1 or h < 1:
        raise ValueError("grid dimensions must be positive")
    if tileset_size < 1:
        raise ValueError("tileset_size must be positive")
    z = np.asarray(z, dtype=np.float64)
    mixed = z @ _stub_basis(z.size, w, h)
    cells = (np.floor(1000.0 * np.abs(mixed)) % tileset_size).astype(np.int16)
    return TileGrid(cells.reshape(h, w), tileset_size)


class StubDecoder:
    """Deterministic analytic decoder used in place of trained weights."""

    def __init__(self, tileset_size: int):
        self.tileset_size = tileset_size

    def decode(self, z, width: int, height: int) -> TileGrid:
        return stub_decode(clamp_latent(z), width, height, self.tileset_size)


class WeightsDecoder:
    """Decoder backed by a loaded generator; crops the upper-left region."""

    def __init__(self, weights: GeneratorWeights):
        self.weights = weights
        self.tileset_size = weights.out_channels

    def decode(self, z, width: int, height: int) -> TileGrid:
        return generate_segment(self.weights, clamp_latent(z), width, height)
