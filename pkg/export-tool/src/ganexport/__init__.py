"""Checkpoint-to-GANW converter with reference fixtures."""

from .export import ExportManifest, export_checkpoint, write_ganw
from .model import (
    CheckpointError,
    UnsupportedLayerError,
    build_module,
    generator_arch,
    load_checkpoint,
    synthesize_checkpoint,
)

__all__ = [name for name in dir() if not name.startswith("_")]
