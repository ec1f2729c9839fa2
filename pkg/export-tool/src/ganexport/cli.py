"""Command line: synthesize stand-in checkpoints and export them to GANW."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .export import export_checkpoint
from .model import CheckpointError, UnsupportedLayerError, synthesize_checkpoint

GAMES = {"zelda": (10, 3), "mario": (30, 13)}


def _cmd_synth(args) -> int:
    latent, depth = GAMES[args.game]
    synthesize_checkpoint(latent, depth, args.seed, args.out)
    print(f"wrote {args.out} (latent {latent}, depth {depth}, seed {args.seed})")
    return 0


def _cmd_export(args) -> int:
    manifest = export_checkpoint(
        args.src, args.out_ganw, args.out_fixture,
        n_fixtures=args.fixtures, seed=args.seed,
    )
    manifest_path = Path(args.out_ganw).with_suffix(".manifest.json")
    manifest_path.write_text(manifest.to_json(), encoding="utf-8")
    print(
        f"exported {args.src}: latent {manifest.latent_size}, "
        f"{manifest.out_width}x{manifest.out_height}x{manifest.out_channels}, "
        f"{len(manifest.layers)} records"
    )
    print(f"wrote {manifest.ganw_path}, {manifest.fixture_path}, {manifest_path}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="ganexport", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_synth = sub.add_parser("synth", help="write a deterministic stand-in checkpoint")
    p_synth.add_argument("--game", choices=sorted(GAMES), required=True)
    p_synth.add_argument("--seed", type=int, default=0)
    p_synth.add_argument("--out", required=True)
    p_synth.set_defaults(func=_cmd_synth)

    p_export = sub.add_parser("export", help="checkpoint -> GANW + fixture + manifest")
    p_export.add_argument("--src", required=True)
    p_export.add_argument("--out-ganw", required=True)
    p_export.add_argument("--out-fixture", required=True)
    p_export.add_argument("--fixtures", type=int, default=10)
    p_export.add_argument("--seed", type=int, default=0)
    p_export.set_defaults(func=_cmd_export)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (CheckpointError, UnsupportedLayerError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
