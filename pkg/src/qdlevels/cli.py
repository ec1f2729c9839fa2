"""Command-line entry point: run, render, corpus-stats, heatmap."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import corpus, documents, mario, render, zelda
from .evolution import ConfigError, load_config, run_map_elites
from .tiles import stitch_horizontal

USAGE_EXIT = 2


def _cmd_run(args) -> int:
    config_path = Path(args.config)
    if not config_path.exists():
        print(f"error: config file {config_path} not found", file=sys.stderr)
        return USAGE_EXIT
    config = load_config(config_path)
    if args.seed is not None:
        config.seed = args.seed
    config.validate()

    archive = run_map_elites(config)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    dump = documents.archive_to_text(archive, config.domain, config.encoding)
    (out_dir / "archive.txt").write_text(dump, encoding="utf-8")
    (out_dir / "log.csv").write_text(documents.log_to_csv(archive), encoding="utf-8")
    print(
        f"{config.domain}/{config.encoding} seed {config.seed}: "
        f"{archive.evaluations} evaluations, {archive.filled_bin_count()} bins filled"
    )
    print(f"wrote {out_dir / 'archive.txt'} and {out_dir / 'log.csv'}")
    return 0


def _cmd_render(args) -> int:
    path = Path(args.infile)
    if not path.exists():
        print(f"error: input file {path} not found", file=sys.stderr)
        return USAGE_EXIT
    text = path.read_text(encoding="utf-8")
    header = text.splitlines()[0] if text else ""
    if header == documents.MARIO_LEVEL_HEADER:
        segments = documents.mario_level_from_text(text)
        level = mario.extend_pipes(stitch_horizontal(segments))
        trace = None
        if args.solve:
            solution = mario.solve_mario(segments)
            trace = solution.trace if solution else None
        rendered = render.mario_text(level, trace)
    elif header == documents.DUNGEON_HEADER:
        layout = documents.dungeon_from_text(text)
        solution = zelda.solve_dungeon(layout) if args.solve else None
        rendered = render.dungeon_text(layout, solution, mark_unreachable=args.solve)
    else:
        print(f"error: unrecognized document header {header!r}", file=sys.stderr)
        return USAGE_EXIT
    if args.out:
        Path(args.out).write_text(rendered, encoding="utf-8")
    else:
        sys.stdout.write(rendered)
    return 0


def _cmd_corpus_stats(args) -> int:
    directory = Path(args.dir)
    if not directory.is_dir():
        print(f"error: corpus directory {directory} not found", file=sys.stderr)
        return USAGE_EXIT
    if args.game == "mario":
        stats = corpus.mario_corpus_stats(directory)
        for name, width, windows in stats.files:
            print(f"{name}: width {width}, windows {windows}")
        print(f"files {len(stats.files)}")
        print(f"total windows {stats.total_windows}")
    else:
        stats = corpus.zelda_corpus_stats(directory)
        print(f"total rooms {stats.total_rooms}")
        print(f"unique rooms {stats.unique_rooms}")
        for tile, count in sorted(stats.tile_histogram.items()):
            print(f"tile {tile}: {count}")
    return 0


def _cmd_heatmap(args) -> int:
    path = Path(args.archive)
    if not path.exists():
        print(f"error: archive dump {path} not found", file=sys.stderr)
        return USAGE_EXIT
    text = path.read_text(encoding="utf-8")
    records = documents.archive_records_from_text(text)
    domain = "mario"
    for line in text.splitlines():
        if line.startswith("domain "):
            domain = line.split()[1]
            break
    csv_text = documents.heatmap_csv(records, domain)
    if args.out:
        Path(args.out).write_text(csv_text, encoding="utf-8")
        print(f"wrote {args.out} ({len(records)} bins)")
    else:
        sys.stdout.write(csv_text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qdlevels",
        description="Quality-diversity level generation over generator latent spaces",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run the archive search from a config file")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--seed", type=int, default=None, help="override the config seed")
    p_run.add_argument("--out", default="run-out", help="output directory")
    p_run.set_defaults(func=_cmd_run)

    p_render = sub.add_parser("render", help="render a level or dungeon document")
    p_render.add_argument("--in", dest="infile", required=True)
    p_render.add_argument("--solve", action="store_true", help="overlay the solution")
    p_render.add_argument("--out", default=None)
    p_render.set_defaults(func=_cmd_render)

    p_stats = sub.add_parser("corpus-stats", help="report corpus window/room counts")
    p_stats.add_argument("--game", choices=("mario", "zelda"), required=True)
    p_stats.add_argument("--dir", required=True)
    p_stats.set_defaults(func=_cmd_corpus_stats)

    p_heat = sub.add_parser("heatmap", help="archive dump to a fitness CSV")
    p_heat.add_argument("--archive", required=True)
    p_heat.add_argument("--out", default=None)
    p_heat.set_defaults(func=_cmd_heatmap)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, corpus.ParseError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_EXIT


if __name__ == "__main__":
    sys.exit(main())
