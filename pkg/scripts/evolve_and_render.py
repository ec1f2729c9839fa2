#!/usr/bin/env python3
"""Run a short dungeon search and print the fittest result as text.

Writes the winning dungeon document next to the rendering so it can be
re-rendered later with `qdlevels render --in <file> --solve`.
"""
import argparse
from pathlib import Path

from qdlevels.documents import dungeon_to_text
from qdlevels.encodings import DungeonGenomeSpec, cppn_to_zelda_dungeon, direct_to_zelda
from qdlevels.evolution import RunConfig, run_map_elites, make_evaluator
from qdlevels.render import dungeon_text
from qdlevels.zelda import solve_dungeon


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--encoding", choices=("cppn2gan", "direct2gan"), default="cppn2gan")
    parser.add_argument("--generated", type=int, default=2000)
    parser.add_argument("--rows", type=int, default=5)
    parser.add_argument("--cols", type=int, default=5)
    parser.add_argument("--out", default="best_dungeon.txt")
    args = parser.parse_args()

    config = RunConfig(
        domain="zelda", encoding=args.encoding, seed=args.seed,
        generated_count=args.generated, grid_rows=args.rows, grid_cols=args.cols,
    )
    archive = run_map_elites(config)
    best = max(archive.occupied.values(), key=lambda e: (e.fitness, e.bin_key))
    print(
        f"{archive.filled_bin_count()} bins filled; best fitness {best.fitness:.3f} "
        f"in bin {best.bin_key}"
    )

    evaluator = make_evaluator(config)
    spec = DungeonGenomeSpec(args.rows, args.cols, config.resolved_latent())
    if args.encoding == "cppn2gan":
        layout = cppn_to_zelda_dungeon(best.genome, evaluator.decoder, spec)
    else:
        layout = direct_to_zelda(best.genome, evaluator.decoder, spec)
    solution = solve_dungeon(layout)
    print(dungeon_text(layout, solution, mark_unreachable=True))
    Path(args.out).write_text(dungeon_to_text(layout), encoding="utf-8")
    print(f"dungeon document written to {args.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
