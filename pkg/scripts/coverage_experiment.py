#!/usr/bin/env python3
"""Coverage comparison between the two encodings on the small dungeon grid.

Runs several seeded searches per encoding, reports filled-bin counts,
medians, and a one-sided rank-sum test. The defaults mirror the acceptance
suite (5x5 grid, 100 init + 5000 generated, 10 seeds per encoding) and take
about two minutes on one core.
"""
import argparse
import time
from statistics import median

from scipy.stats import mannwhitneyu

from qdlevels.evolution import RunConfig, run_map_elites


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seeds", type=int, default=10)
    parser.add_argument("--init", type=int, default=100)
    parser.add_argument("--generated", type=int, default=5000)
    parser.add_argument("--rows", type=int, default=5)
    parser.add_argument("--cols", type=int, default=5)
    parser.add_argument("--domain", choices=("zelda", "mario"), default="zelda")
    args = parser.parse_args()

    counts = {}
    for encoding in ("cppn2gan", "direct2gan"):
        counts[encoding] = []
        for seed in range(args.seeds):
            t0 = time.time()
            config = RunConfig(
                domain=args.domain, encoding=encoding, seed=seed,
                init_count=args.init, generated_count=args.generated,
                grid_rows=args.rows, grid_cols=args.cols,
            )
            filled = run_map_elites(config).filled_bin_count()
            counts[encoding].append(filled)
            print(f"{encoding} seed {seed}: {filled} bins ({time.time() - t0:.1f}s)")

    med_c, med_d = median(counts["cppn2gan"]), median(counts["direct2gan"])
    _, p_value = mannwhitneyu(
        counts["cppn2gan"], counts["direct2gan"], alternative="greater"
    )
    print(f"\nmedian filled bins: cppn2gan {med_c}, direct2gan {med_d}")
    print(f"rank-sum (one-sided, cppn2gan > direct2gan): p = {p_value:.3e}")
    return 0 if med_c > med_d and p_value < 0.05 else 1


if __name__ == "__main__":
    raise SystemExit(main())
