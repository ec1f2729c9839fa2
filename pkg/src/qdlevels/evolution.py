"""The generate-evaluate-insert loop and its run configuration.

Runs are reproducible from the seed alone: every evaluation index derives
its own generator stream, offspring are produced serially in fixed-size
batches against the archive state at batch start, and results are inserted
in evaluation-index order. Parallel workers therefore produce archives
byte-identical to a serial run.
"""
from __future__ import annotations

import hashlib
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from . import cppn, encodings, mario, zelda
from .archive import Elite, QdArchive
from .generator import StubDecoder, WeightsDecoder, load_generator_weights

CONFIG_HEADER = "qdlevels-config 1"

DOMAINS = ("mario", "zelda")
ENCODINGS = ("cppn2gan", "direct2gan")

DEFAULT_LATENT = {"mario": 30, "zelda": 10}
TILESETS = {"mario": mario.MARIO_TILESET, "zelda": zelda.ZELDA_TILESET}


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    domain: str
    encoding: str
    seed: int = 0
    decoder: str = "stub"  # "stub" or a path to a GANW weight file
    init_count: int = 100
    generated_count: int = 50_000
    batch_size: int = 32
    workers: int = 1
    log_every: int = 100
    store_unsolvable: bool = True
    soft_locked_open: bool = True
    solver_budget: int = zelda.SOLVER_BUDGET
    segments: int = 10
    grid_rows: int = 10
    grid_cols: int = 10
    latent_size: int | None = None

    def resolved_latent(self) -> int:
        return self.latent_size if self.latent_size else DEFAULT_LATENT[self.domain]

    def validate(self) -> None:
        if self.domain not in DOMAINS:
            raise ConfigError(f"unknown domain {self.domain!r}")
        if self.encoding not in ENCODINGS:
            raise ConfigError(f"unknown encoding {self.encoding!r}")
        if self.init_count < 1 or self.generated_count < 0:
            raise ConfigError("init_count must be >= 1 and generated_count >= 0")
        if self.batch_size < 1 or self.workers < 1 or self.log_every < 1:
            raise ConfigError("batch_size, workers and log_every must be >= 1")
        if min(self.segments, self.grid_rows, self.grid_cols) < 1:
            raise ConfigError("segments and grid dims must be >= 1")


_BOOL_KEYS = {"store_unsolvable", "soft_locked_open"}
_INT_KEYS = {
    "seed", "init_count", "generated_count", "batch_size", "workers", "log_every",
    "solver_budget", "segments", "grid_rows", "grid_cols", "latent_size",
}


def config_from_text(text: str) -> RunConfig:
    lines = text.splitlines()
    if not lines or lines[0].strip() != CONFIG_HEADER:
        raise ConfigError(f"config must start with {CONFIG_HEADER!r}")
    values: dict = {}
    for lineno, line in enumerate(lines[1:], start=2):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, raw = (part.strip() for part in line.split("=", 1))
        if key in _BOOL_KEYS:
            if raw not in ("true", "false"):
                raise ConfigError(f"line {lineno}: {key} must be true or false")
            values[key] = raw == "true"
        elif key in _INT_KEYS:
            try:
                values[key] = int(raw)
            except ValueError as exc:
                raise ConfigError(f"line {lineno}: {key} must be an integer") from exc
        elif key in ("domain", "encoding", "decoder"):
            values[key] = raw
        else:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
    if "domain" not in values or "encoding" not in values:
        raise ConfigError("config needs at least domain and encoding")
    config = RunConfig(**values)
    config.validate()
    return config


def load_config(path) -> RunConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return config_from_text(fh.read())


def derive_seed(run_seed: int, evaluation_index: int) -> int:
    """Stable per-evaluation seed; hashlib keeps it platform-independent."""
    digest = hashlib.blake2b(
        f"{run_seed}:{evaluation_index}".encode(), digest_size=8
    ).digest()
    return int.from_bytes(digest, "little")


def build_decoder(config: RunConfig):
    if config.decoder == "stub":
        return StubDecoder(TILESETS[config.domain])
    weights = load_generator_weights(config.decoder)
    if weights.latent_size != config.resolved_latent():
        raise ConfigError(
            f"weights expect latent {weights.latent_size}, "
            f"config resolves to {config.resolved_latent()}"
        )
    return WeightsDecoder(weights)


class MarioEvaluator:
    def __init__(self, config: RunConfig):
        self.spec = encodings.MarioGenomeSpec(config.segments, config.resolved_latent())
        self.encoding = config.encoding
        self.decoder = build_decoder(config)

    def evaluate(self, genome) -> tuple[tuple, float] | None:
        if self.encoding == "cppn2gan":
            segments = encodings.cppn_to_mario_level(genome, self.decoder, self.spec)
        else:
            segments = encodings.direct_to_mario(genome, self.decoder, self.spec)
        segments = [mario.extend_pipes(seg) for seg in segments]
        scores = mario.level_scores(segments)
        return mario.mario_bin(scores), mario.mario_fitness(segments)


class ZeldaEvaluator:
    def __init__(self, config: RunConfig):
        self.spec = encodings.DungeonGenomeSpec(
            config.grid_rows, config.grid_cols, config.resolved_latent()
        )
        self.encoding = config.encoding
        self.decoder = build_decoder(config)
        self.budget = config.solver_budget
        self.soft_open = config.soft_locked_open

    def evaluate(self, genome) -> tuple[tuple, float] | None:
        if self.encoding == "cppn2gan":
            layout = encodings.cppn_to_zelda_dungeon(genome, self.decoder, self.spec)
        else:
            layout = encodings.direct_to_zelda(genome, self.decoder, self.spec)
        reachable = zelda.reachable_rooms(layout)
        if not reachable:
            return None  # degenerate layout, nothing to measure
        water, wall = zelda.water_wall_percentages(layout, reachable)
        fitness = zelda.zelda_fitness(
            layout, budget=self.budget, soft_locked_open=self.soft_open,
            reachable=reachable,
        )
        return zelda.zelda_bin(water, wall, len(reachable)), fitness


def make_evaluator(config: RunConfig):
    return MarioEvaluator(config) if config.domain == "mario" else ZeldaEvaluator(config)


class CppnVariation:
    """Fresh genomes are minimal networks; offspring get a 50% chance of
    crossover with a second sampled elite, and always mutate."""

    def __init__(self, config: RunConfig):
        if config.domain == "mario":
            self.inputs, self.outputs = 1, config.resolved_latent()
        else:
            self.inputs, self.outputs = 3, config.resolved_latent() + encodings.AUX_OUTPUTS
        template = cppn.minimal_genome(self.inputs, self.outputs, random.Random(0))
        self.counter = cppn.counter_for(template)

    def fresh(self, rng: random.Random):
        return cppn.minimal_genome(self.inputs, self.outputs, rng)

    def offspring(self, archive: QdArchive, rng: random.Random):
        parent = archive.sample_elite(rng)
        child = parent.genome
        if rng.random() < 0.5:
            mate = archive.sample_elite(rng)
            fitter, other = (parent, mate) if parent.fitness >= mate.fitness else (mate, parent)
            child = cppn.crossover(fitter.genome, other.genome, fitter.genome, rng)
        return cppn.mutate(child, rng, self.counter)


class DirectVariation:
    def __init__(self, config: RunConfig):
        if config.domain == "mario":
            spec = encodings.MarioGenomeSpec(config.segments, config.resolved_latent())
        else:
            spec = encodings.DungeonGenomeSpec(
                config.grid_rows, config.grid_cols, config.resolved_latent()
            )
        self.length = spec.direct_length

    def fresh(self, rng: random.Random):
        return encodings.random_direct_genome(self.length, rng)

    def offspring(self, archive: QdArchive, rng: random.Random):
        a = archive.sample_elite(rng)
        b = archive.sample_elite(rng)
        return encodings.direct_variation(a.genome, b.genome, rng)


def make_variation(config: RunConfig):
    return CppnVariation(config) if config.encoding == "cppn2gan" else DirectVariation(config)


_WORKER_EVALUATOR = None


def _worker_init(config: RunConfig):
    global _WORKER_EVALUATOR
    _WORKER_EVALUATOR = make_evaluator(config)


def _worker_evaluate(genome):
    return _WORKER_EVALUATOR.evaluate(genome)


def run_map_elites(config: RunConfig) -> QdArchive:
    """Seed with random genomes, then sample-vary-evaluate-insert."""
    config.validate()
    evaluator = make_evaluator(config)
    variation = make_variation(config)
    archive = QdArchive(domain=config.domain, log_every=config.log_every)

    pool = None
    if config.workers > 1:
        pool = ProcessPoolExecutor(
            max_workers=config.workers,
            initializer=_worker_init,
            initargs=(config,),
        )

    def evaluate_batch(genomes):
        if pool is not None:
            return list(pool.map(_worker_evaluate, genomes, chunksize=8))
        return [evaluator.evaluate(g) for g in genomes]

    def commit(genomes, base_index):
        for offset, result in enumerate(evaluate_batch(genomes)):
            candidate = None
            if result is not None:
                bin_key, fitness = result
                if fitness > 0.0 or config.store_unsolvable:
                    candidate = Elite(genomes[offset], fitness, bin_key, base_index + offset)
            archive.record_evaluation(candidate)

    try:
        index = 0
        while index < config.init_count:
            size = min(config.batch_size, config.init_count - index)
            genomes = [
                variation.fresh(random.Random(derive_seed(config.seed, index + k)))
                for k in range(size)
            ]
            commit(genomes, index)
            index += size

        total = config.init_count + config.generated_count
        while index < total:
            size = min(config.batch_size, total - index)
            genomes = []
            for k in range(size):
                rng = random.Random(derive_seed(config.seed, index + k))
                if archive.occupied:
                    genomes.append(variation.offspring(archive, rng))
                else:  # nothing evaluable survived the seeding phase
                    genomes.append(variation.fresh(rng))
            commit(genomes, index)
            index += size
    finally:
        if pool is not None:
            pool.shutdown()
    return archive
