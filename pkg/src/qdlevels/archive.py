"""MAP-Elites archive: one best individual per behavior bin."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Any


@dataclass
class Elite:
    genome: Any  # CppnGenome or a flat real vector
    fitness: float
    bin_key: tuple
    birth_index: int


@dataclass
class QdArchive:
    """Bin -> elite map with insertion statistics.

    Replacement is strict: a candidate only displaces an incumbent with
    strictly higher fitness, so per-bin fitness never decreases. ``events``
    records every accepted insertion for replay checks.
    """

    domain: str
    log_every: int = 100
    occupied: dict[tuple, Elite] = field(default_factory=dict)
    evaluations: int = 0
    log: list[tuple[int, int]] = field(default_factory=list)
    events: list[tuple[int, tuple, float]] = field(default_factory=list)

    def insert(self, candidate: Elite) -> bool:
        incumbent = self.occupied.get(candidate.bin_key)
        if incumbent is not None and candidate.fitness <= incumbent.fitness:
            return False
        self.occupied[candidate.bin_key] = candidate
        self.events.append((candidate.birth_index, candidate.bin_key, candidate.fitness))
        return True

    def record_evaluation(self, candidate: Elite | None) -> bool:
        """Count one evaluation, inserting when the candidate is usable."""
        accepted = self.insert(candidate) if candidate is not None else False
        self.evaluations += 1
        if self.evaluations % self.log_every == 0:
            self.log.append((self.evaluations, self.filled_bin_count()))
        return accepted

    def filled_bin_count(self) -> int:
        return len(self.occupied)

    def sample_elite(self, rng: random.Random) -> Elite:
        """Uniform over occupied bins (not over insertion history)."""
        keys = list(self.occupied)
        return self.occupied[keys[rng.randrange(len(keys))]]
