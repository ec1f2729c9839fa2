import math
import random

import pytest

from qdlevels.archive import Elite, QdArchive


def elite(bin_key, fitness, birth=0):
    return Elite(genome=None, fitness=fitness, bin_key=bin_key, birth_index=birth)


class TestInsert:
    def test_empty_bin_accepts(self):
        archive = QdArchive(domain="zelda")
        assert archive.insert(elite((1, 2, 3), 0.5))
        assert archive.filled_bin_count() == 1

    def test_lower_fitness_rejected(self):
        archive = QdArchive(domain="zelda")
        archive.insert(elite((0, 0, 1), 5.0))
        assert not archive.insert(elite((0, 0, 1), 3.0))
        assert archive.occupied[(0, 0, 1)].fitness == 5.0

    def test_tie_keeps_incumbent(self):
        archive = QdArchive(domain="zelda")
        archive.insert(elite((0, 0, 1), 5.0, birth=1))
        assert not archive.insert(elite((0, 0, 1), 5.0, birth=2))
        assert archive.occupied[(0, 0, 1)].birth_index == 1

    def test_zero_fitness_occupies_but_loses(self):
        archive = QdArchive(domain="zelda")
        assert archive.insert(elite((0, 0, 1), 0.0))
        assert archive.insert(elite((0, 0, 1), 0.001))

    def test_per_bin_fitness_never_decreases(self):
        rng = random.Random(8)
        archive = QdArchive(domain="mario")
        best = {}
        for i in range(2000):
            key = (rng.randrange(3), rng.randrange(3), rng.randrange(3))
            fitness = rng.random()
            archive.insert(elite(key, fitness, birth=i))
            best[key] = max(best.get(key, -1.0), fitness)
            assert archive.occupied[key].fitness == best[key]

    def test_replaying_events_rebuilds_the_archive(self):
        rng = random.Random(9)
        archive = QdArchive(domain="mario")
        for i in range(5000):
            key = (rng.randrange(4), rng.randrange(4), rng.randrange(4))
            archive.insert(elite(key, rng.random(), birth=i))
        replay = {}
        for _, key, fitness in archive.events:
            assert key not in replay or fitness > replay[key]
            replay[key] = fitness
        assert replay == {k: e.fitness for k, e in archive.occupied.items()}
        assert archive.filled_bin_count() == len(replay)


class TestBookkeeping:
    def test_fresh_archive_is_empty(self):
        assert QdArchive(domain="zelda").filled_bin_count() == 0

    def test_log_records_every_hundredth_evaluation(self):
        archive = QdArchive(domain="zelda", log_every=100)
        for i in range(250):
            archive.record_evaluation(elite((i, 0, 0), 1.0, birth=i))
        assert [entry[0] for entry in archive.log] == [100, 200]
        assert archive.log[0][1] == 100

    def test_discarded_evaluations_still_count(self):
        archive = QdArchive(domain="zelda", log_every=10)
        for _ in range(10):
            archive.record_evaluation(None)
        assert archive.evaluations == 10
        assert archive.log == [(10, 0)]

    def test_bin_sampling_is_uniform(self):
        archive = QdArchive(domain="zelda")
        for b in range(10):
            archive.insert(elite((b,), float(b)))
        rng = random.Random(314)
        counts = {b: 0 for b in range(10)}
        trials = 100_000
        for _ in range(trials):
            counts[archive.sample_elite(rng).bin_key[0]] += 1
        expected = trials / 10
        bound = 3 * math.sqrt(trials * 0.1 * 0.9)
        for b in range(10):
            assert abs(counts[b] - expected) <= bound

    def test_sampling_empty_archive_fails(self):
        with pytest.raises(ValueError):
            QdArchive(domain="zelda").sample_elite(random.Random(0))
