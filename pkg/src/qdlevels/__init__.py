"""Quality-diversity level generation over generator latent spaces."""

from .archive import Elite, QdArchive
from .cppn import (
    CppnGenome,
    InnovationCounter,
    activate,
    activate_many,
    crossover,
    minimal_genome,
    mutate,
)
from .encodings import (
    DungeonGenomeSpec,
    DungeonLayout,
    MarioGenomeSpec,
    cppn_to_mario_level,
    cppn_to_zelda_dungeon,
    direct_to_mario,
    direct_to_zelda,
    direct_variation,
    place_keys,
)
from .evolution import RunConfig, run_map_elites
from .generator import (
    GeneratorWeights,
    StubDecoder,
    WeightsDecoder,
    generate_segment,
    load_generator_weights,
    stub_decode,
)
from .mario import mario_bin, mario_fitness, segment_scores, solve_mario
from .tiles import TileGrid
from .zelda import (
    reachable_rooms,
    solve_dungeon,
    water_wall_percentages,
    zelda_bin,
    zelda_fitness,
)

__all__ = [name for name in dir() if not name.startswith("_")]
