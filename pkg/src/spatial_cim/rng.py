"""
Seeded random streams.

Every generator in the package comes from ``stream``: a PCG64 generator
seeded by ``SeedSequence(seed, spawn_key=(kind, *sub))``. Graph construction,
initial noise and annealing restarts therefore draw from independent streams
that depend only on the master seed and the stream key, never on the order in
which streams are created or on the number of workers.
"""
from enum import IntEnum

import numpy as np


class Stream(IntEnum):
    GRAPH = 0
    NOISE = 1
    ANNEAL = 2


def stream(seed: int, kind: Stream, *sub: int) -> np.random.Generator:
    """Return the generator for ``(seed, kind, *sub)``."""
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(kind), *map(int, sub)))
    return np.random.Generator(np.random.PCG64(ss))


def derived_int_seed(seed: int, kind: Stream, *sub: int) -> int:
    """32-bit integer seed for libraries that take plain ints (networkx)."""
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(kind), *map(int, sub)))
    return int(ss.generate_state(1, dtype=np.uint32)[0])
