"""Independent random streams derived from one 64-bit seed.

Stream ``name`` is ``SeedSequence(seed, spawn_key=(crc32(name),))``.  The
key depends only on the name, so adding a stream never shifts another.
"""

import zlib

import numpy as np

STREAMS = ("family", "seeding", "graph", "simulation")


def rng_stream(seed: int, name: str) -> np.random.Generator:
    if not 0 <= seed < 2**64:
        raise ValueError("seed must fit in 64 unsigned bits")
    key = zlib.crc32(name.encode())
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(key,)))
