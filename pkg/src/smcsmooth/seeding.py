"""Reproducible random streams.

Each generator is keyed by ``(master seed, stream, replicate)``. Stream
``DATA`` simulates observations, stream ``FILTER`` drives a replicate's
particle filter.
"""

import numpy as np

DATA = 0
FILTER = 1


def make_rng(seed, stream=FILTER, replicate=0):
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(stream), int(replicate)))
    return np.random.Generator(np.random.PCG64(ss))
