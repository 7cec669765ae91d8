"""Per-replicate random streams.

Replicate ``i`` of a simulation with master seed ``s`` draws from
``numpy.random.default_rng([s, i])``, so results do not depend on how
replicates are batched or ordered.
"""

import numpy as np


def replicate_rng(seed, index):
    return np.random.default_rng([int(seed), int(index)])


def replicate_generators(seed, indices):
    return [replicate_rng(seed, i) for i in indices]


def noise_block(seed, indices, length):
    """Standard normal draws, one row of ``length`` per replicate index."""
    out = np.empty((len(indices), length))
    for row, i in enumerate(indices):
        replicate_rng(seed, i).standard_normal(out=out[row])
    return out
