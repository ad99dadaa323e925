"""Seeded randomness.

Every random draw in the package goes through a ``numpy.random.Generator``
backed by the counter-based Philox bit generator, so a seed reproduces the
same stream on every platform. Gaussian variates use Box-Muller on Philox
uniforms instead of numpy's ziggurat so the transform itself is pinned here.
"""

import numpy as np

PRNG_NAME = "philox4x64-boxmuller-v1"


GRAPH_STREAM = 0
NOISE_STREAM = 1
SAMPLING_STREAM = 2


def make_rng(seed, stream=0):
    """Philox keyed by ``seed``; ``stream`` starts the counter in a disjoint block."""
    key = int(seed) & 0xFFFFFFFFFFFFFFFF
    return np.random.Generator(np.random.Philox(key=key, counter=[0, 0, 0, int(stream)]))


def gaussian(rng, size, var=1.0):
    """Draw iid N(0, var) samples of the given size with Box-Muller."""
    size = int(np.prod(size)) if np.ndim(size) else int(size)
    half = (size + 1) // 2
    u1 = 1.0 - rng.random(half)  # in (0, 1], keeps log finite
    u2 = rng.random(half)
    r = np.sqrt(-2.0 * np.log(u1))
    z = np.concatenate([r * np.cos(2 * np.pi * u2), r * np.sin(2 * np.pi * u2)])
    return np.sqrt(var) * z[:size]
