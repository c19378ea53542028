"""Seeded random streams.

Every stream is a Philox-4x64 counter-based generator keyed by
``(seed, stream)``, so member ``i`` of an ensemble never depends on how
many members were drawn before it or on which worker drew it.
"""

import numpy as np

ALGORITHM = "philox4x64-10"


def stream(seed, index=0):
    key = np.array([int(seed) & (2**64 - 1), int(index) & (2**64 - 1)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))
