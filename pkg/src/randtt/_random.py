"""Reproducible random streams.

Each stream is a Philox counter-based generator keyed by ``(seed, stream_id)``,
so a decomposition stage draws the same numbers no matter what earlier stages
consumed. Normal variates come from the inverse normal CDF of 53-bit uniforms,
which keeps them bit-reproducible.
"""

import numpy as np
from scipy.special import ndtri

_MASK64 = (1 << 64) - 1


class Stream:
    def __init__(self, seed=0, stream_id=0):
        self.seed = int(seed) & _MASK64
        self.stream_id = int(stream_id) & _MASK64
        key = np.array([self.seed, self.stream_id], dtype=np.uint64)
        self._bitgen = np.random.Philox(key=key)
        self._gen = np.random.Generator(self._bitgen)

    def uniform(self, size):
        """Uniforms on the open interval (0, 1)."""
        n = int(np.prod(size))
        k = self._bitgen.random_raw(n) >> np.uint64(11)
        u = (k.astype(np.float64) + 0.5) * 2.0**-53
        return u.reshape(size, order="F") if np.ndim(size) else u

    def normal(self, size):
        return ndtri(self.uniform(size))

    def integers(self, high, size):
        return self._gen.integers(0, high, size=size)

    def signs(self, size):
        return np.where(self.integers(2, size) == 0, -1.0, 1.0)

    def sample(self, population, k):
        """``k`` distinct indices from ``range(population)``."""
        return self._gen.choice(population, size=k, replace=False)


def resolve_seed(seed):
    """Turn ``None`` into a fresh 64-bit seed; pass integers through."""
    if seed is None:
        return int(np.random.SeedSequence().generate_state(1, dtype=np.uint64)[0])
    if isinstance(seed, (int, np.integer)):
        return int(seed) & _MASK64
    raise TypeError(f"seed must be an int or None, got {type(seed).__name__}")
