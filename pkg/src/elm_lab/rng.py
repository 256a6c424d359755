"""Reproducible counter-based random number streams.

Every stochastic component takes a :class:`SeededRng` identified by a
``(seed, stream)`` pair.  Streams are backed by the Philox counter-based
generator keyed with exactly that pair, so two streams with equal
identifiers produce bitwise-identical draws, independent of creation
order.  Substreams are derived with a fixed splitmix-style hash so that
experiment cells (lambda-index, N-index, run-index) are order-independent.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def mix_stream(stream: int, *indices: int) -> int:
    """Fold ``indices`` into ``stream`` with a fixed 64-bit mixing function."""
    h = stream & _MASK64
    for idx in indices:
        h = (h ^ ((idx & _MASK64) + _GOLDEN + ((h << 6) & _MASK64) + (h >> 2))) & _MASK64
        # splitmix64 finalizer for avalanche
        h = (h ^ (h >> 30)) * 0xBF58476D1CE4E5B9 & _MASK64
        h = (h ^ (h >> 27)) * 0x94D049BB133111EB & _MASK64
        h = h ^ (h >> 31)
    return h


class SeededRng:
    """A named random stream: ``(seed, stream)`` fully determines all draws."""

    def __init__(self, seed: int, stream: int = 0):
        self.seed = int(seed) & _MASK64
        self.stream = int(stream) & _MASK64
        self._generator: np.random.Generator | None = None

    @property
    def generator(self) -> np.random.Generator:
        if self._generator is None:
            bitgen = np.random.Philox(key=[self.seed, self.stream])
            self._generator = np.random.Generator(bitgen)
        return self._generator

    def derive(self, *indices: int) -> "SeededRng":
        """A fresh stream for a subtask, at a fixed function of the indices."""
        return SeededRng(self.seed, mix_stream(self.stream, *indices))

    def __repr__(self) -> str:
        return f"SeededRng(seed={self.seed}, stream={self.stream})"
