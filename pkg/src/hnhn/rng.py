"""Deterministic counter-based random number generator.

All stochastic pieces of the toolkit (weight init, dropout masks, data
splits, synthetic graphs) draw from this generator so runs are
bit-reproducible for a fixed seed, independent of global RNG state and
of the numpy version in use.

The stream is splitmix64 applied to a running counter: output k of a
generator seeded with s is mix(mix(s) + k). Every draw is a pure
function of (seed, counter), so block requests vectorize cleanly.
"""

from __future__ import annotations

import numpy as np

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_U53_SCALE = float(2.0**-53)


def _mix(x: np.ndarray) -> np.ndarray:
    """splitmix64 finalizer on a uint64 array (wrapping arithmetic)."""
    z = x + _GAMMA
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


class CounterRng:
    """Counter-based RNG producing float64 arrays, owned by the caller."""

    def __init__(self, seed: int):
        self.seed = int(seed)
        # Mix the seed once so nearby seeds give unrelated streams.
        self._base = _mix(np.array([np.uint64(self.seed & 0xFFFFFFFFFFFFFFFF)]))[0]
        self._counter = 0

    def _next_words(self, count: int) -> np.ndarray:
        idx = np.arange(self._counter, self._counter + count, dtype=np.uint64)
        self._counter += count
        return _mix(self._base + idx)

    def random(self, shape: tuple[int, ...] | int) -> np.ndarray:
        """Uniform float64 in [0, 1) with 53-bit mantissas."""
        if isinstance(shape, int):
            shape = (shape,)
        count = int(np.prod(shape)) if shape else 1
        words = self._next_words(count)
        out = (words >> np.uint64(11)).astype(np.float64) * _U53_SCALE
        return out.reshape(shape)

    def uniform(self, low: float, high: float, shape: tuple[int, ...] | int) -> np.ndarray:
        return low + (high - low) * self.random(shape)

    def integers(self, upper: int, count: int) -> np.ndarray:
        """count integers uniform in [0, upper). Multiply-shift, bias < 2^-53."""
        if upper <= 0:
            raise ValueError("upper bound must be positive")
        return np.minimum((self.random(count) * upper).astype(np.int64), upper - 1)

    def permutation(self, n: int) -> np.ndarray:
        """Deterministic permutation of range(n) via random sort keys."""
        return np.argsort(self.random(n), kind="stable").astype(np.int64)

    def shuffled(self, values: np.ndarray) -> np.ndarray:
        values = np.asarray(values)
        return values[self.permutation(len(values))]

    def spawn(self, stream: int) -> "CounterRng":
        """Independent child generator for a labeled substream."""
        salt = (0xD6E8FEB86659FD93 * (int(stream) + 1)) & 0xFFFFFFFFFFFFFFFF
        child = CounterRng(0)
        child._base = _mix(np.array([self._base], dtype=np.uint64) + np.uint64(salt))[0]
        return child
