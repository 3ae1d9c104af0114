"""Deterministic seeding and uniform-variate streams.

All randomness in the simulator flows through :class:`UniformStream`, which
pulls raw doubles in [0, 1) from a PCG64 bit generator and derives everything
else (integers, permutations) itself. Trial and substream seeds come from the
splitmix64 mixing function, pinned here so that a (master seed, trial index)
pair maps to the same byte-for-byte results on every platform.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidParameterError

_MASK64 = 0xFFFFFFFFFFFFFFFF
_GAMMA = 0x9E3779B97F4A7C15  # golden-ratio increment used by splitmix64

# Substream lanes used by trial runners. A trial's clock, protocol, and
# variate draws must never share a stream, or interleaving would couple them.
CLOCK_LANE = 0
PROTOCOL_LANE = 1
VARIATE_LANE = 2
GRAPH_LANE = 3

_BLOCK = 4096


def mix64(value: int) -> int:
    """splitmix64 finalizer: a bijective 64-bit avalanche mix."""
    z = value & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def trial_seed(master_seed: int, trial_index: int) -> int:
    """Seed for one trial, decorrelated from neighboring indices."""
    if trial_index < 0:
        raise InvalidParameterError("trial_index must be non-negative")
    return mix64((master_seed + (trial_index + 1) * _GAMMA) & _MASK64)


def substream_seed(seed: int, lane: int) -> int:
    """Seed for an independent lane (clock/protocol/variates) of one trial."""
    return mix64((seed ^ mix64(lane + 1)) & _MASK64)


class UniformStream:
    """Buffered stream of uniform doubles with derived integer sampling.

    Scalar draws are served from fixed-size blocks so the stream stays cheap
    in per-event loops; the block size is a constant, so the mapping from
    seed to draw sequence never depends on consumption patterns.
    """

    def __init__(self, seed: int):
        self.seed = int(seed) & _MASK64
        self._rng = np.random.Generator(np.random.PCG64(self.seed))
        self._buf = np.empty(0)
        self._pos = 0

    def uniforms(self, count: int) -> np.ndarray:
        """Array of `count` uniforms in [0, 1). Bypasses the scalar buffer."""
        return self._rng.random(count)

    def uniform(self) -> float:
        """One uniform in [0, 1)."""
        if self._pos >= self._buf.size:
            self._buf = self._rng.random(_BLOCK)
            self._pos = 0
        u = self._buf[self._pos]
        self._pos += 1
        return float(u)

    def open_closed(self) -> float:
        """One uniform in (0, 1], suitable for -log(u) transforms."""
        return 1.0 - self.uniform()

    def randint(self, n: int) -> int:
        """Rejection-free integer in [0, n): floor of a scaled uniform."""
        return min(int(self.uniform() * n), n - 1)

    def permutation(self, n: int) -> list[int]:
        """Fisher-Yates shuffle of range(n) driven by `randint`."""
        order = list(range(n))
        for i in range(n - 1, 0, -1):
            j = self.randint(i + 1)
            order[i], order[j] = order[j], order[i]
        return order
