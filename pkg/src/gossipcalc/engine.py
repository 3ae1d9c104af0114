"""Activation-event generation for the two time models.

Asynchronous model: one global clock ticking at the times of a rate-n
Poisson process; each tick activates one uniformly chosen node, and
absolute time is the accumulated sum of Exp(n) gaps. Synchronous model:
common slots of length 1; every slot activates all n nodes once, in a
uniformly random order used only to serialize the slot's exchanges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError
from .seeding import UniformStream, trial_seed

TIME_MODELS = ("sync", "async")

_BLOCK = 4096


@dataclass(frozen=True)
class ActivationEvent:
    """One event: absolute time plus the ordered initiators active at it."""

    time: float
    initiators: tuple[int, ...]


def exponential_gaps(raw_uniforms: np.ndarray, rate: float) -> np.ndarray:
    """Inverse-CDF exponential variates -ln(1 - raw)/rate for raw in [0, 1)."""
    return -np.log(1.0 - np.asarray(raw_uniforms, dtype=np.float64)) / rate


class SimClock:
    """Seeded event source for one simulation run; single-owner, not shareable.

    Async draws are consumed from fixed-size blocks (gap block, then
    initiator block) so a vectorized replay of the same seed reproduces
    absolute_time exactly.
    """

    def __init__(self, model: str, n: int, seed: int, block: int = _BLOCK):
        if model not in TIME_MODELS:
            raise InvalidParameterError(f"time model must be one of {TIME_MODELS}, got {model!r}")
        if n < 1:
            raise InvalidParameterError("clock needs n >= 1")
        if block < 1:
            raise InvalidParameterError("block size must be positive")
        self.model = model
        self.n = n
        self.tick_index = 0
        self.absolute_time = 0.0
        self._stream = UniformStream(seed)
        self._block = block
        self._gaps: np.ndarray | None = None
        self._nodes: np.ndarray | None = None
        self._pos = 0

    def _refill(self) -> None:
        raw_gap = self._stream.uniforms(self._block)
        raw_node = self._stream.uniforms(self._block)
        self._gaps = exponential_gaps(raw_gap, float(self.n))
        self._nodes = np.minimum((raw_node * self.n).astype(np.int64), self.n - 1)
        self._pos = 0

    def next_event(self) -> ActivationEvent:
        if self.model == "async":
            if self._gaps is None or self._pos >= self._block:
                self._refill()
            self.absolute_time += float(self._gaps[self._pos])
            initiators = (int(self._nodes[self._pos]),)
            self._pos += 1
        else:
            self.absolute_time += 1.0
            initiators = tuple(self._stream.permutation(self.n))
        self.tick_index += 1
        return ActivationEvent(self.absolute_time, initiators)


def async_absolute_time(n: int, k: int, seed: int, block: int = _BLOCK) -> float:
    """Absolute time of async tick k, replayed vectorized from the seed.

    Consumes the uniform stream in the same block pattern as SimClock, so
    the result matches a k-step next_event loop bit for bit. Used by the
    concentration check to keep large-k runs cheap.
    """
    if k < 1:
        raise InvalidParameterError("need k >= 1 ticks")
    stream = UniformStream(seed)
    total = 0.0
    filled = 0
    while filled < k:
        raw_gap = stream.uniforms(block)
        stream.uniforms(block)  # initiator draws; irrelevant to timing
        take = min(block, k - filled)
        gaps = exponential_gaps(raw_gap[:take], float(n))
        # Prepending the carried total makes cumsum reproduce the clock's
        # sequential += rounding across block boundaries.
        total = float(np.cumsum(np.concatenate(([total], gaps)))[-1])
        filled += take
    return total


def concentration_bound(epsilon: float, count: int) -> float:
    """Tail bound 2*exp(-epsilon^2 * count / 3) shared by the timing and
    estimator contracts."""
    if count < 1:
        raise InvalidParameterError("count must be >= 1")
    if epsilon <= 0.0:
        raise InvalidParameterError("epsilon must be positive")
    return 2.0 * math.exp(-epsilon * epsilon * count / 3.0)


def clock_concentration_check(n: int, k: int, epsilon: float, trials: int, seed: int = 0) -> float:
    """Fraction of trials where |C_k - k/n| >= epsilon*k/n.

    The contract tested against this: rate <= concentration_bound(epsilon, k)
    plus binomial sampling slack.
    """
    if not (0.0 < epsilon < 0.5):
        raise InvalidParameterError("epsilon must lie in (0, 1/2)")
    if k < 1:
        raise InvalidParameterError("k must be >= 1")
    if n < 1:
        raise InvalidParameterError("n must be >= 1")
    if trials < 1:
        raise InvalidParameterError("trials must be >= 1")
    expected = k / n
    threshold = epsilon * expected
    violations = 0
    for t in range(trials):
        c_k = async_absolute_time(n, k, trial_seed(seed, t))
        if abs(c_k - expected) >= threshold:
            violations += 1
    return violations / trials
