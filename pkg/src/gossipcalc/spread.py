"""Push-pull gossip over a contact matrix, plus the min-vector variant.

Message sets are stored as Python int bitsets over origin indices. That is
an observer-side encoding for cheap unions; protocol operations treat the
payloads as opaque and touch node identity only through partner sampling.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass

import numpy as np

from .engine import SimClock
from .errors import InvalidParameterError, InvalidStateError
from .graphs import TransitionMatrix
from .seeding import CLOCK_LANE, PROTOCOL_LANE, UniformStream, substream_seed

SYNC_SEMANTICS = ("serialized", "snapshot")

CAPACITY_MODES = ("infinite", "unit")


class PartnerSampler:
    """Inverse-CDF partner choice: per-row support plus cumulative sums.

    Row sums equal 1 by the matrix contract; the last cumulative value is
    clamped to 1.0 so a uniform draw in [0, 1) can never fall off the end.
    """

    def __init__(self, matrix: TransitionMatrix):
        self.n = matrix.n
        self._support: list[list[int]] = []
        self._cum: list[list[float]] = []
        for i in range(matrix.n):
            row = matrix.entries[i]
            support = np.flatnonzero(row)
            if support.size == 0:
                raise InvalidParameterError(f"row {i} has no positive entries")
            cum = np.cumsum(row[support]).tolist()
            cum[-1] = 1.0
            self._support.append(support.tolist())
            self._cum.append(cum)

    def sample(self, i: int, stream: UniformStream) -> int:
        j = bisect.bisect_right(self._cum[i], stream.uniform())
        return self._support[i][j]


@dataclass
class SpreadState:
    """Per-node message sets for one run; complete_count tracks how many
    nodes already hold every message."""

    n: int
    matrix: TransitionMatrix
    message_sets: list[int]
    sampler: PartnerSampler
    full_mask: int
    complete_count: int

    @classmethod
    def initial(cls, matrix: TransitionMatrix, sampler: PartnerSampler | None = None) -> "SpreadState":
        n = matrix.n
        full = (1 << n) - 1
        sets = [1 << i for i in range(n)]
        return cls(
            n=n,
            matrix=matrix,
            message_sets=sets,
            sampler=sampler if sampler is not None else PartnerSampler(matrix),
            full_mask=full,
            complete_count=n if n == 1 else 0,
        )


@dataclass
class MinVectorState:
    """Per-node r-dimensional running minima; vectors shape (n, r)."""

    r: int
    vectors: np.ndarray

    @classmethod
    def initial(cls, variates: np.ndarray) -> "MinVectorState":
        v = np.array(variates, dtype=np.float64, copy=True)
        if v.ndim != 2:
            raise InvalidParameterError("variates must be a 2-D (n, r) array")
        return cls(r=v.shape[1], vectors=v)


def _absorb(state: SpreadState, node: int, bits: int) -> None:
    cur = state.message_sets[node]
    new = cur | bits
    if new != cur:
        state.message_sets[node] = new
        if new == state.full_mask:
            state.complete_count += 1


def merge_messages(state: SpreadState, i: int, u: int) -> None:
    """Both endpoints end with the union of their message sets."""
    if i == u:
        return
    _absorb(state, i, state.message_sets[u])
    _absorb(state, u, state.message_sets[i])


def merge_minima(state: MinVectorState, i: int, u: int) -> None:
    """Both endpoints end with the component-wise minimum of their vectors."""
    if i == u:
        return
    v = state.vectors
    np.minimum(v[i], v[u], out=v[i])
    v[u] = v[i]


def spread_exchange(state: SpreadState, initiator: int, stream: UniformStream) -> int:
    """Sample a partner from the initiator's matrix row and merge message
    sets; returns the partner (== initiator means a self-contact no-op)."""
    partner = state.sampler.sample(initiator, stream)
    merge_messages(state, initiator, partner)
    return partner


def min_exchange(state: MinVectorState, initiator: int, stream: UniformStream, sampler: PartnerSampler) -> int:
    """Sample a partner and merge min-vectors; returns the partner."""
    partner = sampler.sample(initiator, stream)
    merge_minima(state, initiator, partner)
    return partner


def spreading_complete(state: SpreadState) -> bool:
    """True iff every node's message set is the full set."""
    return state.complete_count == state.n


def capacity_time_multiplier(mode: str, r: int) -> int:
    """Time-axis rescaling for link capacity: 1 when links carry a whole
    r-vector per contact, r when they carry one entry."""
    if mode not in CAPACITY_MODES:
        raise InvalidParameterError(f"capacity mode must be one of {CAPACITY_MODES}, got {mode!r}")
    if r < 1:
        raise InvalidParameterError("r must be >= 1")
    return 1 if mode == "infinite" else r


def run_spreading(
    matrix: TransitionMatrix,
    time_model: str,
    seed: int,
    *,
    sync_semantics: str = "serialized",
    min_state: MinVectorState | None = None,
    trace=None,
    max_events: int | None = None,
    sampler: PartnerSampler | None = None,
) -> float:
    """Run push-pull until every node holds every message; return the
    absolute completion time.

    `seed` is a per-trial seed; the clock and the partner draws consume
    independent substreams of it, so protocol randomness is unchanged by
    how timing is consumed (and vice versa). When `min_state` is given,
    every sampled pair also merges min-vectors, which keeps the two
    processes coupled exchange by exchange. `trace`, if set, must be a
    writable text stream receiving one "k t i u |M_i|" line per contact.

    Completion is evaluated at event boundaries (a tick, or a whole slot),
    so both sync semantics report the same completion time for the same
    pair sequence.
    """
    if sync_semantics not in SYNC_SEMANTICS:
        raise InvalidParameterError(f"sync_semantics must be one of {SYNC_SEMANTICS}, got {sync_semantics!r}")
    n = matrix.n
    state = SpreadState.initial(matrix, sampler)
    if min_state is not None and min_state.vectors.shape[0] != n:
        raise InvalidParameterError("min-vector state does not match node count")
    if spreading_complete(state):
        return 0.0
    clock = SimClock(time_model, n, substream_seed(seed, CLOCK_LANE))
    protocol = UniformStream(substream_seed(seed, PROTOCOL_LANE))
    sampler = state.sampler
    snapshot = time_model == "sync" and sync_semantics == "snapshot"
    events = 0
    while True:
        event = clock.next_event()
        events += 1
        if snapshot:
            pairs = [(i, sampler.sample(i, protocol)) for i in event.initiators]
            old_sets = list(state.message_sets)
            old_vecs = None if min_state is None else min_state.vectors.copy()
            for i, u in pairs:
                if i != u:
                    union = old_sets[i] | old_sets[u]
                    _absorb(state, i, union)
                    _absorb(state, u, union)
                    if min_state is not None:
                        low = np.minimum(old_vecs[i], old_vecs[u])
                        np.minimum(min_state.vectors[i], low, out=min_state.vectors[i])
                        np.minimum(min_state.vectors[u], low, out=min_state.vectors[u])
                if trace is not None:
                    trace.write(f"{clock.tick_index} {event.time!r} {i} {u} {state.message_sets[i].bit_count()}\n")
        else:
            for i in event.initiators:
                u = sampler.sample(i, protocol)
                merge_messages(state, i, u)
                if min_state is not None:
                    merge_minima(min_state, i, u)
                if trace is not None:
                    trace.write(f"{clock.tick_index} {event.time!r} {i} {u} {state.message_sets[i].bit_count()}\n")
        if spreading_complete(state):
            return event.time
        if max_events is not None and events >= max_events:
            raise InvalidStateError(f"spreading incomplete after {events} events")
