"""Sum estimation from exponential variates and network-wide minima.

Each node i holds a positive value y_i >= 1 and draws r exponential
variates of rate y_i. The network computes the component-wise minimum
vector (exactly, via the oracle path, or through push-pull min-merges),
and every node estimates the total as r over the sum of its minimum
vector's components.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .engine import concentration_bound
from .errors import InvalidParameterError, InvalidStateError
from .graphs import Graph, TransitionMatrix
from .seeding import VARIATE_LANE, UniformStream, substream_seed, trial_seed
from .spread import MinVectorState, capacity_time_multiplier, run_spreading

F_KINDS = ("identity", "constant-one", "user-table")

MINIMA_PATHS = ("oracle", "spread")


@dataclass(frozen=True)
class CompInputs:
    """Per-node contributions y_i (each >= 1), repetition count r, and the
    label of the function family that produced the y values."""

    y: tuple[float, ...]
    r: int
    f_kind: str = "identity"

    def __post_init__(self):
        if len(self.y) < 1:
            raise InvalidParameterError("need at least one node value")
        if any(not math.isfinite(v) or v < 1.0 for v in self.y):
            raise InvalidParameterError("every y_i must be finite and >= 1")
        if self.r < 1:
            raise InvalidParameterError("r must be >= 1")
        if self.f_kind not in F_KINDS:
            raise InvalidParameterError(f"f_kind must be one of {F_KINDS}, got {self.f_kind!r}")

    @property
    def n(self) -> int:
        return len(self.y)

    @property
    def total(self) -> float:
        return float(sum(self.y))


@dataclass(frozen=True)
class CompOutcome:
    estimates: tuple[float, ...]
    truth: float
    minima_exact: bool
    relative_errors: tuple[float, ...]
    completion_time: float


def choose_r(epsilon: float, delta: float) -> int:
    """Smallest repetition count the accuracy contract asks for:
    ceil(12 * epsilon^-2 * ln(4/delta))."""
    if not (0.0 < epsilon < 1.0):
        raise InvalidParameterError("epsilon must lie in (0, 1)")
    if not (0.0 < delta < 1.0):
        raise InvalidParameterError("delta must lie in (0, 1)")
    return math.ceil(12.0 * epsilon**-2 * math.log(4.0 / delta))


def variates_from_uniforms(uniforms: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Inverse-CDF exponentials -ln(u)/y_i, one row per node; u in (0,1]."""
    u = np.asarray(uniforms, dtype=np.float64)
    rates = np.asarray(y, dtype=np.float64).reshape(-1, 1)
    return -np.log(u) / rates


def sample_variates(inputs: CompInputs, stream: UniformStream) -> np.ndarray:
    """Draw the (n, r) variate matrix W with W[i, l] ~ Exp(y_i).

    The uniform draws are consumed as one flat block in node-major order,
    so a fixed stream yields the same uniforms regardless of the y values;
    scaling y rescales the variates through the inverse CDF alone.
    """
    n, r = inputs.n, inputs.r
    raw = stream.uniforms(n * r)
    # raw == 0 would give u == 1 and a zero variate; clamp the one atom.
    raw = np.maximum(raw, 2.0**-53)
    return variates_from_uniforms((1.0 - raw).reshape(n, r), np.asarray(inputs.y))


def oracle_min(variates: np.ndarray) -> np.ndarray:
    """Component-wise minimum across nodes; the centralized reference for
    the gossip-based path."""
    w = np.asarray(variates, dtype=np.float64)
    if w.ndim != 2 or w.shape[0] < 1:
        raise InvalidParameterError("variates must form a (n, r) matrix")
    return w.min(axis=0)


def estimate(components: np.ndarray, r: int) -> float:
    """r divided by the component sum of one node's minimum vector."""
    w = np.asarray(components, dtype=np.float64)
    if r < 1:
        raise InvalidParameterError("r must be >= 1")
    if w.shape != (r,):
        raise InvalidParameterError(f"expected {r} components, got shape {w.shape}")
    if np.any(~np.isfinite(w)) or np.any(w <= 0.0):
        raise InvalidStateError("minimum vector must be strictly positive and finite")
    return r / float(w.sum())


def run_comp(
    graph: Graph | None,
    matrix: TransitionMatrix | None,
    inputs: CompInputs,
    time_model: str,
    minima_path: str,
    seed: int,
    *,
    sync_semantics: str = "serialized",
    capacity: str = "infinite",
    trace=None,
    max_events: int | None = None,
    sampler=None,
) -> CompOutcome:
    """One full estimation run.

    Oracle path: every node receives the exact minimum vector at time 0
    (graph and matrix may be None; they are not consulted). Spread path:
    min-vectors propagate by push-pull until the mirrored message-set run
    completes; the recorded time is scaled by the capacity multiplier.
    Variates come from a dedicated substream of `seed`, so they are
    identical across paths and unaffected by protocol randomness.
    """
    if minima_path not in MINIMA_PATHS:
        raise InvalidParameterError(f"minima_path must be one of {MINIMA_PATHS}, got {minima_path!r}")
    variate_stream = UniformStream(substream_seed(seed, VARIATE_LANE))
    w = sample_variates(inputs, variate_stream)
    truth = inputs.total
    r = inputs.r
    if minima_path == "oracle":
        shared = estimate(oracle_min(w), r)
        estimates = tuple([shared] * inputs.n)
        completion = 0.0
        exact = True
    else:
        if matrix is None:
            raise InvalidParameterError("spread path needs a contact matrix")
        if matrix.n != inputs.n:
            raise InvalidParameterError("matrix size does not match input size")
        if graph is not None:
            matrix.validate(graph)
        min_state = MinVectorState.initial(w)
        t = run_spreading(
            matrix,
            time_model,
            seed,
            sync_semantics=sync_semantics,
            min_state=min_state,
            trace=trace,
            max_events=max_events,
            sampler=sampler,
        )
        completion = t * capacity_time_multiplier(capacity, r)
        estimates = tuple(estimate(min_state.vectors[i], r) for i in range(inputs.n))
        exact = False
    rel = tuple(abs(e - truth) / truth for e in estimates)
    return CompOutcome(
        estimates=estimates,
        truth=truth,
        minima_exact=exact,
        relative_errors=rel,
        completion_time=completion,
    )


@dataclass(frozen=True)
class AccuracyReport:
    epsilon: float
    r: int
    trials: int
    failure_rate: float
    bound: float


def accuracy_experiment(y: tuple[float, ...], epsilon: float, r: int, trials: int, seed: int = 0) -> AccuracyReport:
    """Oracle-path failure-rate measurement against the tail bound.

    A trial fails when any node's estimate falls outside (1 +/- 2*epsilon)
    times the true sum. The companion bound is 2*exp(-epsilon^2 * r / 3);
    callers compare rate <= bound + sampling slack.
    """
    if trials < 1:
        raise InvalidParameterError("trials must be >= 1")
    if not (0.0 < epsilon < 1.0):
        raise InvalidParameterError("epsilon must lie in (0, 1)")
    inputs = CompInputs(y=tuple(float(v) for v in y), r=r)
    tol = 2.0 * epsilon
    failures = 0
    for t in range(trials):
        outcome = run_comp(None, None, inputs, "async", "oracle", trial_seed(seed, t))
        if any(err > tol for err in outcome.relative_errors):
            failures += 1
    return AccuracyReport(
        epsilon=epsilon,
        r=r,
        trials=trials,
        failure_rate=failures / trials,
        bound=concentration_bound(epsilon, r),
    )
