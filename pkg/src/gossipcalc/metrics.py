"""Trial-ensemble aggregation: quantile-based time estimates and scaling fits.

All reported times are in absolute-time units: slots under the synchronous
model, accumulated Poisson time under the asynchronous one.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    AllTrialsFailedError,
    InsufficientRecordsError,
    InvalidParameterError,
)

# Nudge subtracted before ceil so products that are exact integers in real
# arithmetic do not round up from float noise; far below 1/m for any
# realistic trial count.
_RANK_NUDGE = 1e-9


@dataclass(frozen=True)
class TrialRecord:
    """Outcome of one simulation trial."""

    seed: int
    topology: str
    time_model: str
    completion_time: float
    r: int | None = None
    capacity: str | None = None
    relative_errors: tuple[float, ...] | None = None

    def __post_init__(self):
        if not (math.isfinite(self.completion_time) and self.completion_time >= 0.0):
            raise InvalidParameterError("completion_time must be finite and non-negative")


def record_to_dict(record: TrialRecord) -> dict:
    return {
        "seed": record.seed,
        "topology": record.topology,
        "time_model": record.time_model,
        "completion_time": record.completion_time,
        "r": record.r,
        "capacity": record.capacity,
        "relative_errors": None if record.relative_errors is None else list(record.relative_errors),
    }


def record_from_dict(data: dict) -> TrialRecord:
    errors = data.get("relative_errors")
    return TrialRecord(
        seed=data["seed"],
        topology=data["topology"],
        time_model=data["time_model"],
        completion_time=data["completion_time"],
        r=data.get("r"),
        capacity=data.get("capacity"),
        relative_errors=None if errors is None else tuple(errors),
    )


@dataclass(frozen=True)
class ScalingReport:
    """Per-size statistics with a log-log slope fit and an optional
    reference curve fitted the same way."""

    sizes: tuple[int, ...]
    statistics: tuple[float, ...]
    slope: float
    intercept: float
    reference: tuple[float, ...] | None = None
    reference_slope: float | None = None


def report_to_dict(report: ScalingReport) -> dict:
    return {
        "sizes": list(report.sizes),
        "statistics": list(report.statistics),
        "slope": report.slope,
        "intercept": report.intercept,
        "reference": None if report.reference is None else list(report.reference),
        "reference_slope": report.reference_slope,
    }


def nearest_rank_quantile(values, q: float) -> float:
    """Nearest-rank quantile: sorted value at rank max(1, ceil(q*m))."""
    data = sorted(values)
    m = len(data)
    if m == 0:
        raise InvalidParameterError("quantile of an empty sample")
    if not (0.0 <= q <= 1.0):
        raise InvalidParameterError("quantile level must lie in [0, 1]")
    rank = max(1, math.ceil(q * m - _RANK_NUDGE))
    return data[rank - 1]


def _required_records(delta: float) -> int:
    return math.ceil(10.0 / delta - _RANK_NUDGE)


def empirical_spreading_time(records, delta: float, *, enforce_sample_size: bool = True) -> float:
    """(1-delta)-quantile of completion times: the empirical earliest time
    by which the incomplete fraction is at most delta.

    With enforce_sample_size, requires ceil(10/delta) records so the
    quantile has resolution at level delta.
    """
    if not (0.0 < delta < 1.0):
        raise InvalidParameterError("delta must lie in (0, 1)")
    records = list(records)
    if enforce_sample_size and len(records) < _required_records(delta):
        raise InsufficientRecordsError(
            f"need >= {_required_records(delta)} records for delta={delta}, got {len(records)}"
        )
    return nearest_rank_quantile([rec.completion_time for rec in records], 1.0 - delta)


def empirical_computing_time(records, epsilon: float, delta: float, *, enforce_sample_size: bool = True) -> float:
    """(1-delta)-quantile of the time to an everywhere-accurate estimate.

    A trial counts at its recorded completion time when every node's final
    relative error is within epsilon; otherwise it contributes +inf
    (it would never satisfy the event, and dropping it would bias the
    quantile down).
    """
    if not (0.0 < delta < 1.0):
        raise InvalidParameterError("delta must lie in (0, 1)")
    if epsilon <= 0.0:
        raise InvalidParameterError("epsilon must be positive")
    records = list(records)
    if enforce_sample_size and len(records) < _required_records(delta):
        raise InsufficientRecordsError(
            f"need >= {_required_records(delta)} records for delta={delta}, got {len(records)}"
        )
    times = []
    failures = 0
    for rec in records:
        if rec.relative_errors is None:
            raise InvalidParameterError("record lacks per-node errors; run with estimation enabled")
        if max(rec.relative_errors) <= epsilon:
            times.append(rec.completion_time)
        else:
            failures += 1
    if failures == len(records):
        raise AllTrialsFailedError("every trial missed the accuracy target")
    times.extend([math.inf] * failures)
    return nearest_rank_quantile(times, 1.0 - delta)


def scaling_fit(sizes, statistics, reference=None) -> ScalingReport:
    """Least-squares slope of log(statistic) against log(n).

    Needs at least 3 strictly increasing sizes and positive, non-constant
    statistics. `reference`, when given, is a positive per-size curve
    (for example a spectral proxy) fitted the same way for comparison.
    """
    sizes = tuple(int(s) for s in sizes)
    stats = tuple(float(v) for v in statistics)
    if len(sizes) < 3:
        raise InvalidParameterError("need at least 3 sizes for a slope fit")
    if len(stats) != len(sizes):
        raise InvalidParameterError("sizes and statistics differ in length")
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise InvalidParameterError("sizes must be strictly increasing")
    if any(not math.isfinite(v) or v <= 0.0 for v in stats):
        raise InvalidParameterError("statistics must be positive and finite")
    if max(stats) == min(stats):
        raise InvalidParameterError("statistics are constant; no slope to fit")
    log_n = np.log(np.array(sizes, dtype=np.float64))
    slope, intercept = np.polyfit(log_n, np.log(np.array(stats)), 1)
    ref_tuple = None
    ref_slope = None
    if reference is not None:
        ref_tuple = tuple(float(v) for v in reference)
        if len(ref_tuple) != len(sizes):
            raise InvalidParameterError("reference curve length does not match sizes")
        if any(not math.isfinite(v) or v <= 0.0 for v in ref_tuple):
            raise InvalidParameterError("reference values must be positive and finite")
        ref_slope = float(np.polyfit(log_n, np.log(np.array(ref_tuple)), 1)[0])
    return ScalingReport(
        sizes=sizes,
        statistics=stats,
        slope=float(slope),
        intercept=float(intercept),
        reference=ref_tuple,
        reference_slope=ref_slope,
    )


def binomial_slack(p: float, trials: int, z: float = 3.0) -> float:
    """z standard deviations of a binomial rate estimate at probability p."""
    if not (0.0 <= p <= 1.0):
        raise InvalidParameterError("p must lie in [0, 1]")
    if trials < 1:
        raise InvalidParameterError("trials must be >= 1")
    return z * math.sqrt(p * (1.0 - p) / trials)


def theory_prediction(n: int, delta: float, phi: float) -> float:
    """Order-level spreading-time reference (ln n + ln(1/delta)) / phi."""
    if n < 1:
        raise InvalidParameterError("n must be >= 1")
    if not (0.0 < delta < 1.0):
        raise InvalidParameterError("delta must lie in (0, 1)")
    if phi <= 0.0:
        raise InvalidParameterError("conductance must be positive")
    return (math.log(n) + math.log(1.0 / delta)) / phi


@dataclass(frozen=True)
class MetricsRow:
    """One exported comparison row."""

    topology: str
    n: int
    model: str
    statistic: float
    quantile: float
    prediction: float | None = None
    band: float | None = None


def write_metrics_csv(stream, rows) -> None:
    """Write comparison rows as CSV with a fixed header and LF line ends."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["topology", "n", "model", "statistic", "quantile", "prediction", "band"])
    for row in rows:
        writer.writerow(
            [
                row.topology,
                row.n,
                row.model,
                repr(row.statistic),
                repr(row.quantile),
                "" if row.prediction is None else repr(row.prediction),
                "" if row.band is None else repr(row.band),
            ]
        )
