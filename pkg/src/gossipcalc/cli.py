"""Command-line experiment harness.

Subcommands: compute (full estimation trials), spread (message spreading
only), conductance (cut analysis of one topology), sweep (size scaling with
a fitted slope). Configuration comes from defaults, then an optional flat
key=value config file, then CLI flags; later layers win. Results are JSON;
report paths also emit a CSV summary and a rendered figure unless disabled.

Exit codes: 0 success, 2 invalid configuration or input, 3 generation or
numerical failure, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone

from . import __version__
from .comp import MINIMA_PATHS, CompInputs, F_KINDS, choose_r, run_comp
from .conductance import (
    MAX_EXACT_N,
    conductance_complete_closed_form,
    conductance_exact,
    conductance_ring_closed_form,
    grid_conductance_lower_bound,
    spectral_gap,
)
from .engine import TIME_MODELS
from .errors import (
    AllTrialsFailedError,
    EdgeListParseError,
    GossipCalcError,
    GraphGenerationError,
    InsufficientRecordsError,
    InvalidParameterError,
    InvalidStateError,
    NumericalError,
    SizeLimitError,
)
from .graphs import (
    Graph,
    build_complete,
    build_grid,
    build_path,
    build_random_regular,
    build_ring,
    load_edge_list,
    max_degree_matrix,
)
from .metrics import (
    MetricsRow,
    TrialRecord,
    empirical_computing_time,
    empirical_spreading_time,
    record_to_dict,
    report_to_dict,
    scaling_fit,
    theory_prediction,
    write_metrics_csv,
)
from .plots import save_scaling_figure, save_time_histogram
from .seeding import GRAPH_LANE, substream_seed, trial_seed
from .spread import CAPACITY_MODES, PartnerSampler, SYNC_SEMANTICS, run_spreading

TOPOLOGIES = ("complete", "ring", "path", "grid", "random-regular", "edgelist")

REFERENCES = ("theory", "spectral-gap", "none")

CONDUCTANCE_METHODS = ("auto", "exact", "closed-form")

SWEEP_STATISTICS = ("spreading", "computing")

# Dense spectral work above this size is skipped (JSON null) rather than
# risking multi-GB matrices.
SPECTRAL_N_CAP = 4096

DEFAULT_BAND_FACTOR = 4.0

ENV_THREADS = "GOSSIPCALC_THREADS"


@dataclass
class ExperimentConfig:
    command: str
    topology: str = "complete"
    n: int = 8
    grid_d: int = 2
    grid_c: int = 4
    degree: int = 3
    edgelist_file: str | None = None
    time_model: str = "async"
    sync_semantics: str = "serialized"
    epsilon: float = 0.2
    delta: float = 0.1
    r: int | None = None
    trials: int = 10
    seed: int = 0
    capacity: str = "infinite"
    minima_path: str = "spread"
    f_kind: str = "constant-one"
    values: tuple[float, ...] | None = None
    table: tuple[tuple[float, float], ...] | None = None
    out: str | None = None
    csv: str | None = None
    figure: str | None = None
    no_figure: bool = False
    trace: str | None = None
    sizes: tuple[int, ...] = (64, 256, 1024)
    reference: str = "theory"
    method: str = "auto"
    statistic: str = "spreading"


# ---------------------------------------------------------------------------
# configuration layers

_INT_KEYS = {"n", "grid_d", "grid_c", "degree", "r", "trials", "seed"}
_FLOAT_KEYS = {"epsilon", "delta"}
_BOOL_KEYS = {"no_figure"}
_TUPLE_INT_KEYS = {"sizes"}
_TUPLE_FLOAT_KEYS = {"values"}
_TABLE_KEYS = {"table"}


def parse_config_text(text: str) -> dict[str, str]:
    """Flat key = value lines; '#' starts a comment; blank lines ignored."""
    pairs: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidParameterError(f"config line {lineno}: expected key = value, got {raw.strip()!r}")
        key, _, value = line.partition("=")
        key = key.strip().replace("-", "_")
        value = value.strip()
        if not key or not value:
            raise InvalidParameterError(f"config line {lineno}: empty key or value")
        pairs[key] = value
    return pairs


def _parse_table(text: str) -> tuple[tuple[float, float], ...]:
    entries = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        if ":" not in item:
            raise InvalidParameterError(f"table entry {item!r} is not x:y")
        x, _, y = item.partition(":")
        try:
            entries.append((float(x), float(y)))
        except ValueError:
            raise InvalidParameterError(f"table entry {item!r} has a non-numeric part") from None
    if not entries:
        raise InvalidParameterError("table is empty")
    return tuple(entries)


def _coerce(key: str, value: str):
    try:
        if key in _INT_KEYS:
            return int(value)
        if key in _FLOAT_KEYS:
            return float(value)
        if key in _BOOL_KEYS:
            low = value.lower()
            if low in ("true", "1", "yes"):
                return True
            if low in ("false", "0", "no"):
                return False
            raise ValueError(value)
        if key in _TUPLE_INT_KEYS:
            return tuple(int(v) for v in value.split(","))
        if key in _TUPLE_FLOAT_KEYS:
            return tuple(float(v) for v in value.split(","))
        if key in _TABLE_KEYS:
            return _parse_table(value)
    except ValueError:
        raise InvalidParameterError(f"config key {key}: cannot parse {value!r}") from None
    return value


def build_config(args: argparse.Namespace) -> ExperimentConfig:
    """Defaults, then config file pairs, then explicit CLI flags."""
    cfg = ExperimentConfig(command=args.command)
    known = {f.name for f in dataclasses.fields(ExperimentConfig)}
    if getattr(args, "config", None):
        try:
            with open(args.config, encoding="utf-8") as fh:
                pairs = parse_config_text(fh.read())
        except OSError as exc:
            raise InvalidParameterError(f"cannot read config file: {exc}") from None
        for key, value in pairs.items():
            if key not in known or key == "command":
                raise InvalidParameterError(f"unknown config key {key!r}")
            setattr(cfg, key, _coerce(key, value))
    for key in known:
        if key == "command" or not hasattr(args, key):
            continue
        value = getattr(args, key)
        if value is not None:
            if key in ("values",):
                value = tuple(float(v) for v in value.split(","))
            elif key in ("sizes",):
                value = tuple(int(v) for v in value.split(","))
            elif key in ("table",):
                value = _parse_table(value)
            setattr(cfg, key, value)
    return cfg


def _required_trials(delta: float) -> int:
    return math.ceil(10.0 / delta - 1e-9)


def resolve_values(cfg: ExperimentConfig, n: int) -> tuple[float, ...]:
    """Materialize per-node y values from the configured function family."""
    if cfg.f_kind == "constant-one":
        return tuple([1.0] * n)
    if cfg.values is None:
        raise InvalidParameterError(f"f_kind {cfg.f_kind} needs a values list")
    if len(cfg.values) != n:
        raise InvalidParameterError(f"values list has {len(cfg.values)} entries for n={n}")
    if cfg.f_kind == "identity":
        return cfg.values
    table = dict(cfg.table or ())
    out = []
    for x in cfg.values:
        if x not in table:
            raise InvalidParameterError(f"value {x} missing from the table")
        out.append(table[x])
    return tuple(out)


def validate_config(cfg: ExperimentConfig) -> list[str]:
    """Collect human-readable violations; empty means runnable."""
    v: list[str] = []
    if cfg.topology not in TOPOLOGIES:
        v.append(f"topology must be one of {', '.join(TOPOLOGIES)}")
    if cfg.time_model not in TIME_MODELS:
        v.append("time_model must be sync or async")
    if cfg.sync_semantics not in SYNC_SEMANTICS:
        v.append("sync_semantics must be serialized or snapshot")
    if not (0.0 < cfg.delta < 1.0):
        v.append("delta must lie in (0,1)")
    if not (0.0 < cfg.epsilon < 1.0):
        v.append("epsilon must lie in (0,1)")
    if cfg.r is not None and cfg.r < 1:
        v.append("r must be >= 1")
    if cfg.trials < 1:
        v.append("trials must be >= 1")
    if cfg.seed < 0:
        v.append("seed must be non-negative")
    if cfg.capacity not in CAPACITY_MODES:
        v.append("capacity must be infinite or unit")
    if cfg.minima_path not in MINIMA_PATHS:
        v.append("minima_path must be oracle or spread")
    if cfg.f_kind not in F_KINDS:
        v.append(f"f_kind must be one of {', '.join(F_KINDS)}")
    if cfg.topology == "grid":
        if cfg.grid_d < 1:
            v.append("grid-d must be >= 1")
        if cfg.grid_c < 2:
            v.append("grid-c must be >= 2")
    elif cfg.topology == "ring":
        if cfg.n < 3:
            v.append("ring topology needs n >= 3")
    elif cfg.topology == "random-regular":
        if cfg.degree < 3:
            v.append("random-regular needs degree >= 3")
        if cfg.degree >= cfg.n:
            v.append("random-regular needs degree < n")
        if (cfg.n * cfg.degree) % 2 != 0:
            v.append("random-regular needs n * degree even")
    elif cfg.topology == "edgelist":
        if not cfg.edgelist_file:
            v.append("edgelist topology needs --edgelist-file")
    elif cfg.n < 2:
        v.append(f"{cfg.topology} topology needs n >= 2")

    if cfg.command == "compute":
        if cfg.f_kind != "constant-one" and cfg.topology != "edgelist":
            try:
                y = resolve_values(cfg, cfg.n)
                bad = [val for val in y if val < 1.0]
                if bad:
                    v.append(f"every y value must be >= 1 (got {bad[0]})")
            except InvalidParameterError as exc:
                v.append(str(exc))
        if cfg.csv is not None and cfg.trials < _required_trials(cfg.delta):
            v.append(f"csv summary needs trials >= {_required_trials(cfg.delta)} at delta={cfg.delta}")
    if cfg.command == "spread" and cfg.trials < _required_trials(cfg.delta):
        v.append(f"spread needs trials >= {_required_trials(cfg.delta)} at delta={cfg.delta}")
    if cfg.command == "sweep":
        if cfg.trials < _required_trials(cfg.delta):
            v.append(f"sweep needs trials >= {_required_trials(cfg.delta)} at delta={cfg.delta}")
        if cfg.statistic not in SWEEP_STATISTICS:
            v.append("statistic must be spreading or computing")
        if len(cfg.sizes) < 3:
            v.append("sweep needs at least 3 sizes")
        elif any(b <= a for a, b in zip(cfg.sizes, cfg.sizes[1:])):
            v.append("sizes must be strictly increasing")
        if cfg.topology not in ("complete", "ring", "grid"):
            v.append("sweep supports complete, ring, and grid topologies")
        if cfg.topology == "grid":
            for size in cfg.sizes:
                side = round(size ** (1.0 / cfg.grid_d))
                if side**cfg.grid_d != size or side < 2:
                    v.append(f"size {size} is not c**{cfg.grid_d} with c >= 2")
        if cfg.topology == "ring" and any(s < 3 for s in cfg.sizes):
            v.append("ring sizes must be >= 3")
        if cfg.reference not in REFERENCES:
            v.append("reference must be theory, spectral-gap, or none")
        if cfg.reference == "spectral-gap" and max(cfg.sizes) > SPECTRAL_N_CAP:
            v.append(f"spectral-gap reference capped at n={SPECTRAL_N_CAP}")
    if cfg.command == "conductance" and cfg.method not in CONDUCTANCE_METHODS:
        v.append("method must be auto, exact, or closed-form")

    threads = os.environ.get(ENV_THREADS)
    if threads is not None:
        try:
            if int(threads) < 1:
                raise ValueError(threads)
        except ValueError:
            v.append(f"{ENV_THREADS} must be a positive integer")
    return v


# ---------------------------------------------------------------------------
# experiment execution

@dataclass
class RunContext:
    cfg: ExperimentConfig
    graph: Graph
    matrix: object
    sampler: PartnerSampler
    inputs: CompInputs | None
    topology_label: str


def build_graph(cfg: ExperimentConfig, size: int | None = None) -> tuple[Graph, str]:
    n = cfg.n if size is None else size
    if cfg.topology == "complete":
        return build_complete(n), f"complete-{n}"
    if cfg.topology == "ring":
        return build_ring(n), f"ring-{n}"
    if cfg.topology == "path":
        return build_path(n), f"path-{n}"
    if cfg.topology == "grid":
        c = cfg.grid_c if size is None else round(size ** (1.0 / cfg.grid_d))
        return build_grid(cfg.grid_d, c), f"grid-{cfg.grid_d}x{c}"
    if cfg.topology == "random-regular":
        graph = build_random_regular(n, cfg.degree, substream_seed(cfg.seed, GRAPH_LANE))
        return graph, f"random-regular-{cfg.degree}-{n}"
    with open(cfg.edgelist_file, encoding="utf-8") as fh:
        graph = load_edge_list(fh.read())
    return graph, f"edgelist-{graph.n}"


def _build_context(cfg: ExperimentConfig, size: int | None = None) -> RunContext:
    graph, label = build_graph(cfg, size)
    matrix = max_degree_matrix(graph)
    matrix.validate(graph)
    inputs = None
    if cfg.command == "compute" or (cfg.command == "sweep" and cfg.statistic == "computing"):
        if cfg.command == "sweep":
            y = tuple([1.0] * graph.n)
        else:
            y = resolve_values(cfg, graph.n)
        r = cfg.r if cfg.r is not None else choose_r(cfg.epsilon, cfg.delta)
        inputs = CompInputs(y=y, r=r, f_kind=cfg.f_kind if cfg.command == "compute" else "constant-one")
    return RunContext(cfg=cfg, graph=graph, matrix=matrix, sampler=PartnerSampler(matrix), inputs=inputs, topology_label=label)


_WORKER_CTX: dict = {}


def _worker_init(cfg: ExperimentConfig, size: int | None) -> None:
    _WORKER_CTX["ctx"] = _build_context(cfg, size)


def _trial_record(ctx: RunContext, index: int, trace=None) -> TrialRecord:
    cfg = ctx.cfg
    seed = trial_seed(cfg.seed, index)
    if ctx.inputs is not None:
        outcome = run_comp(
            None,
            ctx.matrix,
            ctx.inputs,
            cfg.time_model,
            cfg.minima_path,
            seed,
            sync_semantics=cfg.sync_semantics,
            capacity=cfg.capacity,
            trace=trace,
            sampler=ctx.sampler,
        )
        return TrialRecord(
            seed=seed,
            topology=ctx.topology_label,
            time_model=cfg.time_model,
            completion_time=outcome.completion_time,
            r=ctx.inputs.r,
            capacity=cfg.capacity,
            relative_errors=outcome.relative_errors,
        )
    completion = run_spreading(
        ctx.matrix,
        cfg.time_model,
        seed,
        sync_semantics=cfg.sync_semantics,
        trace=trace,
        sampler=ctx.sampler,
    )
    return TrialRecord(
        seed=seed,
        topology=ctx.topology_label,
        time_model=cfg.time_model,
        completion_time=completion,
    )


def _run_trial_by_index(index: int) -> TrialRecord:
    return _trial_record(_WORKER_CTX["ctx"], index)


def _worker_count(trials: int) -> int:
    cap = os.environ.get(ENV_THREADS)
    if cap is not None:
        try:
            limit = int(cap)
        except ValueError:
            raise InvalidParameterError(f"{ENV_THREADS} must be a positive integer") from None
        if limit < 1:
            raise InvalidParameterError(f"{ENV_THREADS} must be a positive integer")
    else:
        limit = os.cpu_count() or 1
    return max(1, min(trials, limit))


def run_trials(cfg: ExperimentConfig, size: int | None = None, trace=None) -> tuple[RunContext, list[TrialRecord]]:
    """Run cfg.trials seeded trials, in order, optionally across processes."""
    ctx = _build_context(cfg, size)
    workers = _worker_count(cfg.trials)
    if trace is not None or workers == 1:
        records = []
        for i in range(cfg.trials):
            if trace is not None:
                trace.write(f"# trial {i}\n")
            records.append(_trial_record(ctx, i, trace=trace))
    else:
        with ProcessPoolExecutor(max_workers=workers, initializer=_worker_init, initargs=(cfg, size)) as pool:
            records = list(pool.map(_run_trial_by_index, range(cfg.trials), chunksize=max(1, cfg.trials // (workers * 4))))
    return ctx, records


# ---------------------------------------------------------------------------
# output helpers

def _emit_json(payload, out_path: str | None, cfg: ExperimentConfig) -> None:
    text = json.dumps(payload, indent=2) + "\n"
    if out_path is None:
        sys.stdout.write(text)
        return
    with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    meta = {
        "created": datetime.now(timezone.utc).isoformat(),
        "tool_version": __version__,
        "config": {k: (list(v) if isinstance(v, tuple) else v) for k, v in dataclasses.asdict(cfg).items()},
    }
    with open(out_path + ".meta.json", "w", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps(meta, indent=2) + "\n")


def _default_sidecar(out_path: str | None, explicit: str | None, suffix: str, disabled: bool = False) -> str | None:
    if disabled:
        return None
    if explicit is not None:
        return explicit
    if out_path is None:
        return None
    stem = out_path[:-5] if out_path.endswith(".json") else out_path
    return stem + suffix


def _write_csv_rows(path: str, rows: list[MetricsRow]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        write_metrics_csv(fh, rows)


# ---------------------------------------------------------------------------
# subcommands

def _cmd_compute(cfg: ExperimentConfig) -> int:
    trace_fh = open(cfg.trace, "w", encoding="utf-8", newline="\n") if cfg.trace else None
    try:
        ctx, records = run_trials(cfg, trace=trace_fh)
    finally:
        if trace_fh is not None:
            trace_fh.close()
    _emit_json([record_to_dict(rec) for rec in records], cfg.out, cfg)
    csv_path = _default_sidecar(cfg.out, cfg.csv, ".csv")
    fig_path = _default_sidecar(cfg.out, cfg.figure, ".png", disabled=cfg.no_figure)
    if csv_path is not None and cfg.trials >= _required_trials(cfg.delta):
        stat = empirical_computing_time(records, cfg.epsilon, cfg.delta)
        row = MetricsRow(
            topology=ctx.topology_label,
            n=ctx.graph.n,
            model=cfg.time_model,
            statistic=stat,
            quantile=1.0 - cfg.delta,
        )
        _write_csv_rows(csv_path, [row])
    if fig_path is not None:
        save_time_histogram([rec.completion_time for rec in records], fig_path)
    return 0


def _cmd_spread(cfg: ExperimentConfig) -> int:
    trace_fh = open(cfg.trace, "w", encoding="utf-8", newline="\n") if cfg.trace else None
    try:
        ctx, records = run_trials(cfg, trace=trace_fh)
    finally:
        if trace_fh is not None:
            trace_fh.close()
    spreading_time = empirical_spreading_time(records, cfg.delta)
    payload = {
        "topology": ctx.topology_label,
        "n": ctx.graph.n,
        "time_model": cfg.time_model,
        "delta": cfg.delta,
        "trials": cfg.trials,
        "spreading_time": spreading_time,
        "records": [record_to_dict(rec) for rec in records],
    }
    _emit_json(payload, cfg.out, cfg)
    csv_path = _default_sidecar(cfg.out, cfg.csv, ".csv")
    fig_path = _default_sidecar(cfg.out, cfg.figure, ".png", disabled=cfg.no_figure)
    if csv_path is not None:
        phi = _theory_phi(cfg, ctx.graph.n)
        prediction = None if phi is None else theory_prediction(ctx.graph.n, cfg.delta, phi)
        row = MetricsRow(
            topology=ctx.topology_label,
            n=ctx.graph.n,
            model=cfg.time_model,
            statistic=spreading_time,
            quantile=1.0 - cfg.delta,
            prediction=prediction,
            band=None if prediction is None else DEFAULT_BAND_FACTOR,
        )
        _write_csv_rows(csv_path, [row])
    if fig_path is not None:
        save_time_histogram([rec.completion_time for rec in records], fig_path)
    return 0


def _theory_phi(cfg: ExperimentConfig, n: int) -> float | None:
    """Conductance proxy used for order-level predictions, where known."""
    if cfg.topology == "complete":
        return conductance_complete_closed_form(n)
    if cfg.topology == "ring":
        return conductance_ring_closed_form(n)
    if cfg.topology == "grid":
        side = round(n ** (1.0 / cfg.grid_d))
        return grid_conductance_lower_bound(cfg.grid_d, side)
    return None


def _cmd_conductance(cfg: ExperimentConfig) -> int:
    graph, label = build_graph(cfg)
    matrix = max_degree_matrix(graph)
    matrix.validate(graph)
    n = graph.n
    method = cfg.method
    if method == "auto":
        if cfg.topology == "complete":
            method = "closed-form"
        elif cfg.topology == "ring":
            method = "closed-form"
        else:
            method = "exact"
    if method == "closed-form":
        if cfg.topology == "complete":
            value = conductance_complete_closed_form(n)
        elif cfg.topology == "ring":
            value = conductance_ring_closed_form(n)
        else:
            raise InvalidParameterError(f"no closed form for topology {cfg.topology}")
        argmin = list(range(n // 2))
    else:
        result = conductance_exact(matrix)
        value = result.value
        argmin = list(result.argmin_set)
        method = "exact"
    gap = spectral_gap(matrix) if n <= SPECTRAL_N_CAP else None
    payload = {
        "n": n,
        "method": method,
        "value": value,
        "argmin_set": argmin,
        "spectral_gap": gap,
    }
    _emit_json(payload, cfg.out, cfg)
    return 0


def _cmd_sweep(cfg: ExperimentConfig) -> int:
    sizes = list(cfg.sizes)
    statistics = []
    per_size_rows = []
    for size in sizes:
        size_cfg = dataclasses.replace(cfg, n=size)
        ctx, records = run_trials(size_cfg, size=size)
        if cfg.statistic == "computing":
            stat = empirical_computing_time(records, cfg.epsilon, cfg.delta)
            if not math.isfinite(stat):
                raise NumericalError(f"computing-time quantile diverged at n={size}")
        else:
            stat = empirical_spreading_time(records, cfg.delta)
        statistics.append(stat)
        phi = _theory_phi(cfg, ctx.graph.n)
        prediction = None if phi is None else theory_prediction(ctx.graph.n, cfg.delta, phi)
        per_size_rows.append(
            MetricsRow(
                topology=ctx.topology_label,
                n=ctx.graph.n,
                model=cfg.time_model,
                statistic=stat,
                quantile=1.0 - cfg.delta,
                prediction=prediction,
                band=None if prediction is None else DEFAULT_BAND_FACTOR,
            )
        )
    reference = None
    if cfg.reference == "theory":
        reference = [row.prediction for row in per_size_rows]
        if any(p is None for p in reference):
            raise InvalidParameterError("theory reference unavailable for this topology")
    elif cfg.reference == "spectral-gap":
        reference = []
        for size in sizes:
            graph, _ = build_graph(cfg, size)
            reference.append(1.0 / spectral_gap(max_degree_matrix(graph)))
    report = scaling_fit(sizes, statistics, reference)
    payload = {
        "topology": cfg.topology,
        "time_model": cfg.time_model,
        "statistic": cfg.statistic,
        "delta": cfg.delta,
        "quantile": 1.0 - cfg.delta,
        "trials_per_size": cfg.trials,
        **report_to_dict(report),
    }
    _emit_json(payload, cfg.out, cfg)
    csv_path = _default_sidecar(cfg.out, cfg.csv, ".csv")
    fig_path = _default_sidecar(cfg.out, cfg.figure, ".png", disabled=cfg.no_figure)
    if csv_path is not None:
        _write_csv_rows(csv_path, per_size_rows)
    if fig_path is not None:
        save_scaling_figure(report, fig_path)
    return 0


# ---------------------------------------------------------------------------
# argument parsing and entry point

def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="flat key = value config file")
    sub.add_argument("--topology", choices=TOPOLOGIES)
    sub.add_argument("--n", type=int)
    sub.add_argument("--grid-d", type=int, dest="grid_d")
    sub.add_argument("--grid-c", type=int, dest="grid_c")
    sub.add_argument("--degree", type=int)
    sub.add_argument("--edgelist-file", dest="edgelist_file")
    sub.add_argument("--seed", type=int)
    sub.add_argument("--out", help="output JSON path (stdout when omitted)")


def _add_trial_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--time-model", choices=TIME_MODELS, dest="time_model")
    sub.add_argument("--sync-semantics", choices=SYNC_SEMANTICS, dest="sync_semantics")
    sub.add_argument("--delta", type=float)
    sub.add_argument("--trials", type=int)
    sub.add_argument("--trace", help="write per-contact trace lines to this file (forces serial trials)")
    sub.add_argument("--csv", help="CSV summary path (defaults next to --out)")
    sub.add_argument("--figure", help="figure path (defaults next to --out)")
    sub.add_argument("--no-figure", action="store_true", default=None, dest="no_figure")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gossipcalc", description="Gossip-based separable-function estimation toolkit")
    commands = parser.add_subparsers(dest="command", required=True)

    compute = commands.add_parser("compute", help="run full estimation trials")
    _add_common(compute)
    _add_trial_flags(compute)
    compute.add_argument("--epsilon", type=float)
    compute.add_argument("--r", type=int)
    compute.add_argument("--minima-path", choices=MINIMA_PATHS, dest="minima_path")
    compute.add_argument("--capacity", choices=CAPACITY_MODES)
    compute.add_argument("--f-kind", choices=F_KINDS, dest="f_kind")
    compute.add_argument("--values", help="comma-separated per-node inputs")
    compute.add_argument("--table", help="x:y pairs, comma separated, for f_kind user-table")

    spread = commands.add_parser("spread", help="run message-spreading trials")
    _add_common(spread)
    _add_trial_flags(spread)

    conductance = commands.add_parser("conductance", help="cut analysis of one topology")
    _add_common(conductance)
    conductance.add_argument("--method", choices=CONDUCTANCE_METHODS)

    sweep = commands.add_parser("sweep", help="size-scaling study with slope fit")
    _add_common(sweep)
    _add_trial_flags(sweep)
    sweep.add_argument("--sizes", help="comma-separated node counts")
    sweep.add_argument("--statistic", choices=SWEEP_STATISTICS)
    sweep.add_argument("--epsilon", type=float)
    sweep.add_argument("--r", type=int)
    sweep.add_argument("--reference", choices=REFERENCES)
    return parser


_COMMANDS = {
    "compute": _cmd_compute,
    "spread": _cmd_spread,
    "conductance": _cmd_conductance,
    "sweep": _cmd_sweep,
}


def run_experiment(cfg: ExperimentConfig) -> int:
    violations = validate_config(cfg)
    if violations:
        for item in violations:
            print(f"error: {item}", file=sys.stderr)
        return 2
    return _COMMANDS[cfg.command](cfg)


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        cfg = build_config(args)
        return run_experiment(cfg)
    except (InvalidParameterError, EdgeListParseError, InsufficientRecordsError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (
        GraphGenerationError,
        NumericalError,
        SizeLimitError,
        InvalidStateError,
        AllTrialsFailedError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except GossipCalcError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
