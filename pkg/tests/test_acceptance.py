"""End-to-end acceptance checks.

One test per shipping criterion. Each prints a single PASS or FAIL line
(visible with `pytest -s` or on failure) so a full run doubles as a
scorecard; the quantitative details live in the assertions.
"""

import contextlib
import math
import os
import shutil
import subprocess
import sys
import time

import numpy as np

from gossipcalc.comp import (
    CompInputs,
    accuracy_experiment,
    choose_r,
    oracle_min,
    run_comp,
    sample_variates,
)
from gossipcalc.conductance import (
    conductance_complete_closed_form,
    conductance_exact,
    grid_conductance_lower_bound,
    spectral_gap,
)
from gossipcalc.engine import SimClock, clock_concentration_check, concentration_bound
from gossipcalc.graphs import (
    build_complete,
    build_grid,
    build_ring,
    max_degree_matrix,
)
from gossipcalc.metrics import (
    TrialRecord,
    binomial_slack,
    empirical_spreading_time,
    scaling_fit,
    theory_prediction,
)
from gossipcalc.seeding import (
    CLOCK_LANE,
    PROTOCOL_LANE,
    VARIATE_LANE,
    UniformStream,
    substream_seed,
    trial_seed,
)
from gossipcalc.spread import (
    MinVectorState,
    PartnerSampler,
    SpreadState,
    merge_messages,
    merge_minima,
    run_spreading,
    spreading_complete,
)


@contextlib.contextmanager
def criterion(num: int, desc: str):
    info = {}
    start = time.perf_counter()
    try:
        yield info
    except BaseException:
        print(f"criterion {num}: FAIL - {desc}")
        raise
    detail = info.get("detail", "")
    elapsed = time.perf_counter() - start
    suffix = f" [{detail}; {elapsed:.1f}s]" if detail else f" [{elapsed:.1f}s]"
    print(f"criterion {num}: PASS - {desc}{suffix}")


def test_criterion_1_minimum_of_exponentials_moments():
    # minima across rates (1,2,3) behave as one rate-6 exponential:
    # mean 1/6 and variance 1/36, each within 5 sigma at r = 1e5
    with criterion(1, "component minima match the rate-sum law") as info:
        r = 100_000
        inputs = CompInputs(y=(1.0, 2.0, 3.0), r=r)
        w = sample_variates(inputs, UniformStream(11))
        mins = oracle_min(w)
        mean_err = abs(float(mins.mean()) - 1.0 / 6.0)
        mean_tol = 5.0 * (1.0 / 6.0) / math.sqrt(r)
        var_err = abs(float(mins.var()) - 1.0 / 36.0)
        var_tol = 5.0 * math.sqrt(8.0 / 1296.0 / r)
        assert mean_err <= mean_tol, f"mean error {mean_err:.3e} > {mean_tol:.3e}"
        assert var_err <= var_tol, f"variance error {var_err:.3e} > {var_tol:.3e}"
        info["detail"] = f"mean err {mean_err:.1e}<={mean_tol:.1e}, var err {var_err:.1e}<={var_tol:.1e}"


def test_criterion_2_repetition_count_meets_accuracy_target():
    # r chosen for (eps, delta) = (0.2, 0.1) keeps the observed failure
    # rate at or below delta over 1000 trials
    with criterion(2, "chosen repetition count achieves the accuracy target") as info:
        r = choose_r(0.2, 0.1)
        assert r == 1107
        y = tuple(1.0 + 9.0 * float(u) for u in UniformStream(123).uniforms(50))
        report = accuracy_experiment(y, epsilon=0.2, r=r, trials=1000, seed=7)
        assert report.failure_rate <= 0.1, f"failure rate {report.failure_rate} > 0.1"
        info["detail"] = f"r={r}, failure rate {report.failure_rate}"


def test_criterion_3_min_reduction_is_exact_along_the_spread():
    # replay the exact exchange sequence and require, after every contact,
    # that each touched node's min-vector equals the true minimum over the
    # origins in its message set; at completion both must be global
    with criterion(3, "min-merges always equal minima over held messages") as info:
        cases = [
            (max_degree_matrix(build_ring(32)), "async", 25),
            (max_degree_matrix(build_grid(2, 4)), "sync", 25),
        ]
        events_checked = 0
        for matrix, model, trials in cases:
            n = matrix.n
            y = tuple(float(1 + (i % 5)) for i in range(n))
            inputs = CompInputs(y=y, r=8)
            for t in range(trials):
                seed = trial_seed(99, t)
                w = sample_variates(inputs, UniformStream(substream_seed(seed, VARIATE_LANE)))
                state = SpreadState.initial(matrix)
                mins = MinVectorState.initial(w)
                clock = SimClock(model, n, substream_seed(seed, CLOCK_LANE))
                protocol = UniformStream(substream_seed(seed, PROTOCOL_LANE))
                while not spreading_complete(state):
                    event = clock.next_event()
                    for i in event.initiators:
                        u = state.sampler.sample(i, protocol)
                        merge_messages(state, i, u)
                        merge_minima(mins, i, u)
                        for node in (i, u):
                            bits = state.message_sets[node]
                            members = [b for b in range(n) if bits >> b & 1]
                            assert np.array_equal(mins.vectors[node], w[members].min(axis=0))
                        events_checked += 1
                full = w.min(axis=0)
                assert all(np.array_equal(mins.vectors[v], full) for v in range(n))
                # the packaged run must land on the oracle estimate bitwise
                spread_out = run_comp(None, matrix, inputs, model, "spread", seed)
                oracle_out = run_comp(None, None, inputs, model, "oracle", seed)
                assert spread_out.estimates == tuple([oracle_out.estimates[0]] * n)
        info["detail"] = f"{events_checked} contacts verified across 50 runs"


def test_criterion_4_conductance_enumeration_matches_references():
    with criterion(4, "exact conductance agrees with the reference values") as info:
        for n in range(4, 13):
            exact = conductance_exact(max_degree_matrix(build_complete(n))).value
            closed = conductance_complete_closed_form(n)
            assert abs(exact - closed) <= 1e-12, f"complete n={n}: {exact} vs {closed}"
        ring = conductance_exact(max_degree_matrix(build_ring(4))).value
        assert abs(ring - 0.5) <= 1e-12
        grid = conductance_exact(max_degree_matrix(build_grid(2, 4))).value
        floor = grid_conductance_lower_bound(2, 4)
        assert abs(grid - 0.125) <= 1e-12
        assert grid >= floor
        info["detail"] = f"ring4 {ring}, grid4x4 {grid} >= {floor}"


def test_criterion_5_complete_graph_spreading_matches_prediction():
    # async spreading on complete graphs: the (1-delta) completion-time
    # quantile stays within a factor 4 of the conductance prediction, and
    # grows by at most 2.5x from n=64 to n=256
    with criterion(5, "complete-graph spreading time tracks the prediction") as info:
        delta = 0.05
        quantiles = {}
        ratios = []
        for n in (64, 128, 256):
            matrix = max_degree_matrix(build_complete(n))
            sampler = PartnerSampler(matrix)
            records = [
                TrialRecord(
                    seed=trial_seed(0, k),
                    topology=f"complete-{n}",
                    time_model="async",
                    completion_time=run_spreading(matrix, "async", trial_seed(0, k), sampler=sampler),
                )
                for k in range(500)
            ]
            tau = empirical_spreading_time(records, delta)
            prediction = theory_prediction(n, delta, conductance_complete_closed_form(n))
            ratio = tau / prediction
            assert 0.25 <= ratio <= 4.0, f"n={n}: ratio {ratio}"
            quantiles[n] = tau
            ratios.append(round(ratio, 3))
        growth = quantiles[256] / quantiles[64]
        assert growth <= 2.5, f"growth {growth} > 2.5"
        info["detail"] = f"ratios {ratios}, growth {growth:.3f}"


def test_criterion_6_clock_tick_concentration():
    # the k-th async tick time concentrates around k/n within the stated
    # exponential tail bound, allowing binomial sampling slack
    with criterion(6, "async tick times concentrate as the tail bound says") as info:
        n, k, eps, trials = 10, 3000, 0.1, 2000
        violation = clock_concentration_check(n, k, eps, trials)
        bound = concentration_bound(eps, k)
        limit = bound + binomial_slack(bound, trials)
        assert violation <= limit, f"violation rate {violation} > {limit}"
        info["detail"] = f"violations {violation} <= {limit:.2e}"


def test_criterion_7_grid_scaling_slope_beats_inverse_gap():
    # spreading time on square grids grows strictly slower than the
    # inverse spectral gap: fitted slope in [0.4, 0.7] and at least 0.25
    # below the reference slope
    with criterion(7, "grid spreading scales below the inverse-gap curve") as info:
        sizes, stats, refs = [], [], []
        for c in (8, 16, 32):
            matrix = max_degree_matrix(build_grid(2, c))
            sampler = PartnerSampler(matrix)
            records = [
                TrialRecord(
                    seed=trial_seed(1234, t),
                    topology=f"grid-2x{c}",
                    time_model="sync",
                    completion_time=run_spreading(matrix, "sync", trial_seed(1234, t), sampler=sampler),
                )
                for t in range(200)
            ]
            sizes.append(c * c)
            stats.append(empirical_spreading_time(records, 0.5))
            refs.append(1.0 / spectral_gap(matrix))
        report = scaling_fit(tuple(sizes), tuple(stats), tuple(refs))
        assert 0.4 <= report.slope <= 0.7, f"slope {report.slope} outside [0.4, 0.7]"
        gap = report.reference_slope - report.slope
        assert gap >= 0.25, f"slope gap {gap} < 0.25"
        info["detail"] = f"medians {stats}, slope {report.slope:.4f}, reference {report.reference_slope:.4f}"


def test_criterion_8_cli_output_is_reproducible(tmp_path):
    with criterion(8, "repeated CLI runs produce byte-identical results") as info:
        exe = shutil.which("gossipcalc")
        base = [exe] if exe else [sys.executable, "-m", "gossipcalc.cli"]
        env = dict(os.environ, GOSSIPCALC_THREADS="1")
        outputs = []
        for name in ("first.json", "second.json"):
            out = tmp_path / name
            cmd = base + [
                "compute",
                "--topology",
                "complete",
                "--n",
                "8",
                "--trials",
                "10",
                "--seed",
                "1",
                "--no-figure",
                "--out",
                str(out),
            ]
            proc = subprocess.run(cmd, capture_output=True, text=True, env=env)
            assert proc.returncode == 0, proc.stderr
            outputs.append(out.read_bytes())
        assert outputs[0] == outputs[1]
        info["detail"] = f"{len(outputs[0])} bytes identical via {'script' if exe else 'module'}"


def test_criterion_9_estimates_scale_with_the_inputs():
    # tripling every node value triples every estimate (same seed), to
    # 1e-12 relative, on both minima paths
    with criterion(9, "estimates are exactly degree-1 homogeneous in y") as info:
        base = CompInputs(y=(1.0, 2.0, 4.0, 8.0), r=64)
        scaled = CompInputs(y=(3.0, 6.0, 12.0, 24.0), r=64)
        matrix = max_degree_matrix(build_complete(4))
        worst = 0.0
        for path, mat in (("oracle", None), ("spread", matrix)):
            a = run_comp(None, mat, base, "async", path, seed=42)
            b = run_comp(None, mat, scaled, "async", path, seed=42)
            for x, y in zip(a.estimates, b.estimates):
                rel = abs(y - 3.0 * x) / (3.0 * x)
                worst = max(worst, rel)
                assert rel <= 1e-12, f"{path}: ratio off by {rel}"
        info["detail"] = f"worst relative deviation {worst:.2e}"
