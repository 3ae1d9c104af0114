import json
import re

import pytest

from gossipcalc.cli import (
    ExperimentConfig,
    build_config,
    main,
    make_parser,
    parse_config_text,
    validate_config,
)
from gossipcalc.errors import InvalidParameterError


@pytest.fixture(autouse=True)
def serial_trials(monkeypatch):
    # keep CLI tests single-process unless a test overrides this
    monkeypatch.setenv("GOSSIPCALC_THREADS", "1")


def run_cli(args):
    return main(list(args))


def test_parse_config_text_basic():
    pairs = parse_config_text(
        """
        # experiment setup
        topology = ring
        n = 12   # inline comment
        time-model = sync
        """
    )
    assert pairs == {"topology": "ring", "n": "12", "time_model": "sync"}


def test_parse_config_text_rejects_bad_lines():
    with pytest.raises(InvalidParameterError):
        parse_config_text("just some words\n")
    with pytest.raises(InvalidParameterError):
        parse_config_text("n =\n")


def test_build_config_precedence(tmp_path):
    config = tmp_path / "run.cfg"
    config.write_text("n = 4\ntrials = 2\nseed = 3\n")
    parser = make_parser()
    args = parser.parse_args(
        ["compute", "--config", str(config), "--n", "6", "--minima-path", "oracle"]
    )
    cfg = build_config(args)
    assert cfg.n == 6  # flag beats the file
    assert cfg.trials == 2  # file beats the default
    assert cfg.seed == 3
    assert cfg.minima_path == "oracle"
    assert cfg.topology == "complete"  # untouched default


def test_build_config_rejects_unknown_key(tmp_path):
    config = tmp_path / "run.cfg"
    config.write_text("frobnicate = 1\n")
    parser = make_parser()
    args = parser.parse_args(["compute", "--config", str(config)])
    with pytest.raises(InvalidParameterError):
        build_config(args)


def test_validate_config_exact_messages():
    cfg = ExperimentConfig(command="compute", delta=1.5)
    assert "delta must lie in (0,1)" in validate_config(cfg)
    cfg = ExperimentConfig(command="compute", topology="grid", grid_c=1)
    assert "grid-c must be >= 2" in validate_config(cfg)
    cfg = ExperimentConfig(
        command="compute", n=2, f_kind="identity", values=(0.5, 2.0)
    )
    assert "every y value must be >= 1 (got 0.5)" in validate_config(cfg)


def test_validate_config_sweep_sizes():
    cfg = ExperimentConfig(
        command="sweep", topology="grid", sizes=(64, 120, 256), trials=20, delta=0.5
    )
    violations = validate_config(cfg)
    assert any("not c**2" in item for item in violations)
    cfg = ExperimentConfig(command="sweep", sizes=(64, 64, 256), trials=20, delta=0.5)
    assert "sizes must be strictly increasing" in validate_config(cfg)


def test_validate_config_thread_env(monkeypatch):
    cfg = ExperimentConfig(command="compute")
    monkeypatch.setenv("GOSSIPCALC_THREADS", "banana")
    assert any("GOSSIPCALC_THREADS" in item for item in validate_config(cfg))
    monkeypatch.setenv("GOSSIPCALC_THREADS", "0")
    assert any("GOSSIPCALC_THREADS" in item for item in validate_config(cfg))
    monkeypatch.setenv("GOSSIPCALC_THREADS", "4")
    assert validate_config(cfg) == []


def test_validation_failure_exits_2(capsys):
    code = run_cli(["compute", "--topology", "complete", "--n", "8", "--delta", "2.0"])
    assert code == 2
    err = capsys.readouterr().err
    assert "error: delta must lie in (0,1)" in err


def test_conductance_ring_json(capsys):
    code = run_cli(["conductance", "--topology", "ring", "--n", "4"])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert set(payload) == {"n", "method", "value", "argmin_set", "spectral_gap"}
    assert payload["n"] == 4
    assert payload["method"] == "closed-form"
    assert payload["value"] == 0.5
    assert payload["argmin_set"] == [0, 1]
    assert payload["spectral_gap"] == pytest.approx(1.0, abs=1e-6)


def test_conductance_exact_method(capsys):
    code = run_cli(["conductance", "--topology", "ring", "--n", "4", "--method", "exact"])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["method"] == "exact"
    assert payload["value"] == pytest.approx(0.5, abs=1e-12)


def test_conductance_too_large_for_exact_exits_3(capsys):
    code = run_cli(["conductance", "--topology", "path", "--n", "25", "--method", "exact"])
    assert code == 3
    assert "error:" in capsys.readouterr().err


def test_compute_stdout_structure(capsys):
    code = run_cli(
        [
            "compute",
            "--topology",
            "complete",
            "--n",
            "6",
            "--trials",
            "3",
            "--r",
            "40",
            "--seed",
            "5",
        ]
    )
    assert code == 0
    records = json.loads(capsys.readouterr().out)
    assert len(records) == 3
    for rec in records:
        assert list(rec) == [
            "seed",
            "topology",
            "time_model",
            "completion_time",
            "r",
            "capacity",
            "relative_errors",
        ]
        assert rec["topology"] == "complete-6"
        assert rec["r"] == 40
        assert rec["completion_time"] > 0.0
        assert len(rec["relative_errors"]) == 6
    assert len({rec["seed"] for rec in records}) == 3


def test_compute_repeat_is_byte_identical(tmp_path):
    out1 = tmp_path / "a.json"
    out2 = tmp_path / "b.json"
    base = [
        "compute",
        "--topology",
        "complete",
        "--n",
        "8",
        "--trials",
        "4",
        "--r",
        "30",
        "--seed",
        "1",
        "--no-figure",
    ]
    assert run_cli(base + ["--out", str(out1)]) == 0
    assert run_cli(base + ["--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    # the sidecar carries the non-deterministic part
    meta = json.loads((tmp_path / "a.json.meta.json").read_text())
    assert set(meta) == {"created", "tool_version", "config"}
    assert meta["config"]["seed"] == 1


def test_parallel_trials_match_serial(tmp_path, monkeypatch):
    base = [
        "compute",
        "--topology",
        "complete",
        "--n",
        "8",
        "--trials",
        "4",
        "--r",
        "30",
        "--seed",
        "9",
        "--no-figure",
    ]
    serial_out = tmp_path / "serial.json"
    parallel_out = tmp_path / "parallel.json"
    monkeypatch.setenv("GOSSIPCALC_THREADS", "1")
    assert run_cli(base + ["--out", str(serial_out)]) == 0
    monkeypatch.setenv("GOSSIPCALC_THREADS", "2")
    assert run_cli(base + ["--out", str(parallel_out)]) == 0
    assert serial_out.read_bytes() == parallel_out.read_bytes()


def test_spread_payload_and_csv(tmp_path):
    out = tmp_path / "spread.json"
    code = run_cli(
        [
            "spread",
            "--topology",
            "grid",
            "--grid-d",
            "2",
            "--grid-c",
            "4",
            "--time-model",
            "sync",
            "--trials",
            "100",
            "--delta",
            "0.1",
            "--seed",
            "2",
            "--out",
            str(out),
            "--no-figure",
        ]
    )
    assert code == 0
    payload = json.loads(out.read_text())
    assert list(payload) == [
        "topology",
        "n",
        "time_model",
        "delta",
        "trials",
        "spreading_time",
        "records",
    ]
    assert payload["topology"] == "grid-2x4"
    assert payload["n"] == 16
    assert payload["spreading_time"] > 0.0
    assert len(payload["records"]) == 100
    csv_lines = (tmp_path / "spread.csv").read_text().splitlines()
    assert csv_lines[0] == "topology,n,model,statistic,quantile,prediction,band"
    fields = csv_lines[1].split(",")
    assert fields[0] == "grid-2x4"
    assert fields[6] == "4.0"  # order-level acceptance band on the prediction


def test_compute_trace_headers(tmp_path):
    trace = tmp_path / "trace.txt"
    code = run_cli(
        [
            "compute",
            "--topology",
            "ring",
            "--n",
            "4",
            "--trials",
            "2",
            "--r",
            "5",
            "--seed",
            "0",
            "--trace",
            str(trace),
        ]
    )
    assert code == 0
    lines = trace.read_text().splitlines()
    assert lines[0] == "# trial 0"
    assert "# trial 1" in lines
    body = [line for line in lines if not line.startswith("#")]
    pattern = re.compile(r"^\d+ \S+ \d+ \d+ \d+$")
    assert body and all(pattern.match(line) for line in body)


def test_edgelist_topology_end_to_end(tmp_path, capsys):
    edges = tmp_path / "graph.txt"
    edges.write_text("n 4\n0 1\n1 2\n2 3\n")
    code = run_cli(
        [
            "compute",
            "--topology",
            "edgelist",
            "--edgelist-file",
            str(edges),
            "--trials",
            "2",
            "--r",
            "10",
        ]
    )
    assert code == 0
    records = json.loads(capsys.readouterr().out)
    assert all(rec["topology"] == "edgelist-4" for rec in records)


def test_missing_edgelist_file_exits_4(capsys):
    code = run_cli(
        [
            "compute",
            "--topology",
            "edgelist",
            "--edgelist-file",
            "/nonexistent/graph.txt",
            "--trials",
            "1",
        ]
    )
    assert code == 4
    assert "error:" in capsys.readouterr().err


def test_malformed_edgelist_exits_2(tmp_path, capsys):
    edges = tmp_path / "graph.txt"
    edges.write_text("n 3\n0 1\n1 oops\n")
    code = run_cli(
        [
            "compute",
            "--topology",
            "edgelist",
            "--edgelist-file",
            str(edges),
            "--trials",
            "1",
        ]
    )
    assert code == 2
    assert "error:" in capsys.readouterr().err


def test_user_table_lookup(capsys):
    code = run_cli(
        [
            "compute",
            "--topology",
            "complete",
            "--n",
            "2",
            "--f-kind",
            "user-table",
            "--values",
            "1,2",
            "--table",
            "1:5,2:3",
            "--minima-path",
            "oracle",
            "--trials",
            "1",
            "--r",
            "4000",
        ]
    )
    assert code == 0
    records = json.loads(capsys.readouterr().out)
    # y = (5, 3) under the table, so the estimate targets 8
    err = records[0]["relative_errors"][0]
    assert err < 0.2


def test_user_table_missing_entry_exits_2(capsys):
    code = run_cli(
        [
            "compute",
            "--topology",
            "complete",
            "--n",
            "2",
            "--f-kind",
            "user-table",
            "--values",
            "1,2",
            "--table",
            "1:5",
            "--trials",
            "1",
        ]
    )
    assert code == 2
    assert "missing from the table" in capsys.readouterr().err


def test_sweep_outputs(tmp_path):
    out = tmp_path / "report.json"
    code = run_cli(
        [
            "sweep",
            "--topology",
            "complete",
            "--sizes",
            "8,16,32",
            "--trials",
            "20",
            "--delta",
            "0.5",
            "--seed",
            "3",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    payload = json.loads(out.read_text())
    assert payload["topology"] == "complete"
    assert payload["sizes"] == [8, 16, 32]
    assert len(payload["statistics"]) == 3
    assert isinstance(payload["slope"], float)
    assert payload["reference_slope"] is not None
    csv_lines = (tmp_path / "report.csv").read_text().splitlines()
    assert csv_lines[0] == "topology,n,model,statistic,quantile,prediction,band"
    assert len(csv_lines) == 4
    figure = (tmp_path / "report.png").read_bytes()
    assert figure[:4] == b"\x89PNG"
    meta = json.loads((tmp_path / "report.json.meta.json").read_text())
    assert "created" in meta


def test_sweep_figure_can_be_disabled(tmp_path):
    out = tmp_path / "report.json"
    code = run_cli(
        [
            "sweep",
            "--topology",
            "complete",
            "--sizes",
            "8,16,32",
            "--trials",
            "20",
            "--delta",
            "0.5",
            "--out",
            str(out),
            "--no-figure",
        ]
    )
    assert code == 0
    assert not (tmp_path / "report.png").exists()
    assert (tmp_path / "report.csv").exists()


def test_unwritable_output_exits_4(tmp_path):
    code = run_cli(
        [
            "conductance",
            "--topology",
            "ring",
            "--n",
            "4",
            "--out",
            str(tmp_path / "missing-dir" / "out.json"),
        ]
    )
    assert code == 4
