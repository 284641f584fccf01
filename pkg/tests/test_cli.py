import json

import pytest

from cli import build_parser, parse_and_dispatch


def _last_error(err: str) -> dict:
    return json.loads(err.strip().splitlines()[-1])


def test_capacity_prints_domain_count(tmp_path, capsys):
    assert parse_and_dispatch(["capacity", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "8 domains"
    assert "352 bits" in out
    assert (tmp_path / "capacity.csv").exists()


def test_simulate_reruns_are_byte_identical(tmp_path):
    argv = ["simulate", "--scs", "15", "--period-ms", "60", "--seed", "42"]
    assert parse_and_dispatch(argv + ["--out", str(tmp_path / "a")]) == 0
    assert parse_and_dispatch(argv + ["--out", str(tmp_path / "b")]) == 0
    for name in ("simulate.csv", "simulate.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    assert (tmp_path / "a" / "simulate.csv").read_text().splitlines()[0] == "t_ms,x_td_ns,is_sync"


def test_fig7_zero_period_is_a_validation_error(tmp_path, capsys):
    assert parse_and_dispatch(["fig7", "--period-ms", "0", "--out", str(tmp_path)]) == 2
    error = _last_error(capsys.readouterr().err)
    assert error["error"] == "ConfigError"
    assert "period" in error["message"]


@pytest.mark.parametrize("argv", [
    ["simulate", "--no-such-flag"],
    ["frobnicate"],
    ["simulate", "--toa-model", "laplace"],
    ["simulate", "--granularity-ns", "10", "--granularity-range", "10:300"],
    ["simulate", "--granularity-range", "10-300"],
])
def test_usage_errors_exit_2(argv):
    assert parse_and_dispatch(argv) == 2


def test_negative_seed_is_a_validation_error(tmp_path, capsys):
    argv = ["fig4", "--seed", "-1", "--samples", "10000", "--scs", "15", "--out", str(tmp_path)]
    assert parse_and_dispatch(argv) == 2
    assert _last_error(capsys.readouterr().err)["error"] == "ConfigError"
    assert not (tmp_path / "fig4.json").exists()


@pytest.mark.parametrize("flags", [
    ["--true-pd-ns", "nan"],
    ["--tae-ns", "nan"],
    ["--granularity-ns", "nan"],
    ["--granularity-range", "nan:nan"],
    ["--kappa", "inf"],
    ["--correction", "nan"],
])
def test_non_finite_values_are_validation_errors(tmp_path, capsys, flags):
    argv = ["fig4", "--samples", "10000", "--scs", "15", "--out", str(tmp_path)] + flags
    assert parse_and_dispatch(argv) == 2
    assert _last_error(capsys.readouterr().err)["error"] == "ConfigError"
    assert not (tmp_path / "fig4.json").exists()


def test_simulate_accepts_period_not_dividing_duration(tmp_path):
    assert parse_and_dispatch(["simulate", "--period-ms", "7", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "simulate.csv").exists()


def test_sample_floor_is_a_validation_error(tmp_path):
    assert parse_and_dispatch(["table1", "--samples", "10", "--out", str(tmp_path)]) == 2


def test_invalid_tick_is_reported(tmp_path, capsys):
    assert parse_and_dispatch(["simulate", "--tick-ms", "7", "--out", str(tmp_path)]) == 2
    assert _last_error(capsys.readouterr().err)["error"] == "TimingDomainError"


def test_version(capsys):
    assert parse_and_dispatch(["--version"]) == 0
    assert "1.0.0" in capsys.readouterr().out


def test_help_documents_flags(capsys):
    assert parse_and_dispatch(["fig7", "--help"]) == 0
    out = capsys.readouterr().out
    for flag in ("--scs", "--period-ms", "--granularity-range", "--correction", "--jobs", "--config"):
        assert flag in out


def test_config_file_values_and_flag_precedence(tmp_path):
    config = tmp_path / "run.conf"
    config.write_text("# simulate settings\nscs = 30\nperiod-ms = 120\nseed = 1\ntheta_ppm = 5\n")
    out = tmp_path / "out"
    assert parse_and_dispatch(["simulate", "--config", str(config), "--seed", "7", "--out", str(out)]) == 0

    meta = json.loads((out / "simulate.json").read_text())["meta"]
    assert meta["seed"] == 7
    assert meta["config"]["scs_khz"] == [30.0]
    assert meta["config"]["periods_ms"] == [120.0]
    assert meta["config"]["overrides"]["theta_ppm"] == 5.0


def test_yaml_config_file(tmp_path):
    config = tmp_path / "run.yaml"
    config.write_text("scs: [15, 60]\nsamples: 10000\ncorrection: auto\n")
    out = tmp_path / "out"
    assert parse_and_dispatch(["table1", "--config", str(config), "--format", "json", "--out", str(out)]) == 0
    rows = json.loads((out / "table1.json").read_text())["data"]["rows"]
    assert sorted({row["scs_khz"] for row in rows}) == [15.0, 60.0]


def test_unknown_config_key_is_a_validation_error(tmp_path, capsys):
    config = tmp_path / "run.conf"
    config.write_text("sccs = 30\n")
    assert parse_and_dispatch(["simulate", "--config", str(config), "--out", str(tmp_path)]) == 2
    assert "sccs" in _last_error(capsys.readouterr().err)["message"]


def test_missing_config_file_is_an_io_error(tmp_path):
    assert parse_and_dispatch(["simulate", "--config", str(tmp_path / "absent.conf")]) == 1


def test_unset_flags_default_to_none():
    args = build_parser().parse_args(["fig6"])
    assert args.scs is None
    assert args.legacy_nta_scaling is None
    assert args.seed is None
