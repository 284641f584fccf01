"""
Command-line front end.

    python cli.py <subcommand> [flags]

Settings are merged as built-in defaults < environment (.env) < config file
< flags. Results go to `<out>/<id>.csv` and `<out>/<id>.json`; logs go to
stderr. Exit codes: 0 success, 2 usage or validation error, 1 I/O or other
runtime failure.
"""
import argparse
import json
import sys
from typing import Any, Callable, Dict, List, Optional, Sequence

from config import CONFIG_SCHEMA_VERSION, SETTINGS, __version__, load_config_file
from exceptions import ConfigError, TimingDomainError
from experiments import ExperimentId, ExperimentOperations, ExperimentSpec, OVERRIDE_KEYS
from result_export import resolve_formats

SUBCOMMANDS = ("simulate", "table1", "fig4", "fig5", "fig6", "fig7", "capacity", "all")
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")


def _float_list(value) -> List[float]:
    if isinstance(value, (list, tuple)):
        return [float(v) for v in value]
    return [float(v) for v in str(value).split(",") if v.strip()]


def _granularity_range(value):
    """Parse `lo:hi` into a (lo, hi) pair of ns."""
    if isinstance(value, (list, tuple)):
        lo, hi = value
        return float(lo), float(hi)
    try:
        lo, hi = str(value).split(":")
        return float(lo), float(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo:hi in ns, got '{value}'") from None


def _boolean(value) -> bool:
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in ("1", "true", "yes", "on"):
        return True
    if text in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected true or false, got '{value}'")


def _upper(value) -> str:
    return str(value).upper()


# Converters for every setting a config file may hold, keyed by flag dest.
_CONVERTERS: Dict[str, Callable[[Any], Any]] = {
    "scs": _float_list,
    "period_ms": _float_list,
    "kappa": float,
    "duration_ms": float,
    "tick_ms": float,
    "theta_ppm": float,
    "granularity_ns": float,
    "granularity_range": _granularity_range,
    "toa_model": str,
    "correction": str,
    "samples": int,
    "repetitions": int,
    "seed": int,
    "out": str,
    "format": str,
    "jobs": int,
    "log_level": _upper,
    "initial_offset_ns": float,
    "true_pd_ns": float,
    "tae_ns": float,
    "legacy_nta_scaling": _boolean,
    "threshold_ns": float,
    "payload_bits": int,
    "sib_max_bits": int,
}

_CHOICES = {
    "toa_model": ("table", "gaussian", "none"),
    "format": ("csv", "json", "both"),
    "log_level": LOG_LEVELS,
}


def _add_flags(parser: argparse.ArgumentParser) -> None:
    # Every default is None so that unset flags never mask config-file values.
    scenario = parser.add_argument_group("scenario")
    scenario.add_argument("--scs", type=float, action="append", metavar="{15,30,60,120}",
                          help="Sub-carrier spacing in kHz; repeat for several")
    scenario.add_argument("--period-ms", type=float, action="append",
                          help="Sync period in ms; repeat for several (fig6, fig7)")
    scenario.add_argument("--duration-ms", type=float, help="Simulated span in ms (simulate, fig6)")
    scenario.add_argument("--tick-ms", type=float, help="Simulation step in ms (default min(1, period/10))")
    scenario.add_argument("--theta-ppm", type=float, help="UE clock drift versus the gNB in ppm (default 10)")
    scenario.add_argument("--initial-offset-ns", type=float, help="UE-minus-gNB offset before the first sync")
    scenario.add_argument("--threshold-ns", type=float, help="Accuracy target for verdicts (default 1000)")

    errors = parser.add_argument_group("error model")
    granularity = errors.add_mutually_exclusive_group()
    granularity.add_argument("--granularity-ns", type=float, help="Fixed reference time granularity G_R in ns")
    granularity.add_argument("--granularity-range", type=_granularity_range, metavar="LO:HI",
                             help="G_R drawn uniformly per sync from [LO, HI] ns (default 10:300)")
    errors.add_argument("--toa-model", choices=_CHOICES["toa_model"], help="ToA error model (default gaussian)")
    errors.add_argument("--kappa", type=float, help="Gaussian ToA sigma = U(mu) / kappa (default 2)")
    errors.add_argument("--correction", help="Path-delay correction: none, auto or an offset in ns")
    errors.add_argument("--tae-ns", type=float, help="TAE half-width in ns (default 65)")
    errors.add_argument("--true-pd-ns", type=float, help="Ground-truth one-way path delay in ns")
    errors.add_argument("--legacy-nta-scaling", action="store_const", const=True,
                        help="Use N_TA = 16*64*2^mu for the TA unit")
    errors.add_argument("--payload-bits", type=int, help="Per-domain timing payload in bits (capacity)")
    errors.add_argument("--sib-max-bits", type=int, help="SIB size in bits (capacity, default 2976)")

    run = parser.add_argument_group("run")
    run.add_argument("--samples", type=int, help="Draws per cell (default 10^6)")
    run.add_argument("--repetitions", type=int, help="Sync intervals per fig7 point (default 10^4)")
    run.add_argument("--seed", type=int, help=f"RNG seed (default {SETTINGS['SEED']})")
    run.add_argument("--out", help=f"Output directory (default {SETTINGS['OUT_DIR']})")
    run.add_argument("--format", choices=_CHOICES["format"], help=f"Output format (default {SETTINGS['FORMAT']})")
    run.add_argument("--config", help="Config file of key = value lines (or .yaml) mirroring flag names")
    run.add_argument("--jobs", type=int, help="Worker threads for independent cells (default 1)")
    run.add_argument("--log-level", type=_upper, choices=LOG_LEVELS, help="Log level (default INFO)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sync-sim",
        description="Monte-Carlo simulator of over-the-air 5G reference time delivery to UEs.",
    )
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__} (config schema {CONFIG_SCHEMA_VERSION})")
    subparsers = parser.add_subparsers(dest="command", metavar="subcommand")
    subparsers.required = True
    helps = {
        "simulate": "Simulate one X_TD trace",
        "table1": "Path-delay estimation error statistics per SCS, kappa and correction",
        "fig4": "CDF of the cumulative delivery error per SCS",
        "fig5": "Cumulative error against reference time granularity",
        "fig6": "X_TD traces for 60 and 120 ms sync periods",
        "fig7": "Maximum error against sync period per SCS",
        "capacity": "TSN domains whose reference time fits in one SIB",
        "all": "Run every preset except simulate",
    }
    for name in SUBCOMMANDS:
        _add_flags(subparsers.add_parser(name, help=helps[name], description=helps[name]))
    return parser


def _coerce(key: str, value):
    try:
        value = _CONVERTERS[key](value)
    except (TypeError, ValueError, argparse.ArgumentTypeError) as e:
        raise ConfigError(f"Invalid value for '{key}': {value} ({e})") from e
    choices = _CHOICES.get(key)
    if choices and value not in choices:
        raise ConfigError(f"Invalid value for '{key}': {value}; expected one of {', '.join(choices)}")
    return value


def effective_settings(args: argparse.Namespace) -> Dict[str, Any]:
    """Merge defaults, environment, config file and flags, in that order."""
    settings: Dict[str, Any] = {
        "seed": SETTINGS["SEED"],
        "out": SETTINGS["OUT_DIR"],
        "format": SETTINGS["FORMAT"],
        "jobs": SETTINGS["JOBS"],
        "log_level": SETTINGS["LOG_LEVEL"],
    }
    if args.config:
        raw = load_config_file(args.config)
        unknown = sorted(set(raw) - set(_CONVERTERS))
        if unknown:
            raise ConfigError(f"Unknown keys in {args.config}: {', '.join(unknown)}")
        settings.update({key: _coerce(key, value) for key, value in raw.items()})
    settings.update({
        key: value for key, value in vars(args).items()
        if key in _CONVERTERS and value is not None
    })
    return settings


def build_spec(command: str, settings: Dict[str, Any]) -> ExperimentSpec:
    """The ExperimentSpec described by merged settings. `all` maps to table1."""
    experiment_id = ExperimentId.TABLE1 if command == "all" else ExperimentId(command)
    kwargs: Dict[str, Any] = {
        "overrides": {key: settings[key] for key in sorted(OVERRIDE_KEYS) if key in settings},
        "seed": settings["seed"],
        "out_dir": settings["out"],
        "formats": tuple(resolve_formats(settings["format"])),
        "jobs": settings["jobs"],
    }
    if "scs" in settings:
        kwargs["scs_khz"] = tuple(settings["scs"])
    if "period_ms" in settings:
        kwargs["periods_ms"] = tuple(settings["period_ms"])
    for key, field_name in (("samples", "sample_count"), ("repetitions", "repetitions"),
                            ("threshold_ns", "threshold_ns")):
        if key in settings:
            kwargs[field_name] = settings[key]
    return ExperimentSpec(experiment_id, **kwargs)


def _report_error(error_type: str, message: str) -> None:
    print(json.dumps({"error": error_type, "message": message}), file=sys.stderr)


def _print_success(outcome: Dict[str, Any]) -> None:
    result = outcome["result"]
    if result.experiment_id is ExperimentId.CAPACITY:
        b = result.data
        print(f"{b['domains']} domains")
        print(f"  payload per domain: {b['payload_bits']} bits "
              f"(header {b['header_bits']} + originTimestamp {b['origin_timestamp_bits']}"
              f" + other {b['other_field_bits']})")
        print(f"  SIB: {b['sib_max_bits']} bits, used {b['used_bits']}, unused {b['unused_bits']}")
    for path in outcome["paths"]:
        print(path)


def parse_and_dispatch(argv: Optional[Sequence[str]] = None) -> int:
    """
    Parse `argv`, run the requested experiment(s) and return the exit code.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits 2 on usage errors and 0 for --help/--version
        return int(e.code or 0)

    try:
        settings = effective_settings(args)
        spec = build_spec(args.command, settings)
    except (ConfigError, TimingDomainError) as e:
        _report_error(type(e).__name__, str(e))
        return 2
    except OSError as e:
        _report_error(type(e).__name__, str(e))
        return 1

    operations = ExperimentOperations(settings["log_level"])
    if args.command == "all":
        outcomes = operations.run_all(spec)
    else:
        outcomes = [operations.run_experiment(spec)]

    exit_code = 0
    for outcome in outcomes:
        if outcome.get("success"):
            _print_success(outcome)
        else:
            _report_error(outcome["error_type"], outcome["error"])
            exit_code = max(exit_code, outcome["exit_code"])
    return exit_code


def main() -> None:
    sys.exit(parse_and_dispatch())


if __name__ == "__main__":
    main()
