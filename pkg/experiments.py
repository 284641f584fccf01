"""
Preset scenarios of the delivery-accuracy evaluation: the path-delay
estimation table, the error CDFs, the granularity and period sweeps, the
example traces and the SIB capacity budget.

Every runner is a pure function of its ExperimentSpec. Cells (one SCS, one
configuration point) each own a generator seeded with `spec.seed`, so cells
can run on a worker pool and still assemble in a fixed order.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from capacity import SIB_MAX_BITS, GptpPayloadLayout, budget_breakdown
from clock_sim import SimConfig, Trace, simulate
from config import CONFIG_SCHEMA_VERSION, __version__, config_hash, setup_logger
from error_models import (
    Correction,
    CorrectionMode,
    ErrorConfig,
    ToaModel,
    ToaModelKind,
    compose_sync_error,
    correction_term,
    residual_from_toa,
    sample_toa,
)
from exceptions import ConfigError, TimingDomainError
from nr_timing import Numerology
from result_export import SUPPORTED_FORMATS, ResultExporter, to_jsonable
from stats import DEFAULT_QUANTILES, empirical_cdf, fold, summarize

DEFAULT_SCS_KHZ = (15.0, 30.0, 60.0, 120.0)
MIN_STATISTICAL_SAMPLES = 10_000

TABLE1_KAPPAS = (2.0, 1.0)
FIG4_PERIOD_MS = 60.0
FIG4_CDF_GRID_NS = tuple(float(v) for v in np.arange(0.0, 2000.0 + 5.0, 5.0))
FIG5_SLOT_FRACTIONS = tuple(float(v) for v in np.logspace(1, 5, 17))
FIG6_SCS_KHZ = (30.0,)
FIG6_PERIODS_MS = (60.0, 120.0)
FIG6_DURATION_MS = 1200.0
FIG7_PERIODS_MS = (1.0, 2.0, 5.0, 10.0, 20.0, 30.0, 40.0, 50.0, 60.0, 70.0,
                   80.0, 90.0, 100.0, 110.0, 120.0, 130.0, 140.0, 150.0)
FIG7_PERIOD_RANGE_MS = (1.0, 150.0)
SIMULATE_PERIOD_MS = 60.0
SIMULATE_DURATION_MS = 1200.0

# Keys of ExperimentSpec.overrides; names follow the long command-line flags.
OVERRIDE_KEYS = frozenset({
    "theta_ppm",
    "duration_ms",
    "tick_ms",
    "initial_offset_ns",
    "tae_ns",
    "granularity_ns",
    "granularity_range",
    "toa_model",
    "kappa",
    "correction",
    "true_pd_ns",
    "legacy_nta_scaling",
    "payload_bits",
    "sib_max_bits",
})

_TOA_MODEL_NAMES = {
    "table": ToaModelKind.TABLE_3GPP,
    "table_3gpp": ToaModelKind.TABLE_3GPP,
    "gaussian": ToaModelKind.GAUSSIAN,
    "none": ToaModelKind.NONE,
}

_CORRECTION_NAMES = {
    "none": CorrectionMode.NONE,
    "auto": CorrectionMode.MINUS_SIGMA_HALF,
    "minus_sigma_half": CorrectionMode.MINUS_SIGMA_HALF,
    "literal_sigma_half": CorrectionMode.LITERAL_SIGMA_HALF,
}


class ExperimentId(str, Enum):
    TABLE1 = "table1"
    FIG4 = "fig4"
    FIG5 = "fig5"
    FIG6 = "fig6"
    FIG7 = "fig7"
    CAPACITY = "capacity"
    SIMULATE = "simulate"


# Order used by `run_all`.
ALL_EXPERIMENTS = (
    ExperimentId.TABLE1,
    ExperimentId.FIG4,
    ExperimentId.FIG5,
    ExperimentId.FIG6,
    ExperimentId.FIG7,
    ExperimentId.CAPACITY,
)

_SAMPLED_EXPERIMENTS = (ExperimentId.TABLE1, ExperimentId.FIG4, ExperimentId.FIG5)


def parse_toa_model(value) -> ToaModelKind:
    """Map `table`, `table_3gpp`, `gaussian` or `none` to a ToaModelKind."""
    if isinstance(value, ToaModelKind):
        return value
    try:
        return _TOA_MODEL_NAMES[str(value).strip().lower()]
    except KeyError:
        raise ConfigError(f"Unknown ToA model '{value}'; expected table or gaussian") from None


def parse_correction(value) -> Correction:
    """
    Map a `--correction` value to a Correction.

    `none`, `auto` (T_gran/2), `literal_sigma_half`, or a number of ns applied
    as a custom offset.
    """
    if isinstance(value, Correction):
        return value
    if isinstance(value, (int, float)):
        return Correction(CorrectionMode.CUSTOM, float(value))
    text = str(value).strip().lower()
    if text in _CORRECTION_NAMES:
        return Correction(_CORRECTION_NAMES[text])
    try:
        custom_ns = float(text)
    except ValueError:
        raise ConfigError(f"Invalid correction '{value}'; expected none, auto or a number of ns") from None
    if not math.isfinite(custom_ns):
        raise ConfigError(f"Correction must be finite, got {value}")
    return Correction(CorrectionMode.CUSTOM, custom_ns)


def _positive(name: str, value) -> float:
    number = float(value)
    if not number > 0 or not math.isfinite(number):
        raise ConfigError(f"{name} must be a positive number, got {value}")
    return number


@dataclass(frozen=True)
class ExperimentSpec:
    """
    What to run and how.

    Attributes:
        id (ExperimentId): The preset.
        overrides (dict): Partial simulation/error configuration, keyed by
            OVERRIDE_KEYS.
        sample_count (int): Draws per cell for sampled experiments.
        seed (int): Seed of every cell's generator.
        scs_khz (tuple, optional): SCS values; None selects the preset's.
        periods_ms (tuple, optional): Sync periods; None selects the preset's.
        repetitions (int): Sync intervals per trace in the period sweep.
        threshold_ns (float): Target accuracy for verdicts and crossings.
        out_dir (str): Output directory.
        formats (tuple): Output formats, a subset of ("csv", "json").
        jobs (int): Worker threads for independent cells.
    """
    id: ExperimentId
    overrides: Mapping[str, Any] = field(default_factory=dict)
    sample_count: int = 1_000_000
    seed: int = 42
    scs_khz: Optional[Tuple[float, ...]] = None
    periods_ms: Optional[Tuple[float, ...]] = None
    repetitions: int = 10_000
    threshold_ns: float = 1000.0
    out_dir: str = "results"
    formats: Tuple[str, ...] = SUPPORTED_FORMATS
    jobs: int = 1

    def __post_init__(self):
        object.__setattr__(self, "id", ExperimentId(self.id))
        object.__setattr__(self, "overrides", dict(self.overrides))
        unknown = sorted(set(self.overrides) - OVERRIDE_KEYS)
        if unknown:
            raise ConfigError(f"Unknown configuration keys: {', '.join(unknown)}")

        if self.id in _SAMPLED_EXPERIMENTS and self.sample_count < MIN_STATISTICAL_SAMPLES:
            raise ConfigError(f"sample_count must be >= {MIN_STATISTICAL_SAMPLES}, got {self.sample_count}")
        if self.id is ExperimentId.FIG7 and self.repetitions < MIN_STATISTICAL_SAMPLES:
            raise ConfigError(f"repetitions must be >= {MIN_STATISTICAL_SAMPLES}, got {self.repetitions}")
        if self.jobs < 1:
            raise ConfigError(f"jobs must be >= 1, got {self.jobs}")
        if self.seed < 0:
            raise ConfigError(f"seed must be a non-negative integer, got {self.seed}")
        _positive("threshold_ns", self.threshold_ns)

        if self.scs_khz is not None:
            object.__setattr__(self, "scs_khz", tuple(float(s) for s in self.scs_khz))
            if not self.scs_khz:
                raise ConfigError("At least one SCS is needed")
            for scs in self.scs_khz:
                Numerology.from_scs(scs)
        if self.periods_ms is not None:
            periods = tuple(_positive("period_ms", p) for p in self.periods_ms)
            if not periods:
                raise ConfigError("At least one sync period is needed")
            object.__setattr__(self, "periods_ms", periods)
            if self.id is ExperimentId.FIG7:
                lo, hi = FIG7_PERIOD_RANGE_MS
                for p in periods:
                    if not lo <= p <= hi:
                        raise ConfigError(f"Period sweep must stay within [{lo:g}, {hi:g}] ms, got {p}")

        for name in ("theta_ppm", "initial_offset_ns"):
            if name in self.overrides and not math.isfinite(float(self.overrides[name])):
                raise ConfigError(f"{name} must be finite, got {self.overrides[name]}")
        for name in ("duration_ms", "tick_ms", "payload_bits"):
            if name in self.overrides and self.overrides[name] is not None:
                _positive(name, self.overrides[name])
        # fail fast on malformed error-model overrides
        self.error_config(ErrorConfig())

    def scs_list(self, default: Sequence[float] = DEFAULT_SCS_KHZ) -> Tuple[float, ...]:
        return self.scs_khz if self.scs_khz is not None else tuple(default)

    def numerology(self, scs_khz: float) -> Numerology:
        return Numerology.from_scs(
            scs_khz, legacy_nta_scaling=bool(self.overrides.get("legacy_nta_scaling", False))
        )

    def error_config(self, base: ErrorConfig) -> ErrorConfig:
        """`base` with the error-model overrides applied."""
        o = self.overrides
        changes: Dict[str, Any] = {}
        try:
            if "tae_ns" in o:
                changes["tae_bound_ns"] = float(o["tae_ns"])
            if "granularity_ns" in o:
                changes["rtge_granularity_ns"] = float(o["granularity_ns"])
                changes["rtge_granularity_range_ns"] = None
            if "granularity_range" in o:
                lo, hi = o["granularity_range"]
                changes["rtge_granularity_range_ns"] = (float(lo), float(hi))
            if "toa_model" in o or "kappa" in o:
                changes["toa_model"] = ToaModel(
                    parse_toa_model(o.get("toa_model", base.toa_model.kind)),
                    float(o.get("kappa", base.toa_model.kappa)),
                )
            if "correction" in o:
                changes["correction"] = parse_correction(o["correction"])
            if "true_pd_ns" in o:
                changes["true_pd_ns"] = None if o["true_pd_ns"] is None else float(o["true_pd_ns"])
            return replace(base, **changes)
        except ConfigError:
            raise
        except TimingDomainError as e:
            raise ConfigError(str(e)) from e
        except (TypeError, ValueError) as e:
            raise ConfigError(f"Invalid error-model override: {e}") from e

    def sim_config(self, num: Numerology, errors: ErrorConfig, period_ms: float, duration_ms: float) -> SimConfig:
        o = self.overrides
        return SimConfig(
            theta_ppm=float(o.get("theta_ppm", 10.0)),
            sync_period_ms=period_ms,
            duration_ms=duration_ms,
            tick_ms=o.get("tick_ms"),
            seed=self.seed,
            numerology=num,
            errors=errors,
            initial_offset_ns=float(o.get("initial_offset_ns", 0.0)),
        )

    def to_config_dict(self) -> Dict[str, Any]:
        """The result-determining part of the spec, echoed into output metadata."""
        return to_jsonable({
            "experiment": self.id,
            "seed": self.seed,
            "sample_count": self.sample_count,
            "repetitions": self.repetitions,
            "scs_khz": self.scs_khz,
            "periods_ms": self.periods_ms,
            "threshold_ns": self.threshold_ns,
            "overrides": dict(sorted(self.overrides.items())),
        })


@dataclass
class ExperimentResult:
    experiment_id: ExperimentId
    frame: pd.DataFrame
    data: Dict[str, Any]
    meta: Dict[str, Any]


def map_cells(func: Callable[[Any], Any], cells: Sequence[Any], jobs: int = 1) -> List[Any]:
    """Apply `func` to every cell; results keep the order of `cells`."""
    if jobs <= 1 or len(cells) <= 1:
        return [func(cell) for cell in cells]
    with ThreadPoolExecutor(max_workers=jobs) as executor:
        return list(executor.map(func, cells))


def _error_config_dict(cfg: ErrorConfig) -> Dict[str, Any]:
    return to_jsonable({
        "tae_bound_ns": cfg.tae_bound_ns,
        "rtge_granularity_ns": cfg.rtge_granularity_ns,
        "rtge_granularity_range_ns": cfg.rtge_granularity_range_ns,
        "toa_model": cfg.toa_model.kind,
        "kappa": cfg.toa_model.kappa,
        "correction": cfg.correction.mode,
        "correction_custom_ns": cfg.correction.custom_ns,
        "true_pd_ns": cfg.true_pd_ns,
    })


def _meta(spec: ExperimentSpec, errors: Optional[ErrorConfig] = None, **counts) -> Dict[str, Any]:
    effective = spec.to_config_dict()
    if errors is not None:
        effective["errors"] = _error_config_dict(errors)
    meta = {
        "experiment": spec.id.value,
        "seed": spec.seed,
        "config": effective,
        "config_hash": config_hash(effective),
        "version": __version__,
        "config_schema_version": CONFIG_SCHEMA_VERSION,
    }
    meta.update(counts)
    return meta


def run_table1(spec: ExperimentSpec) -> ExperimentResult:
    """
    Path-delay estimation residuals per (SCS, kappa, correction).

    Each cell draws `sample_count` Gaussian ToA errors from a generator seeded
    with `spec.seed`. The corrected rows use the configured correction, or the
    T_gran/2 offset when none is configured.
    """
    base = spec.error_config(ErrorConfig())
    corrected = base.correction
    if corrected.mode is CorrectionMode.NONE:
        corrected = Correction(CorrectionMode.MINUS_SIGMA_HALF)
    kappas = (float(spec.overrides["kappa"]),) if "kappa" in spec.overrides else TABLE1_KAPPAS
    cells = [
        (scs, kappa, correction)
        for scs in spec.scs_list()
        for kappa in kappas
        for correction in (Correction(), corrected)
    ]

    def run_cell(cell):
        scs, kappa, correction = cell
        num = spec.numerology(scs)
        toa_model = ToaModel(ToaModelKind.GAUSSIAN, kappa)
        rng = np.random.default_rng(spec.seed)
        toa = sample_toa(toa_model, num, rng, spec.sample_count)
        residual, saturated = residual_from_toa(base.resolved_true_pd_ns(num), num, toa, correction, toa_model)
        row = {
            "scs_khz": scs,
            "kappa": kappa,
            "corrected": correction.mode is not CorrectionMode.NONE,
            "correction_ns": correction_term(correction, num, toa_model),
        }
        row.update(summarize(residual).to_dict())
        row["saturation_count"] = int(np.count_nonzero(saturated))
        return row

    rows = map_cells(run_cell, cells, spec.jobs)
    frame = pd.DataFrame(rows)
    return ExperimentResult(
        spec.id,
        frame,
        {"rows": rows},
        _meta(spec, base, cells=len(cells), samples_per_cell=spec.sample_count,
              saturation_count=int(frame["saturation_count"].sum())),
    )


def run_fig4(spec: ExperimentSpec) -> ExperimentResult:
    """
    CDF of |cumulative delivery error| per SCS, sampled right after each sync
    event (the drift between deliveries is not included).
    """
    errors = spec.error_config(ErrorConfig())

    def run_cell(scs):
        num = spec.numerology(scs)
        rng = np.random.default_rng(spec.seed)
        sample = compose_sync_error(errors, num, rng, size=spec.sample_count)
        summary = summarize(sample.total_ns, DEFAULT_QUANTILES)
        cdf = empirical_cdf(fold(sample.total_ns), FIG4_CDF_GRID_NS)
        return scs, summary, cdf, int(np.count_nonzero(sample.saturated))

    results = map_cells(run_cell, spec.scs_list(), spec.jobs)
    rows = [
        {"scs_khz": scs, "error_ns": value, "cdf": probability}
        for scs, _, cdf, _ in results
        for value, probability in cdf
    ]
    curves = {
        f"{scs:g}": {
            "summary": summary.to_dict(),
            "cdf": [probability for _, probability in cdf],
            "saturation_count": saturation,
        }
        for scs, summary, cdf, saturation in results
    }
    return ExperimentResult(
        spec.id,
        pd.DataFrame(rows),
        {"grid_ns": list(FIG4_CDF_GRID_NS), "curves": curves},
        _meta(spec, errors, sync_period_ms=FIG4_PERIOD_MS, samples_per_scs=spec.sample_count,
              saturation_count=sum(r[3] for r in results)),
    )


def run_fig5(spec: ExperimentSpec) -> ExperimentResult:
    """
    Cumulative error against a fixed reference-time granularity G_R, swept as
    slot / f for f in 10^1 .. 10^5, with ToA errors uniform within the 3GPP
    bounds. Reports, per SCS, the largest swept G_R whose maximum error stays
    below `threshold_ns`.
    """
    base = spec.error_config(ErrorConfig(toa_model=ToaModel(ToaModelKind.TABLE_3GPP)))
    cells = [(scs, fraction) for scs in spec.scs_list() for fraction in FIG5_SLOT_FRACTIONS]

    def run_cell(cell):
        scs, fraction = cell
        num = spec.numerology(scs)
        g_r = num.slot_duration_ms * 1e6 / fraction
        errors = replace(base, rtge_granularity_ns=g_r, rtge_granularity_range_ns=None)
        rng = np.random.default_rng(spec.seed)
        sample = compose_sync_error(errors, num, rng, size=spec.sample_count)
        row = {"scs_khz": scs, "slot_fraction": fraction, "granularity_ns": g_r}
        row.update(summarize(sample.total_ns, (0.999,)).to_dict())
        row["saturation_count"] = int(np.count_nonzero(sample.saturated))
        return row

    rows = map_cells(run_cell, cells, spec.jobs)
    frame = pd.DataFrame(rows).sort_values(["scs_khz", "granularity_ns"], kind="stable").reset_index(drop=True)

    crossings = {}
    for scs, curve in frame.groupby("scs_khz", sort=True):
        below = curve[curve["max_abs_ns"] < spec.threshold_ns]
        crossings[f"{scs:g}"] = {
            "max_granularity_below_threshold_ns": float(below["granularity_ns"].max()) if len(below) else None,
            "error_floor_ns": float(curve["max_abs_ns"].iloc[0]),
        }
    return ExperimentResult(
        spec.id,
        frame,
        {"rows": frame.to_dict("records"), "crossings": crossings, "threshold_ns": spec.threshold_ns},
        _meta(spec, base, points=len(cells), samples_per_point=spec.sample_count,
              saturation_count=int(frame["saturation_count"].sum())),
    )


def _covering_duration(period_ms: float, duration_ms: float) -> float:
    """The shortest whole number of periods lasting at least `duration_ms`."""
    return period_ms * max(1, math.ceil(round(duration_ms / period_ms, 9)))


def run_fig6(spec: ExperimentSpec) -> ExperimentResult:
    """X_TD traces for each sync period, with verdicts against `threshold_ns`."""
    errors = spec.error_config(ErrorConfig())
    periods = spec.periods_ms or FIG6_PERIODS_MS
    duration = float(spec.overrides.get("duration_ms") or FIG6_DURATION_MS)
    cells = [(scs, period) for scs in spec.scs_list(FIG6_SCS_KHZ) for period in periods]

    def run_cell(cell):
        scs, period = cell
        cfg = spec.sim_config(spec.numerology(scs), errors, period, _covering_duration(period, duration))
        return scs, period, simulate(cfg)

    results = map_cells(run_cell, cells, spec.jobs)
    frames = []
    traces = []
    for scs, period, trace in results:
        frame = trace.to_frame()
        frame.insert(0, "period_ms", period)
        frame.insert(0, "scs_khz", scs)
        frames.append(frame)
        traces.append({
            "scs_khz": scs,
            "period_ms": period,
            "max_abs_ns": trace.max_abs_ns,
            "below_threshold": trace.max_abs_ns < spec.threshold_ns,
            "saturation_count": trace.saturation_count,
            "sync_errors_ns": trace.sync_errors_ns,
        })
    return ExperimentResult(
        spec.id,
        pd.concat(frames, ignore_index=True),
        {"traces": traces, "threshold_ns": spec.threshold_ns},
        _meta(spec, errors, traces=len(cells),
              saturation_count=sum(t.saturation_count for _, _, t in results)),
    )


def run_fig7(spec: ExperimentSpec) -> ExperimentResult:
    """
    Maximum |X_TD| per (SCS, sync period).

    Each point simulates `repetitions` sync intervals. The seed and the number
    of deliveries are the same for every period, so all points see the same
    delivery errors and each curve is non-decreasing in the period.
    """
    errors = spec.error_config(ErrorConfig())
    periods = spec.periods_ms or FIG7_PERIODS_MS
    cells = [(scs, period) for scs in spec.scs_list() for period in periods]

    def run_cell(cell):
        scs, period = cell
        cfg = spec.sim_config(spec.numerology(scs), errors, period, period * spec.repetitions)
        trace = simulate(cfg)
        return {
            "scs_khz": scs,
            "period_ms": period,
            "max_abs_ns": trace.max_abs_ns,
            "below_threshold": trace.max_abs_ns < spec.threshold_ns,
            "saturation_count": trace.saturation_count,
        }

    rows = map_cells(run_cell, cells, spec.jobs)
    frame = pd.DataFrame(rows)

    curves = {}
    for scs, curve in frame.groupby("scs_khz", sort=True):
        below = curve[curve["below_threshold"]]
        curves[f"{scs:g}"] = {
            "period_ms": curve["period_ms"].tolist(),
            "max_abs_ns": curve["max_abs_ns"].tolist(),
            "max_period_below_threshold_ms": float(below["period_ms"].max()) if len(below) else None,
        }
    return ExperimentResult(
        spec.id,
        frame,
        {"curves": curves, "threshold_ns": spec.threshold_ns},
        _meta(spec, errors, points=len(cells), repetitions=spec.repetitions,
              saturation_count=int(frame["saturation_count"].sum())),
    )


def run_capacity(spec: ExperimentSpec) -> ExperimentResult:
    """How many domains' timing payloads fit in one SIB."""
    layout = GptpPayloadLayout()
    if "payload_bits" in spec.overrides:
        payload = int(spec.overrides["payload_bits"])
        layout = GptpPayloadLayout(header_bits=payload, origin_timestamp_bits=0)
    breakdown = budget_breakdown(layout, int(spec.overrides.get("sib_max_bits", SIB_MAX_BITS)))
    return ExperimentResult(spec.id, pd.DataFrame([breakdown]), breakdown, _meta(spec))


def run_simulate(spec: ExperimentSpec) -> ExperimentResult:
    """A single X_TD trace for one SCS and one sync period."""
    scs_list = spec.scs_list((15.0,))
    periods = spec.periods_ms or (SIMULATE_PERIOD_MS,)
    if len(scs_list) != 1 or len(periods) != 1:
        raise ConfigError("simulate takes a single SCS and a single sync period")
    errors = spec.error_config(ErrorConfig())
    duration = float(spec.overrides.get("duration_ms") or SIMULATE_DURATION_MS)
    cfg = spec.sim_config(spec.numerology(scs_list[0]), errors, periods[0], _covering_duration(periods[0], duration))
    trace: Trace = simulate(cfg)
    data = trace.to_dict()
    data["below_threshold"] = trace.max_abs_ns < spec.threshold_ns
    return ExperimentResult(
        spec.id,
        trace.to_frame(),
        data,
        _meta(spec, errors, n_ticks=cfg.n_ticks, n_syncs=cfg.n_syncs, tick_ms=cfg.effective_tick_ms,
              saturation_count=trace.saturation_count),
    )


class ExperimentOperations:
    """Runs experiments by id and writes their result files."""

    def __init__(self, log_level: Optional[str] = None):
        self.logger = setup_logger('ExperimentOperations', log_level)
        self.available_experiments: Dict[ExperimentId, Callable[[ExperimentSpec], ExperimentResult]] = {
            ExperimentId.TABLE1: run_table1,
            ExperimentId.FIG4: run_fig4,
            ExperimentId.FIG5: run_fig5,
            ExperimentId.FIG6: run_fig6,
            ExperimentId.FIG7: run_fig7,
            ExperimentId.CAPACITY: run_capacity,
            ExperimentId.SIMULATE: run_simulate,
        }

    def run_experiment(self, spec: ExperimentSpec) -> Dict[str, Any]:
        """
        Run one experiment and export its result.

        Returns:
            dict: On success `success`, `experiment`, `paths` and `result`;
            otherwise `error`, `error_type` and the `exit_code` to report
            (2 for invalid configuration, 1 for I/O and other failures).
        """
        try:
            runner = self.available_experiments[spec.id]
            self.logger.info(f"Running {spec.id.value} (seed={spec.seed}, jobs={spec.jobs})")
            self.logger.debug(f"Configuration: {spec.to_config_dict()}")
            if spec.id is ExperimentId.FIG7 and spec.overrides.get("duration_ms") is not None:
                self.logger.warning("fig7 ignores duration_ms; each point spans period_ms * repetitions")
            result = runner(spec)
            saturation = result.meta.get("saturation_count", 0)
            if saturation:
                self.logger.warning(f"{spec.id.value}: {saturation} TA index draws were clamped")
            paths = ResultExporter(spec.out_dir, spec.formats).export(
                spec.id.value, result.frame, result.data, result.meta
            )
            self.logger.info(f"Finished {spec.id.value}: wrote {', '.join(paths)}")
            return {"success": True, "experiment": spec.id.value, "paths": paths, "result": result}
        except (ConfigError, TimingDomainError) as e:
            self.logger.error(f"Invalid configuration for {spec.id.value}: {e}")
            return {"error": str(e), "error_type": type(e).__name__, "exit_code": 2}
        except OSError as e:
            self.logger.error(f"Could not write results of {spec.id.value}: {e}")
            return {"error": str(e), "error_type": type(e).__name__, "exit_code": 1}
        except Exception as e:
            self.logger.exception(f"Experiment {spec.id.value} failed")
            return {"error": str(e), "error_type": type(e).__name__, "exit_code": 1}

    def run_all(self, spec: ExperimentSpec) -> List[Dict[str, Any]]:
        """Run every preset in order with the shared settings of `spec`."""
        return [self.run_experiment(replace(spec, id=experiment_id)) for experiment_id in ALL_EXPERIMENTS]

