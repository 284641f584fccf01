"""
Per-sync-event error terms: time alignment error (TAE), reference time
granularity error (RTGE), time-of-arrival (ToA) error and the residual of
TA-based path-delay estimation.

Every sampler takes an explicit numpy Generator and an optional `size`. With
`size=None` a single float is returned, otherwise an array of independent
draws with the same per-draw semantics.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple, Union

import numpy as np

from exceptions import TimingDomainError
from nr_timing import Numerology, ta_granularity, ta_indices_for_rtt, ta_time_unit

ArrayOrFloat = Union[float, np.ndarray]

TRUNCATION_SIGMAS = 6.0

# Fractional point (in TA units) of the default ground-truth path delay.
DEFAULT_TRUE_PD_TA_UNITS = 10.37

# UE downlink timing error half-widths, in units of 64*T_c, per numerology.
_TOA_TABLE_COEFFICIENTS = {0: 12.0, 1: 10.0, 2: 7.0, 3: 3.5}


class ToaModelKind(str, Enum):
    TABLE_3GPP = "table_3gpp"
    GAUSSIAN = "gaussian"
    NONE = "none"


class CorrectionMode(str, Enum):
    NONE = "none"
    # Constant offset of magnitude T_gran/2 cancelling the floor bias.
    MINUS_SIGMA_HALF = "minus_sigma_half"
    # Literal sigma/2 magnitude, kappa dependent; Gaussian model only.
    LITERAL_SIGMA_HALF = "literal_sigma_half"
    CUSTOM = "custom"


def _is_non_negative(value) -> bool:
    return value >= 0 and math.isfinite(value)


def _non_negative(name: str, value) -> None:
    if not _is_non_negative(value):
        raise TimingDomainError(f"{name} must be a finite number >= 0, got {value}")


@dataclass(frozen=True)
class ToaModel:
    kind: ToaModelKind = ToaModelKind.GAUSSIAN
    kappa: float = 2.0

    def __post_init__(self):
        object.__setattr__(self, "kind", ToaModelKind(self.kind))
        if not (self.kappa > 0 and math.isfinite(self.kappa)):
            raise TimingDomainError(f"kappa must be a finite number > 0, got {self.kappa}")


@dataclass(frozen=True)
class Correction:
    mode: CorrectionMode = CorrectionMode.NONE
    custom_ns: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "mode", CorrectionMode(self.mode))
        if not math.isfinite(self.custom_ns):
            raise TimingDomainError(f"Correction offset must be finite, got {self.custom_ns}")


@dataclass(frozen=True)
class ErrorConfig:
    """
    Distributions and bounds of the per-sync error terms.

    Attributes:
        tae_bound_ns (float): Half-width of the uniform TAE interval.
        rtge_granularity_ns (float): Fixed reference time granularity G_R,
            used when `rtge_granularity_range_ns` is None.
        rtge_granularity_range_ns (tuple, optional): (lo, hi) for G_R drawn
            uniformly per sync event.
        toa_model (ToaModel): ToA error model.
        correction (Correction): Path-delay correction applied to the residual.
        true_pd_ns (float, optional): Ground-truth one-way delay. None selects
            10.37 * U(mu), a point off the TA lattice.
    """
    tae_bound_ns: float = 65.0
    rtge_granularity_ns: float = 0.0
    rtge_granularity_range_ns: Optional[Tuple[float, float]] = (10.0, 300.0)
    toa_model: ToaModel = field(default_factory=ToaModel)
    correction: Correction = field(default_factory=Correction)
    true_pd_ns: Optional[float] = None

    def __post_init__(self):
        _non_negative("tae_bound_ns", self.tae_bound_ns)
        _non_negative("rtge_granularity_ns", self.rtge_granularity_ns)
        if self.rtge_granularity_range_ns is not None:
            lo, hi = self.rtge_granularity_range_ns
            if not (_is_non_negative(lo) and _is_non_negative(hi) and lo <= hi):
                raise TimingDomainError(f"Invalid granularity range [{lo}, {hi}]")
            object.__setattr__(self, "rtge_granularity_range_ns", (float(lo), float(hi)))
        if self.true_pd_ns is not None:
            _non_negative("true_pd_ns", self.true_pd_ns)

    @classmethod
    def zero(cls, **overrides) -> "ErrorConfig":
        """A configuration with every error source disabled."""
        values = dict(
            tae_bound_ns=0.0,
            rtge_granularity_ns=0.0,
            rtge_granularity_range_ns=None,
            toa_model=ToaModel(ToaModelKind.NONE),
        )
        values.update(overrides)
        return cls(**values)

    def resolved_true_pd_ns(self, num: Numerology) -> float:
        if self.true_pd_ns is not None:
            return self.true_pd_ns
        return DEFAULT_TRUE_PD_TA_UNITS * ta_time_unit(num)


@dataclass(frozen=True)
class SyncErrorSample:
    """One (or a batch of) reference-time delivery error draws, in ns."""
    tae_ns: ArrayOrFloat
    rtge_ns: ArrayOrFloat
    toa_ns: ArrayOrFloat
    pd_residual_ns: ArrayOrFloat
    total_ns: ArrayOrFloat
    saturated: Union[bool, np.ndarray] = False


def _as_output(values: np.ndarray, size):
    if size is None:
        return values.item()
    return values


def sample_tae(bound_ns: float, rng: np.random.Generator, size=None) -> ArrayOrFloat:
    """Uniform TAE draw in [-bound, +bound]."""
    _non_negative("TAE bound", bound_ns)
    return _as_output(np.asarray(rng.uniform(-1.0, 1.0, size) * bound_ns), size)


def sample_rtge(g_r_ns: ArrayOrFloat, rng: np.random.Generator, size=None) -> ArrayOrFloat:
    """
    Uniform RTGE draw in [-G_R/2, +G_R/2].

    `g_r_ns` may be an array of per-event granularities matching `size`.
    """
    g_r = np.asarray(g_r_ns, dtype=float)
    if not np.all((g_r >= 0) & np.isfinite(g_r)):
        raise TimingDomainError(f"Reference time granularity must be finite and >= 0, got {g_r_ns}")
    return _as_output(np.asarray(rng.uniform(-0.5, 0.5, size) * g_r_ns), size)


def sample_granularity(cfg: ErrorConfig, rng: np.random.Generator, size=None) -> ArrayOrFloat:
    """G_R per sync event: fixed, or uniform over the configured range."""
    if cfg.rtge_granularity_range_ns is None:
        if size is None:
            return cfg.rtge_granularity_ns
        return np.full(size, cfg.rtge_granularity_ns)
    lo, hi = cfg.rtge_granularity_range_ns
    return _as_output(np.asarray(rng.uniform(lo, hi, size)), size)


def toa_bound_3gpp(num: Numerology) -> float:
    """Half-width of the 3GPP UE timing error for the numerology, in ns."""
    try:
        coefficient = _TOA_TABLE_COEFFICIENTS[num.mu]
    except KeyError:
        raise TimingDomainError(f"No ToA bound defined for mu={num.mu}") from None
    return coefficient * 64 * num.t_c_ns


def toa_sigma(num: Numerology, kappa: float) -> float:
    """Standard deviation of the LoS Gaussian ToA error, U(mu) / kappa."""
    if not (kappa > 0 and math.isfinite(kappa)):
        raise TimingDomainError(f"kappa must be a finite number > 0, got {kappa}")
    return ta_time_unit(num) / kappa


def _truncated_standard_normal(rng: np.random.Generator, size) -> np.ndarray:
    z = np.asarray(rng.standard_normal(size), dtype=float)
    outside = np.abs(z) > TRUNCATION_SIGMAS
    while np.any(outside):
        if z.ndim == 0:
            z = np.asarray(rng.standard_normal(), dtype=float)
        else:
            z[outside] = rng.standard_normal(int(outside.sum()))
        outside = np.abs(z) > TRUNCATION_SIGMAS
    return z


def sample_toa(model: ToaModel, num: Numerology, rng: np.random.Generator, size=None) -> ArrayOrFloat:
    """ToA error draw under `model` (uniform within the 3GPP bound, or Gaussian)."""
    if model.kind is ToaModelKind.NONE:
        values = np.zeros(() if size is None else size)
    elif model.kind is ToaModelKind.TABLE_3GPP:
        values = np.asarray(rng.uniform(-1.0, 1.0, size) * toa_bound_3gpp(num))
    else:
        values = _truncated_standard_normal(rng, size) * toa_sigma(num, model.kappa)
    return _as_output(values, size)


def correction_term(correction: Correction, num: Numerology, toa_model: ToaModel) -> float:
    """
    Offset added to the path-delay residual.

    The floor quantizer under-estimates the delay, so the built-in modes add a
    positive term.
    """
    if correction.mode is CorrectionMode.NONE:
        return 0.0
    if correction.mode is CorrectionMode.MINUS_SIGMA_HALF:
        return ta_granularity(num) / 2
    if correction.mode is CorrectionMode.LITERAL_SIGMA_HALF:
        if toa_model.kind is not ToaModelKind.GAUSSIAN:
            raise TimingDomainError("literal_sigma_half correction needs the Gaussian ToA model")
        return toa_sigma(num, toa_model.kappa) / 2
    return correction.custom_ns


def residual_from_toa(true_pd_ns: float, num: Numerology, toa_ns, correction: Correction,
                      toa_model: ToaModel) -> Tuple[np.ndarray, np.ndarray]:
    """Path-delay residual and saturation mask for given ToA error draws."""
    measured_rtt = 2 * true_pd_ns + np.asarray(toa_ns, dtype=float)
    indices, saturated = ta_indices_for_rtt(measured_rtt, num)
    pd_est = indices * ta_time_unit(num) / 2
    residual = pd_est - true_pd_ns + correction_term(correction, num, toa_model)
    return residual, saturated


def pd_estimation_residual(true_pd_ns: float, num: Numerology, toa_model: ToaModel,
                           correction: Correction, rng: np.random.Generator, size=None) -> ArrayOrFloat:
    """
    Residual of TA-based path-delay estimation (estimate minus truth, plus
    correction).

    The gNB measures the round trip with a ToA error, quantizes it to a
    random-access TA index (floor, clamped on saturation) and the UE takes
    TA/2 as the one-way delay.
    """
    _non_negative("true_pd_ns", true_pd_ns)
    toa = sample_toa(toa_model, num, rng, size)
    residual, _ = residual_from_toa(true_pd_ns, num, toa, correction, toa_model)
    return _as_output(residual, size)


def compose_sync_error(cfg: ErrorConfig, num: Numerology, rng: np.random.Generator, size=None) -> SyncErrorSample:
    """
    Draw the cumulative reference-time delivery error.

    Draw order is fixed (TAE, G_R, RTGE, ToA) so that configurations differing
    only in numerology consume identical random streams.
    """
    tae = sample_tae(cfg.tae_bound_ns, rng, size)
    g_r = sample_granularity(cfg, rng, size)
    rtge = sample_rtge(g_r, rng, size)
    toa = sample_toa(cfg.toa_model, num, rng, size)
    residual, saturated = residual_from_toa(cfg.resolved_true_pd_ns(num), num, toa, cfg.correction, cfg.toa_model)

    total = np.asarray(tae) + np.asarray(rtge) + residual
    return SyncErrorSample(
        tae_ns=tae,
        rtge_ns=rtge,
        toa_ns=toa,
        pd_residual_ns=_as_output(residual, size),
        total_ns=_as_output(total, size),
        saturated=_as_output(saturated, size),
    )


def sample_item(sample: SyncErrorSample, k: int) -> SyncErrorSample:
    """The k-th draw of a batched SyncErrorSample, as scalars."""
    return SyncErrorSample(
        tae_ns=float(np.asarray(sample.tae_ns)[k]),
        rtge_ns=float(np.asarray(sample.rtge_ns)[k]),
        toa_ns=float(np.asarray(sample.toa_ns)[k]),
        pd_residual_ns=float(np.asarray(sample.pd_residual_ns)[k]),
        total_ns=float(np.asarray(sample.total_ns)[k]),
        saturated=bool(np.asarray(sample.saturated)[k]),
    )
