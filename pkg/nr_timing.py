"""
5G NR numerology timing constants and timing-advance (TA) math.

All durations are in nanoseconds unless a name says otherwise. Functions here
are pure and operate on immutable value types.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple, Union

import numpy as np

from exceptions import TaSaturationError, TimingDomainError

SPEED_OF_LIGHT_M_S = 299_792_458.0

# Samples per TA step (16 samples of 64 T_c each).
TA_STEP_SAMPLES = 16 * 64

CONNECTED_TA_CENTER = 31
CONNECTED_TA_MAX = 63
RANDOM_ACCESS_TA_MAX = 3846

SUPPORTED_MU = (0, 1, 2, 3)


class TaMode(str, Enum):
    CONNECTED = "connected"
    RANDOM_ACCESS = "random_access"


class PathDelayMode(str, Enum):
    CELL_RADIUS = "cell_radius"
    TA_BASED = "ta_based"


_TA_RANGES = {
    TaMode.CONNECTED: (0, CONNECTED_TA_MAX),
    TaMode.RANDOM_ACCESS: (0, RANDOM_ACCESS_TA_MAX),
}


def basic_time_unit(delta_f_max_khz: float, n_f: float) -> float:
    """
    Basic NR time unit T_c = 1 / (delta_f_max * N_f).

    Args:
        delta_f_max_khz (float): Maximal sub-carrier spacing in kHz.
        n_f (float): FFT size.

    Returns:
        float: T_c in ns.

    Raises:
        TimingDomainError: If either argument is not positive.
    """
    if delta_f_max_khz <= 0 or n_f <= 0:
        raise TimingDomainError(
            f"basic_time_unit needs positive arguments, got "
            f"delta_f_max_khz={delta_f_max_khz}, n_f={n_f}"
        )
    # 1 / kHz = 1 ms = 1e6 ns
    return 1e6 / (delta_f_max_khz * n_f)


@dataclass(frozen=True)
class Numerology:
    """
    An NR numerology and the constants its timing derives from.

    Attributes:
        mu (int): Numerology index, 0..3.
        delta_f_max_khz (float): Maximal SCS in kHz.
        n_f (int): FFT size.
        n_tafo (int): TA frequency-offset sample constant.
        legacy_nta_scaling (bool): Use N_TA = 16*64*2^mu literally instead of
            the TA unit shrinking with SCS.
    """
    mu: int = 0
    delta_f_max_khz: float = 480.0
    n_f: int = 4096
    n_tafo: int = 0
    legacy_nta_scaling: bool = False

    def __post_init__(self):
        if self.mu not in SUPPORTED_MU:
            raise TimingDomainError(f"Unsupported numerology mu={self.mu}; expected one of {SUPPORTED_MU}")
        if self.n_tafo < 0:
            raise TimingDomainError(f"n_tafo must be >= 0, got {self.n_tafo}")
        # validates delta_f_max_khz and n_f
        basic_time_unit(self.delta_f_max_khz, self.n_f)

    @classmethod
    def from_scs(cls, scs_khz: float, **kwargs) -> "Numerology":
        """Build the numerology whose sub-carrier spacing is `scs_khz`."""
        for mu in SUPPORTED_MU:
            if math.isclose(15.0 * 2 ** mu, float(scs_khz)):
                return cls(mu=mu, **kwargs)
        raise TimingDomainError(f"Unsupported sub-carrier spacing {scs_khz} kHz; expected 15, 30, 60 or 120")

    @property
    def scs_khz(self) -> float:
        return 15.0 * 2 ** self.mu

    @property
    def t_c_ns(self) -> float:
        return basic_time_unit(self.delta_f_max_khz, self.n_f)

    @property
    def slot_duration_ms(self) -> float:
        return 1.0 / 2 ** self.mu


def ta_time_unit(num: Numerology) -> float:
    """
    Duration of one TA index step, U(mu).

    U(mu) = (16*64 + n_tafo) * T_c / 2^mu. With `legacy_nta_scaling` the
    literal N_TA = 16*64*2^mu is used instead.

    Returns:
        float: U(mu) in ns.
    """
    if num.legacy_nta_scaling:
        return (TA_STEP_SAMPLES * 2 ** num.mu + num.n_tafo) * num.t_c_ns
    return (TA_STEP_SAMPLES + num.n_tafo) * num.t_c_ns / 2 ** num.mu


def ta_granularity(num: Numerology) -> float:
    """Path-delay quantization granularity T_gran = U(mu) / 2, in ns."""
    return ta_time_unit(num) / 2


@dataclass(frozen=True)
class TaCommand:
    index: int
    mode: TaMode = TaMode.RANDOM_ACCESS

    def __post_init__(self):
        object.__setattr__(self, "mode", TaMode(self.mode))
        lo, hi = _TA_RANGES[self.mode]
        if not lo <= self.index <= hi:
            raise TaSaturationError(self.index, TaCommand(min(max(self.index, lo), hi), self.mode))


def _floor_steps(value_ns, unit_ns: float):
    """
    floor(value / unit) corrected so that 0 <= value - n*unit < unit holds in
    floating point as well. Works on scalars and arrays.
    """
    steps = np.floor(np.asarray(value_ns, dtype=float) / unit_ns)
    steps = np.where((steps + 1) * unit_ns <= value_ns, steps + 1, steps)
    steps = np.where(steps * unit_ns > value_ns, steps - 1, steps)
    return steps.astype(np.int64)


def ta_index_for_rtt(rtt_ns: float, num: Numerology, mode: TaMode = TaMode.RANDOM_ACCESS) -> TaCommand:
    """
    Quantize a round-trip time into a TA command.

    In random-access mode `rtt_ns` is the absolute round-trip time and the
    index is floor(rtt / U). In connected mode `rtt_ns` is a signed timing
    adjustment and the index is 31 + floor(delta / U).

    Raises:
        TimingDomainError: If a random-access rtt is negative or any rtt is not finite.
        TaSaturationError: If the index falls outside the mode's range. The
            exception carries the clamped command.
    """
    mode = TaMode(mode)
    if not math.isfinite(rtt_ns):
        raise TimingDomainError(f"Round-trip time must be finite, got {rtt_ns}")
    if mode is TaMode.RANDOM_ACCESS and rtt_ns < 0:
        raise TimingDomainError(f"Round-trip time must be >= 0, got {rtt_ns}")
    steps = int(_floor_steps(rtt_ns, ta_time_unit(num)))
    if mode is TaMode.CONNECTED:
        steps += CONNECTED_TA_CENTER
    return TaCommand(steps, mode)


def ta_indices_for_rtt(rtt_ns: np.ndarray, num: Numerology) -> Tuple[np.ndarray, np.ndarray]:
    """
    Vectorised random-access quantization with saturation.

    Returns:
        tuple: (indices clamped to [0, 3846], boolean mask of saturated entries)
    """
    rtt_ns = np.asarray(rtt_ns, dtype=float)
    if not np.all(np.isfinite(rtt_ns)):
        raise TimingDomainError("Round-trip times must be finite")
    raw = _floor_steps(rtt_ns, ta_time_unit(num))
    clamped = np.clip(raw, 0, RANDOM_ACCESS_TA_MAX)
    return clamped, raw != clamped


def pd_compensation_connected(ta: TaCommand, num: Numerology) -> float:
    """
    Signed propagation-delay compensation of a connected-mode TA command,
    (index - 31) * U(mu), in ns.
    """
    if ta.mode is not TaMode.CONNECTED:
        raise TimingDomainError(f"pd_compensation_connected needs a connected-mode command, got {ta.mode}")
    return (ta.index - CONNECTED_TA_CENTER) * ta_time_unit(num)


def path_delay_estimate(mode: Union[PathDelayMode, str], radius_m: Optional[float] = None,
                        ta: Optional[TaCommand] = None, num: Optional[Numerology] = None) -> float:
    """
    Estimate the gNB-to-UE path delay.

    Args:
        mode: `cell_radius` (R / C) or `ta_based` (TA / 2 in time units).
        radius_m (float, optional): Cell radius in metres, cell_radius mode.
        ta (TaCommand, optional): Random-access TA command, ta_based mode.
        num (Numerology, optional): Numerology for ta_based mode.

    Returns:
        float: Estimated one-way delay in ns.
    """
    mode = PathDelayMode(mode)
    if mode is PathDelayMode.CELL_RADIUS:
        if radius_m is None or radius_m < 0:
            raise TimingDomainError(f"cell_radius mode needs radius_m >= 0, got {radius_m}")
        return radius_m / SPEED_OF_LIGHT_M_S * 1e9
    if ta is None or num is None:
        raise TimingDomainError("ta_based mode needs a TA command and a numerology")
    return ta.index * ta_time_unit(num) / 2
