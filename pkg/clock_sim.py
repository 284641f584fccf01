"""
Time-stepped simulation of the UE clock against the gNB reference time.

Between deliveries the UE clock drifts at a constant rate theta (ppm, i.e.
ns per ms). At every delivery the UE-minus-gNB difference X_TD is replaced by
a fresh reference-time delivery error.

Sampling convention: the sample at a sync tick holds X_TD just before the
delivered reference time is applied. The post-sync values are kept in
`Trace.sync_errors_ns`.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Iterator, Optional, Tuple

import numpy as np
import pandas as pd

from error_models import ErrorConfig, SyncErrorSample, compose_sync_error, sample_item
from exceptions import TimingDomainError
from nr_timing import Numerology

_GRID_TOLERANCE = 1e-9


def advance(x_td_ns, theta_ppm: float, tick_ms):
    """
    Accumulate drift over `tick_ms`: 1 ppm is 1 ns per ms.

    Args:
        x_td_ns: Current time difference (scalar or array).
        theta_ppm (float): Drift rate.
        tick_ms: Elapsed time, scalar or array, > 0.
    """
    if np.any(np.asarray(tick_ms) <= 0):
        raise TimingDomainError(f"tick_ms must be > 0, got {tick_ms}")
    return x_td_ns + theta_ppm * tick_ms


def apply_sync(x_td_ns, sync_error: SyncErrorSample):
    """
    Deliver reference time: the drift history in `x_td_ns` is discarded and
    X_TD becomes the delivery error.
    """
    return sync_error.total_ns


def _ticks(span_ms: float, tick_ms: float, what: str) -> int:
    steps = span_ms / tick_ms
    rounded = round(steps)
    if rounded < 1 or abs(steps - rounded) > _GRID_TOLERANCE * max(1.0, steps):
        raise TimingDomainError(f"{what} ({span_ms} ms) is not a whole number of ticks of {tick_ms} ms")
    return int(rounded)


@dataclass(frozen=True)
class SimConfig:
    """
    Attributes:
        theta_ppm (float): UE drift rate versus the gNB, signed.
        sync_period_ms (float): Interval between reference-time deliveries.
        duration_ms (float): Simulated span.
        tick_ms (float, optional): Step size. Defaults to min(1 ms, period / 10).
        seed (int): RNG seed.
        numerology (Numerology): NR numerology of the cell.
        errors (ErrorConfig): Delivery error configuration.
        initial_offset_ns (float): X_TD before the first delivery.
    """
    theta_ppm: float = 10.0
    sync_period_ms: float = 60.0
    duration_ms: float = 1200.0
    tick_ms: Optional[float] = None
    seed: int = 42
    numerology: Numerology = field(default_factory=Numerology)
    errors: ErrorConfig = field(default_factory=ErrorConfig)
    initial_offset_ns: float = 0.0

    def __post_init__(self):
        if not self.sync_period_ms > 0:
            raise TimingDomainError(f"sync_period_ms must be > 0, got {self.sync_period_ms}")
        if self.duration_ms < self.sync_period_ms:
            raise TimingDomainError(
                f"duration_ms ({self.duration_ms}) must be >= sync_period_ms ({self.sync_period_ms})"
            )
        tick = self.effective_tick_ms
        if not tick > 0:
            raise TimingDomainError(f"tick_ms must be > 0, got {tick}")
        if tick > self.sync_period_ms:
            raise TimingDomainError(f"tick_ms ({tick}) must be <= sync_period_ms ({self.sync_period_ms})")
        _ticks(self.sync_period_ms, tick, "sync_period_ms")
        _ticks(self.duration_ms, tick, "duration_ms")

    @property
    def effective_tick_ms(self) -> float:
        if self.tick_ms is not None:
            return float(self.tick_ms)
        return min(1.0, self.sync_period_ms / 10)

    @property
    def steps_per_sync(self) -> int:
        return _ticks(self.sync_period_ms, self.effective_tick_ms, "sync_period_ms")

    @property
    def n_ticks(self) -> int:
        return _ticks(self.duration_ms, self.effective_tick_ms, "duration_ms")

    @property
    def n_syncs(self) -> int:
        return self.n_ticks // self.steps_per_sync + 1


@dataclass(frozen=True, eq=False)
class Trace:
    t_ms: np.ndarray
    x_td_ns: np.ndarray
    is_sync: np.ndarray
    sync_errors_ns: np.ndarray
    saturation_count: int = 0

    def __post_init__(self):
        for name in ("t_ms", "x_td_ns", "is_sync", "sync_errors_ns"):
            getattr(self, name).setflags(write=False)

    def __len__(self) -> int:
        return len(self.t_ms)

    @property
    def max_abs_ns(self) -> float:
        """
        Peak |X_TD| over continuous time. X_TD is affine between deliveries, so
        the peak is attained at a sample or right after a delivery.
        """
        return float(max(np.max(np.abs(self.x_td_ns)), np.max(np.abs(self.sync_errors_ns))))

    @property
    def sampled_max_abs_ns(self) -> float:
        return float(np.max(np.abs(self.x_td_ns)))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            "t_ms": self.t_ms,
            "x_td_ns": self.x_td_ns,
            "is_sync": self.is_sync.astype(int),
        })

    def to_csv(self, path) -> None:
        self.to_frame().to_csv(path, index=False, lineterminator="\n")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "columns": ["t_ms", "x_td_ns", "is_sync"],
            "t_ms": self.t_ms.tolist(),
            "x_td_ns": self.x_td_ns.tolist(),
            "is_sync": self.is_sync.astype(int).tolist(),
            "sync_errors_ns": self.sync_errors_ns.tolist(),
            "saturation_count": self.saturation_count,
            "max_abs_ns": self.max_abs_ns,
        }

    def to_json(self, path) -> None:
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.to_dict(), f, sort_keys=True)


def _draw_sync_errors(cfg: SimConfig) -> SyncErrorSample:
    rng = np.random.default_rng(cfg.seed)
    return compose_sync_error(cfg.errors, cfg.numerology, rng, size=cfg.n_syncs)


def simulate(cfg: SimConfig) -> Trace:
    """
    Simulate X_TD over `cfg.duration_ms`.

    The result is a deterministic function of `cfg`: the k-th delivery always
    uses the k-th draw of a generator seeded with `cfg.seed`.
    """
    n = cfg.n_ticks
    s = cfg.steps_per_sync
    index = np.arange(n + 1)

    sample = _draw_sync_errors(cfg)
    post_sync = np.asarray(sample.total_ns, dtype=float)

    x_td = np.empty(n + 1)
    x_td[0] = cfg.initial_offset_ns
    segment = (index[1:] - 1) // s
    steps_into = index[1:] - segment * s
    # period * j / s reaches exactly one period at the next sync tick
    elapsed_ms = cfg.sync_period_ms * steps_into / s
    x_td[1:] = advance(post_sync[segment], cfg.theta_ppm, elapsed_ms)

    return Trace(
        t_ms=index * cfg.effective_tick_ms,
        x_td_ns=x_td,
        is_sync=index % s == 0,
        sync_errors_ns=post_sync,
        saturation_count=int(np.count_nonzero(sample.saturated)),
    )


def iterate_trace(cfg: SimConfig) -> Iterator[Tuple[float, float, bool]]:
    """
    Tick-by-tick form of `simulate`, yielding (t_ms, x_td_ns, is_sync).

    Uses the same sync-error draws as `simulate`; values agree with it up to
    floating-point accumulation.
    """
    s = cfg.steps_per_sync
    tick = cfg.effective_tick_ms
    sample = _draw_sync_errors(cfg)

    x_td = cfg.initial_offset_ns
    k = 0
    for i in range(cfg.n_ticks + 1):
        if i > 0:
            x_td = advance(x_td, cfg.theta_ppm, tick)
        is_sync = i % s == 0
        yield i * tick, x_td, is_sync
        if is_sync:
            x_td = apply_sync(x_td, sample_item(sample, k))
            k += 1


def max_error_bound_ns(theta_ppm: float, sync_period_ms: float) -> float:
    """Peak |X_TD| with every error source disabled: |theta| * period."""
    return math.fabs(theta_ppm) * sync_period_ms
