"""
Summary statistics over error samples: absolute mean, signed mean, maximum,
nearest-rank percentiles and empirical CDFs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np

from exceptions import TimingDomainError

DEFAULT_QUANTILES = (0.5, 0.9, 0.99, 0.999, 0.9999, 0.99999)


@dataclass(frozen=True)
class SummaryStats:
    """
    Attributes:
        abs_mean_ns (float): mean(|x|).
        mean_ns (float): Signed mean(x); `mean_magnitude_ns` is its magnitude.
        max_abs_ns (float): max(|x|).
        count (int): Number of samples.
        percentiles (dict): Quantile -> nearest-rank value of |x|.
        std_ns (float): Population standard deviation of x.
    """
    abs_mean_ns: float
    mean_ns: float
    max_abs_ns: float
    count: int
    percentiles: Dict[float, float] = field(default_factory=dict)
    std_ns: float = 0.0

    @property
    def mean_magnitude_ns(self) -> float:
        return abs(self.mean_ns)

    @property
    def standard_error_ns(self) -> float:
        return self.std_ns / math.sqrt(self.count)

    def to_dict(self) -> Dict[str, float]:
        row = {
            "abs_mean_ns": self.abs_mean_ns,
            "mean_ns": self.mean_ns,
            "mean_magnitude_ns": self.mean_magnitude_ns,
            "max_abs_ns": self.max_abs_ns,
            "count": self.count,
            "std_ns": self.std_ns,
        }
        for q, value in sorted(self.percentiles.items()):
            row[f"p{q:g}_abs_ns"] = value
        return row


def _as_samples(samples) -> np.ndarray:
    values = np.asarray(samples, dtype=float).ravel()
    if values.size == 0:
        raise TimingDomainError("Statistics need at least one sample")
    return values


def fold(samples) -> np.ndarray:
    """The |x| view used for cumulative-error CDFs."""
    return np.abs(_as_samples(samples))


def _fsum_mean(values: np.ndarray) -> float:
    # compensated summation keeps the result independent of summation order
    return math.fsum(values.tolist()) / values.size


def _check_quantile(q: float) -> None:
    if not 0 < q < 1:
        raise TimingDomainError(f"Quantile must be in (0, 1), got {q}")


def _nearest_rank(sorted_values: np.ndarray, q: float) -> float:
    _check_quantile(q)
    rank = math.ceil(round(q * sorted_values.size, 9))
    return float(sorted_values[min(max(rank, 1), sorted_values.size) - 1])


def percentile(samples, q: float) -> float:
    """
    Nearest-rank quantile: the smallest sample with at least a fraction q of
    the samples at or below it.
    """
    return _nearest_rank(np.sort(_as_samples(samples)), q)


def summarize(samples, quantiles: Sequence[float] = ()) -> SummaryStats:
    """
    Table-style statistics of signed samples. Percentiles are taken over |x|.
    """
    values = _as_samples(samples)
    folded = np.abs(values)
    sorted_folded = np.sort(folded) if len(quantiles) else folded
    mean = _fsum_mean(values)
    centred = values - mean
    std = math.sqrt(math.fsum((centred * centred).tolist()) / values.size)
    return SummaryStats(
        abs_mean_ns=_fsum_mean(folded),
        mean_ns=mean,
        max_abs_ns=float(folded.max()),
        count=int(values.size),
        percentiles={float(q): _nearest_rank(sorted_folded, q) for q in quantiles},
        std_ns=std,
    )


def empirical_cdf(samples, grid: Iterable[float]) -> List[Tuple[float, float]]:
    """
    Right-continuous empirical CDF, P(X <= v), evaluated at each grid value.

    Raises:
        TimingDomainError: On empty input or an unsorted grid.
    """
    values = np.sort(_as_samples(samples))
    points = np.asarray(list(grid), dtype=float)
    if points.size and np.any(np.diff(points) < 0):
        raise TimingDomainError("CDF grid must be sorted")
    counts = np.searchsorted(values, points, side="right")
    return [(float(v), float(c) / values.size) for v, c in zip(points, counts)]

