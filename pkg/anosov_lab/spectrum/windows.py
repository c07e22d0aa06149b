"""
Window fits shared by the orbit-sum estimators.

Every limit T -> infinity is estimated on nested windows of the n classes below the cut-off: the
window for q keeps the classes of rank >= ceil(n^q), roughly [q * T_max, T_max]. Per-window values are
extrapolated linearly in 1/T (abscissa: the lower window edge).
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Iterator, List, Sequence, Tuple

import numpy as np
from scipy.special import logsumexp

from anosov_lab.configs.base import WindowConfig
from anosov_lab.exceptions import EstimationError

logger = logging.getLogger(__name__)


def linear_fit(x: Sequence[float], y: Sequence[float]) -> Tuple[float, float]:
    """Least-squares (slope, intercept); constant data returns the constant exactly."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.size < 2:
        raise EstimationError(f"Need at least 2 points for a linear fit, got {x.size}")
    if np.all(y == y[0]):
        return 0.0, float(y[0])
    x_mean, y_mean = x.mean(), y.mean()
    dx = x - x_mean
    denominator = float(dx @ dx)
    if denominator == 0.0:
        raise EstimationError("Degenerate linear fit: all abscissae coincide")
    slope = float(dx @ (y - y_mean)) / denominator
    return slope, float(y_mean - slope * x_mean)


@dataclass
class WindowFit:
    value: float
    estimates: List[float]
    abscissae: List[float]
    spread: float
    extrapolated: bool
    extra: dict = field(default_factory=dict)

    def shifted(self, offset: float) -> "WindowFit":
        return WindowFit(
            value=self.value + offset,
            estimates=[e + offset for e in self.estimates],
            abscissae=list(self.abscissae),
            spread=self.spread,
            extrapolated=self.extrapolated,
            extra=dict(self.extra),
        )

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "window_estimates": list(self.estimates),
            "inverse_window_edges": list(self.abscissae),
            "spread": self.spread,
            "extrapolated": self.extrapolated,
            **self.extra,
        }


def combine_windows(estimates: Sequence[float], abscissae: Sequence[float], extrapolate: bool) -> WindowFit:
    """Extrapolate per-window estimates to 1/T = 0, or average them when extrapolation is off."""
    estimates = [float(e) for e in estimates]
    abscissae = [float(a) for a in abscissae]
    spread = max(estimates) - min(estimates)
    if extrapolate and len(set(abscissae)) >= 2:
        _, value = linear_fit(abscissae, estimates)
        extrapolated = True
    elif all(e == estimates[0] for e in estimates):
        value, extrapolated = estimates[0], False
    else:
        value, extrapolated = float(np.mean(estimates)), False
    return WindowFit(value=value, estimates=estimates, abscissae=abscissae, spread=spread, extrapolated=extrapolated)


def rank_windows(sorted_periods: np.ndarray, fractions: Sequence[float]) -> Iterator[Tuple[int, float]]:
    """
    Start rank and lower edge of each nested window over n sorted periods.

    The window for q holds the classes of rank >= ceil(n^q); since log N(T) ~ hT this is close to
    [q T_max, T_max] and depends only on the ordering, so rescaling the periods leaves it unchanged.
    """
    count = len(sorted_periods)
    if count == 0:
        raise EstimationError("too few classes: none below the cut-off")
    for fraction in fractions:
        start = min(count, max(1, math.ceil(count**fraction))) - 1
        yield start, float(sorted_periods[start])


def staircase_fit(periods: np.ndarray, t_cut: float, config: WindowConfig) -> WindowFit:
    """
    Growth rate of the counting function N(T) = #{periods <= T}.

    Fits log N(T) (+ log T with the orbit-count correction) against T at the sorted periods inside
    each window.
    """
    periods = np.sort(np.asarray(periods, dtype=np.float64))
    periods = periods[periods <= t_cut]
    if periods.size < config.min_classes:
        raise EstimationError(f"too few classes: {periods.size} below the cut-off, need {config.min_classes}")
    counts = np.searchsorted(periods, periods, side="right")
    y = np.log(counts)
    if config.orbit_correction:
        y = y + np.log(periods)

    estimates, abscissae = [], []
    for start, lower in rank_windows(periods, config.fractions):
        if np.unique(periods[start:]).size < 2:
            raise EstimationError(f"too few distinct periods in window [{lower:.6g}, {t_cut:.6g}]")
        slope, _ = linear_fit(periods[start:], y[start:])
        estimates.append(slope)
        abscissae.append(1.0 / lower)
        logger.debug(f"Staircase window [{lower:.6g}, {t_cut:.6g}]: slope {slope:.9g}")
    return combine_windows(estimates, abscissae, config.extrapolate)


def _shell_index(periods: np.ndarray, t_cut: float, bins: int) -> np.ndarray:
    edges = np.linspace(0.0, t_cut, bins + 1)
    return np.clip(np.searchsorted(edges, periods, side="left") - 1, 0, bins - 1)


def _shells(
    periods: np.ndarray, log_weights: np.ndarray, t_cut: float, bins: int, average: bool
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    inside = periods <= t_cut
    periods, log_weights = periods[inside], log_weights[inside]
    index = _shell_index(periods, t_cut, bins)
    width = t_cut / bins
    occupied, centers, values = [], [], []
    for b in np.unique(index):
        members = index == b
        value = float(logsumexp(log_weights[members]))
        if average:
            value -= float(np.log(np.count_nonzero(members)))
        occupied.append(int(b))
        centers.append((b + 0.5) * width)
        values.append(value)
    return np.array(occupied, dtype=np.int64), np.array(centers), np.array(values)


def shell_sums(
    periods: np.ndarray, log_weights: np.ndarray, t_cut: float, config: WindowConfig, average: bool = False
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Log of the weighted sums over the period shells (T_b - dT, T_b], returned as (centers, values).

    Empty shells are dropped; with average=True each sum is divided by the number of classes in its shell.
    """
    periods = np.asarray(periods, dtype=np.float64)
    log_weights = np.asarray(log_weights, dtype=np.float64)
    _, centers, values = _shells(periods, log_weights, t_cut, config.bins, average)
    return centers, values


def shell_fit(
    periods: np.ndarray, log_weights: np.ndarray, t_cut: float, config: WindowConfig, average: bool = False
) -> WindowFit:
    """
    Exponential growth rate of weighted shell sums (or shell averages) against the shell center.

    A window keeps the shells from the one holding its lower edge up to the cut-off.
    """
    periods = np.asarray(periods, dtype=np.float64)
    log_weights = np.asarray(log_weights, dtype=np.float64)
    occupied, centers, values = _shells(periods, log_weights, t_cut, config.bins, average)
    ranked = np.sort(periods[periods <= t_cut])
    estimates, abscissae = [], []
    for _, lower in rank_windows(ranked, config.fractions):
        first = _shell_index(np.array([lower]), t_cut, config.bins)[0]
        inside = occupied >= first
        if np.count_nonzero(inside) < 2:
            raise EstimationError(f"too few populated shells in window [{lower:.6g}, {t_cut:.6g}]")
        slope, _ = linear_fit(centers[inside], values[inside])
        estimates.append(slope)
        abscissae.append(1.0 / lower)
    return combine_windows(estimates, abscissae, config.extrapolate)
