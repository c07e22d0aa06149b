"""
Thermodynamic quantities estimated from period tables: pressure of potentials, Gibbs averages,
dynamical intersection, renormalized intersection and variance.

A potential or a second function is given by its periods, an array aligned with the table rows.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from anosov_lab.configs.base import LabConfig, resolve
from anosov_lab.exceptions import EstimationError, PositivityError
from anosov_lab.spectrum.exponents import ExponentEstimate, entropy_growth
from anosov_lab.spectrum.table import ClassSpectrum
from anosov_lab.spectrum.windows import WindowFit, combine_windows, rank_windows, shell_fit

logger = logging.getLogger(__name__)

Column = Union[int, str]


def _aligned(spectrum: ClassSpectrum, values: np.ndarray, label: str) -> np.ndarray:
    values = np.asarray(values, dtype=np.float64)
    if values.shape != (len(spectrum),):
        raise ValueError(f"{label} must have one value per table row ({len(spectrum)}), got shape {values.shape}")
    return values


def pressure_orbit(
    spectrum: ClassSpectrum,
    potential: np.ndarray,
    rep: Column = 0,
    functional: Column = 0,
    config: Optional[LabConfig] = None,
    h: Optional[float] = None,
) -> WindowFit:
    """
    Growth rate of sum_{l(a) <= T} exp(F(a)) where l is the chosen period column and F the potential.

    Sums are taken over period shells with log-sum-exp and fitted against the shell center. With
    the orbit-count correction the fit runs on shell averages of exp(F) and the entropy h of the
    period column is added back, so P(0) = h and the 1/T factor of the orbit count cancels in every
    shell; h defaults to the growth entropy of the column.
    """
    config = resolve(config)
    periods = spectrum.column(rep, functional)
    if np.any(periods <= 0):
        raise PositivityError("functional not positive on limit cone: non-positive base period")
    potential = _aligned(spectrum, potential, "potential")
    if not np.all(np.isfinite(potential)):
        raise EstimationError("Potential periods must be finite")
    t_cut = spectrum.cutoff(rep, functional)
    if config.windows.orbit_correction:
        if h is None:
            h = entropy_growth(spectrum, rep, functional, config).value
        fit = shell_fit(periods, potential, t_cut, config.windows, average=True).shifted(h)
    else:
        fit = shell_fit(periods, potential, t_cut, config.windows)
    logger.debug(f"Pressure {fit.value:.9g} (spread {fit.spread:.3g})")
    return fit


def _ranked_rows(spectrum: ClassSpectrum, rep: Column, functional: Column) -> np.ndarray:
    """Rows below the cut-off in increasing period order; ties keep table order."""
    periods = spectrum.column(rep, functional)
    below = np.flatnonzero(periods <= spectrum.cutoff(rep, functional))
    return below[np.argsort(periods[below], kind="stable")]


def _windows(spectrum: ClassSpectrum, rep: Column, functional: Column, config: LabConfig):
    periods = spectrum.column(rep, functional)
    rows = _ranked_rows(spectrum, rep, functional)
    for start, lower in rank_windows(periods[rows], config.windows.fractions):
        mask = np.zeros(len(spectrum), dtype=bool)
        mask[rows[start:]] = True
        yield lower, mask


def gibbs_average(
    spectrum: ClassSpectrum,
    g: np.ndarray,
    h: float,
    rep: Column = 0,
    functional: Column = 0,
    config: Optional[LabConfig] = None,
) -> WindowFit:
    """
    Ratio sum w(a) l_g(a) / sum w(a) l_f(a) with w(a) = exp(-h l_f(a)) over each top window.

    This is the equilibrium-state average of g relative to f; g = c * f gives c.
    """
    config = resolve(config)
    periods = spectrum.column(rep, functional)
    g = _aligned(spectrum, g, "g periods")
    estimates, abscissae = [], []
    for lower, mask in _windows(spectrum, rep, functional, config):
        log_w = -h * (periods[mask] - periods[mask].max())
        weights = np.exp(log_w)
        numerator = float(np.sum(weights * g[mask]))
        denominator = float(np.sum(weights * periods[mask]))
        estimates.append(numerator / denominator)
        abscissae.append(1.0 / lower)
    return combine_windows(estimates, abscissae, config.windows.extrapolate)


@dataclass
class IntersectionEstimate:
    value: float
    plain: WindowFit
    gibbs: Optional[WindowFit]
    spread: float

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "spread": self.spread,
            "plain": self.plain.to_dict(),
            "gibbs": self.gibbs.to_dict() if self.gibbs else None,
        }


def intersection(
    spectrum: ClassSpectrum,
    rep_f: Column = 0,
    rep_g: Column = 1,
    functional: Column = 0,
    config: Optional[LabConfig] = None,
    h: Optional[float] = None,
    with_gibbs: bool = True,
) -> IntersectionEstimate:
    """
    Dynamical intersection I(f, g): average of l_g / l_f over R_T = {l_f <= T}.

    The plain estimator averages over R_T for the ceil(n^q) classes of smallest l_f, for each window
    fraction q and q = 1 (n classes below the cut-off), then extrapolates in 1/T with T the largest
    l_f in the set. The Gibbs estimator is reported alongside.
    """
    config = resolve(config)
    f_periods = spectrum.column(rep_f, functional)
    g_periods = spectrum.column(rep_g, functional)
    t_cut = spectrum.cutoff(rep_f, functional)
    if np.any(f_periods[f_periods <= t_cut] <= 0):
        raise PositivityError("functional not positive on limit cone")
    if np.any(g_periods[f_periods <= t_cut] <= 0):
        raise PositivityError("functional not positive on comparison limit cone")

    estimates, abscissae = [], []
    rows = _ranked_rows(spectrum, rep_f, functional)
    if rows.size == 0:
        raise EstimationError(f"empty orbit set below T={t_cut:.6g}")
    for fraction in tuple(config.windows.fractions) + (1.0,):
        members = rows[: min(rows.size, max(1, math.ceil(rows.size**fraction)))]
        estimates.append(float(np.mean(g_periods[members] / f_periods[members])))
        abscissae.append(1.0 / f_periods[members[-1]])
    plain = combine_windows(estimates, abscissae, config.windows.extrapolate)

    gibbs = None
    if with_gibbs:
        if h is None:
            h = entropy_growth(spectrum, rep_f, functional, config).value
        gibbs = gibbs_average(spectrum, g_periods, h, rep_f, functional, config)
    spread = plain.spread if gibbs is None else max(plain.spread, abs(plain.value - gibbs.value))
    logger.info(f"Intersection I = {plain.value:.12g} (spread {spread:.3g})")
    return IntersectionEstimate(value=plain.value, plain=plain, gibbs=gibbs, spread=spread)


@dataclass
class RenormalizedEstimate:
    value: float
    spread: float
    h_f: ExponentEstimate
    h_g: ExponentEstimate
    intersection: IntersectionEstimate

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "spread": self.spread,
            "h_f": self.h_f.to_dict(),
            "h_g": self.h_g.to_dict(),
            "intersection": self.intersection.to_dict(),
        }


def renormalized_intersection(
    spectrum: ClassSpectrum,
    rep_f: Column = 0,
    rep_g: Column = 1,
    functional: Column = 0,
    config: Optional[LabConfig] = None,
) -> RenormalizedEstimate:
    """J(f, g) = (h_g / h_f) * I(f, g)."""
    config = resolve(config)
    h_f = entropy_growth(spectrum, rep_f, functional, config)
    h_g = h_f if rep_g == rep_f else entropy_growth(spectrum, rep_g, functional, config)
    inter = intersection(spectrum, rep_f, rep_g, functional, config, h=h_f.value, with_gibbs=False)
    value = h_g.value / h_f.value * inter.value
    relative = h_f.spread / h_f.value + h_g.spread / h_g.value + inter.spread / inter.value
    return RenormalizedEstimate(value=value, spread=abs(value) * relative, h_f=h_f, h_g=h_g, intersection=inter)


@dataclass
class VarianceEstimate:
    value: float
    first_derivative: float
    gibbs_mean: float
    orbit_variance: float
    step: float

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "first_derivative": self.first_derivative,
            "gibbs_mean": self.gibbs_mean,
            "orbit_variance": self.orbit_variance,
            "step": self.step,
        }


def orbit_variance(
    spectrum: ClassSpectrum,
    g: np.ndarray,
    h: float,
    rep: Column = 0,
    functional: Column = 0,
    config: Optional[LabConfig] = None,
) -> float:
    """Gibbs-weighted average of (l_g - c l_f)^2 / l_f over the top window; non-negative by construction."""
    config = resolve(config)
    periods = spectrum.column(rep, functional)
    g = _aligned(spectrum, g, "g periods")
    *_, (lower, mask) = _windows(spectrum, rep, functional, config)
    weights = np.exp(-h * (periods[mask] - periods[mask].max()))
    mean = float(np.sum(weights * g[mask]) / np.sum(weights * periods[mask]))
    centered = g[mask] - mean * periods[mask]
    return float(np.sum(weights * centered**2 / periods[mask]) / np.sum(weights))


def variance(
    spectrum: ClassSpectrum,
    g: np.ndarray,
    rep: Column = 0,
    functional: Column = 0,
    config: Optional[LabConfig] = None,
    h: Optional[float] = None,
) -> VarianceEstimate:
    """
    Second derivative at t = 0 of t -> P(-h f + t g~), with g~ = g - c f centered by its Gibbs mean c.

    Also returns the first derivative of t -> P(-h f + t g), which should match c.
    """
    config = resolve(config)
    periods = spectrum.column(rep, functional)
    g = _aligned(spectrum, g, "g periods")
    if h is None:
        h = entropy_growth(spectrum, rep, functional, config).value
    mean = gibbs_average(spectrum, g, h, rep, functional, config).value
    centered = g - mean * periods
    step = config.calculus.variance_step
    base = -h * periods

    def pressure(t: float, direction: np.ndarray) -> float:
        return pressure_orbit(spectrum, base + t * direction, rep, functional, config, h=h).value

    p0 = pressure(0.0, centered)
    second = (pressure(step, centered) - 2.0 * p0 + pressure(-step, centered)) / step**2
    first = (pressure(step, g) - pressure(-step, g)) / (2.0 * step)
    direct = orbit_variance(spectrum, g, h, rep, functional, config)
    logger.info(f"Variance {second:.6g} (orbit estimate {direct:.6g}), dP/dt {first:.6g} vs Gibbs mean {mean:.6g}")
    return VarianceEstimate(value=second, first_derivative=first, gibbs_mean=mean, orbit_variance=direct, step=step)
