import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Union

import numpy as np
from scipy.special import logsumexp

from anosov_lab.configs.base import LabConfig, resolve
from anosov_lab.configs.enums import ExponentMethod, Projection
from anosov_lab.exceptions import BracketError, EstimationError, PositivityError
from anosov_lab.reps.base import RepPoint, WeightFunctional
from anosov_lab.reps.batch import grow_levels
from anosov_lab.spectrum.table import ClassSpectrum
from anosov_lab.spectrum.windows import combine_windows, linear_fit, staircase_fit
from anosov_lab.utils.parallel import ordered_map
from anosov_lab.words import check_budget

logger = logging.getLogger(__name__)


@dataclass
class ExponentEstimate:
    value: float
    method: ExponentMethod
    spread: float
    diagnostics: Dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"value": self.value, "method": self.method.value, "spread": self.spread, "diagnostics": self.diagnostics}


def entropy_growth(
    spectrum: ClassSpectrum,
    rep: Union[int, str] = 0,
    functional: Union[int, str] = 0,
    config: Optional[LabConfig] = None,
) -> ExponentEstimate:
    """Exponential growth rate of #{classes with period <= T}, fitted below the table's cut-off."""
    config = resolve(config)
    periods = spectrum.column(rep, functional)
    if np.any(periods <= 0):
        raise PositivityError("functional not positive on limit cone: non-positive period in table")
    t_cut = spectrum.cutoff(rep, functional)
    fit = staircase_fit(periods, t_cut, config.windows)
    count = int(np.count_nonzero(periods <= t_cut))
    logger.info(f"Growth entropy {fit.value:.9g} (spread {fit.spread:.3g}) from {count} classes below T={t_cut:.6g}")
    return ExponentEstimate(
        value=fit.value,
        method=ExponentMethod.GROWTH,
        spread=fit.spread,
        diagnostics={"t_cut": t_cut, "classes": count, **fit.to_dict()},
    )


def _shard_values(rep: RepPoint, functional: WeightFunctional, max_len: int, first: int, config: LabConfig) -> List[np.ndarray]:
    return [functional(level.spectra(Projection.CARTAN)) for level in grow_levels(rep, max_len, first=first, config=config.linalg)]


def level_values(
    rep: RepPoint,
    functional: WeightFunctional,
    max_len: int,
    config: Optional[LabConfig] = None,
    threads: Optional[int] = None,
) -> List[np.ndarray]:
    """functional(cartan(rep(w))) for every reduced word, grouped by word length 1..max_len."""
    config = resolve(config)
    check_budget(rep.rank, max_len, config.enumeration.budget)
    shards = ordered_map(
        lambda first: _shard_values(rep, functional, max_len, first, config),
        range(2 * rep.rank),
        threads or config.threads,
    )
    return [np.concatenate([shard[n] for shard in shards]) for n in range(max_len)]


def _growth_slope(levels: List[np.ndarray], lengths: np.ndarray, s: float) -> float:
    sums = [float(logsumexp(-s * levels[n - 1])) for n in lengths]
    slope, _ = linear_fit(lengths, sums)
    return slope


def _bisect_zero(levels: List[np.ndarray], lengths: np.ndarray, scale: float, tolerance: float = 1e-13) -> float:
    low, high = 0.0, 1.0 / scale
    for _ in range(200):
        if _growth_slope(levels, lengths, high) < 0:
            break
        low, high = high, 2.0 * high
    else:
        raise BracketError(f"Dirichlet growth rate stays positive up to s={high:.3e}")
    while high - low > tolerance * high:
        middle = 0.5 * (low + high)
        if _growth_slope(levels, lengths, middle) > 0:
            low = middle
        else:
            high = middle
    return 0.5 * (low + high)


def exponent_dirichlet(
    rep: RepPoint,
    functional: Union[str, WeightFunctional],
    max_len: int,
    config: Optional[LabConfig] = None,
    threads: Optional[int] = None,
) -> ExponentEstimate:
    """
    Critical exponent of s -> sum over group elements of exp(-s * functional(cartan(rep(g)))).

    For each s the log-sums over words of length n are fitted against n on nested windows of
    lengths; per window, bisection finds the s where the growth rate crosses zero, and the roots are
    extrapolated in 1/n.
    """
    config = resolve(config)
    if isinstance(functional, str):
        functional = WeightFunctional.parse(functional, rep.dim)
    levels = level_values(rep, functional, max_len, config, threads)
    if any(np.any(values <= 0) for values in levels):
        raise PositivityError(f"functional not positive on limit cone: {functional.name} has non-positive Cartan values")
    if 2 * rep.rank - 1 == 1:
        logger.info("Cyclic group: Dirichlet series grows subexponentially, exponent 0")
        return ExponentEstimate(0.0, ExponentMethod.DIRICHLET, 0.0, {"max_len": max_len})

    scale = float(np.mean(levels[-1])) / max_len
    estimates, abscissae, windows = [], [], []
    for fraction in config.windows.fractions:
        start = max(1, math.ceil(fraction * max_len))
        lengths = np.arange(start, max_len + 1)
        if lengths.size < 2:
            raise EstimationError(f"window of word lengths [{start}, {max_len}] has fewer than 2 levels")
        root = _bisect_zero(levels, lengths, scale)
        estimates.append(root)
        abscissae.append(1.0 / start)
        windows.append([int(start), int(max_len)])
        logger.debug(f"Dirichlet window [{start}, {max_len}]: root {root:.12g}")
    fit = combine_windows(estimates, abscissae, config.windows.extrapolate)
    logger.info(f"Dirichlet exponent {fit.value:.9g} (spread {fit.spread:.3g}) for {functional.name}, L={max_len}")
    return ExponentEstimate(
        value=fit.value,
        method=ExponentMethod.DIRICHLET,
        spread=fit.spread,
        diagnostics={"max_len": max_len, "windows": windows, "functional": functional.name, **fit.to_dict()},
    )
