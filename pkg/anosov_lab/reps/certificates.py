import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from anosov_lab.configs.base import LabConfig, resolve
from anosov_lab.configs.enums import Projection
from anosov_lab.reps.base import RepPoint, WeightFunctional
from anosov_lab.reps.batch import grow_levels
from anosov_lab.utils.parallel import ordered_map
from anosov_lab.words import check_budget

logger = logging.getLogger(__name__)


@dataclass
class AnosovCertificate:
    """
    Affine lower bound m(n) >= mu * n - c for the minimal root value over words of length n.

    mu and c are fitted on the window of long words; held_out records whether the shorter
    lengths, which take no part in the fit, also satisfy the bound.
    """

    root: str
    mu: float
    c: float
    passed: bool
    minima: List[float]
    window: tuple
    held_out: bool = True

    def to_dict(self) -> dict:
        return {
            "root": self.root,
            "mu": self.mu,
            "c": self.c,
            "pass": self.passed,
            "held_out": self.held_out,
            "minima": list(self.minima),
            "window": list(self.window),
        }


def fit_affine_bound(minima: Sequence[float], tolerance: float = 0.0) -> Tuple[float, float, bool]:
    """
    Fit m(n) >= mu * n - c on n in [ceil(L/2), L] and test the bound on the lengths below the window.

    c is the smallest offset, at least max(0, -intercept), under which the window satisfies the bound.
    Returns (mu, c, held_out).
    """
    minima = np.asarray(minima, dtype=np.float64)
    lengths = np.arange(1, len(minima) + 1)
    window = lengths >= math.ceil(len(minima) / 2)
    mu, intercept = np.polyfit(lengths[window], minima[window], 1)
    c = float(max(0.0, -intercept, np.max(mu * lengths[window] - minima[window])))
    held = ~window
    held_out = bool(np.all(minima[held] >= mu * lengths[held] - c - tolerance))
    return float(mu), c, held_out


def _shard_minima(rep: RepPoint, root: WeightFunctional, max_len: int, first: int, config: LabConfig) -> List[float]:
    return [
        float(np.min(root(level.spectra(Projection.CARTAN))))
        for level in grow_levels(rep, max_len, first=first, config=config.linalg)
    ]


def anosov_certificate(
    rep: RepPoint,
    root: WeightFunctional,
    max_len: int,
    config: Optional[LabConfig] = None,
    threads: Optional[int] = None,
) -> AnosovCertificate:
    """
    Fit m(n) = min_{|w| = n} root(cartan(rep(w))) by a line on n in [ceil(L/2), L].

    The shorter lengths are held out of the fit and checked against the resulting bound; the
    certificate passes when the slope reaches mu_min and the held-out lengths respect the bound.
    """
    config = resolve(config)
    index = root.simple_root_index()
    if index is None:
        raise ValueError(f"Anosov certificates need a simple root a_i, got {root.name}")
    if root.dim != rep.dim:
        raise ValueError(f"Root dimension {root.dim} does not match representation dimension {rep.dim}")
    if max_len < 2:
        raise ValueError("Anosov certificates need words up to length at least 2")
    check_budget(rep.rank, max_len, config.enumeration.budget)

    shards = ordered_map(
        lambda first: _shard_minima(rep, root, max_len, first, config),
        range(2 * rep.rank),
        threads or config.threads,
    )
    minima = np.min(np.array(shards), axis=0)

    mu, c, held_out = fit_affine_bound(minima, config.anosov.tolerance)
    if not held_out:
        logger.warning(f"Anosov certificate ({root.name}, L={max_len}): held-out lengths violate the fitted bound")
    passed = bool(mu >= config.anosov.mu_min and held_out)
    logger.info(f"Anosov certificate ({root.name}, L={max_len}): mu={mu:.6f}, c={c:.6f}, pass={passed}")
    return AnosovCertificate(
        root=root.name,
        mu=mu,
        c=c,
        passed=passed,
        minima=[float(m) for m in minima],
        window=(math.ceil(max_len / 2), max_len),
        held_out=held_out,
    )
