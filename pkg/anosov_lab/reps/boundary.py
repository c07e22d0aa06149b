import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from anosov_lab.configs.base import LabConfig, resolve
from anosov_lab.configs.enums import Projection
from anosov_lab.exceptions import EstimationError, NonProximalError
from anosov_lab.reps.base import RepPoint, WeightFunctional, evaluate
from anosov_lab.reps.batch import evaluate_codes
from anosov_lab.words import ConjClass, Word, class_codes

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class BoundaryPoint:
    """Attracting eigenline of an element and, on request, its top-(d-2) eigenspace."""

    line: np.ndarray
    gap: float
    subspace: Optional[np.ndarray] = None


def _normalize_phase(vector: np.ndarray) -> np.ndarray:
    vector = vector / np.linalg.norm(vector)
    pivot = vector[np.argmax(np.abs(vector))]
    return vector * (abs(pivot) / pivot)


def _attracting_data(matrix: np.ndarray, subspace: bool, proximal_gap: float, label: str) -> BoundaryPoint:
    eigenvalues, eigenvectors = np.linalg.eig(matrix)
    order = np.argsort(-np.abs(eigenvalues), kind="stable")
    moduli = np.abs(eigenvalues[order])
    gap = float(np.log(moduli[0]) - np.log(moduli[1]))
    if gap < proximal_gap:
        raise NonProximalError(f"non-proximal element {label}: eigenvalue gap {gap:.3e}")
    line = _normalize_phase(eigenvectors[:, order[0]])
    plane = None
    if subspace:
        d = matrix.shape[0]
        if d < 3:
            raise ValueError("The top-(d-2) subspace needs d >= 3")
        plane, _ = np.linalg.qr(eigenvectors[:, order[: d - 2]])
    return BoundaryPoint(line=line, gap=gap, subspace=plane)


def attracting_point(rep: RepPoint, word: Word, subspace: bool = False, config: Optional[LabConfig] = None) -> BoundaryPoint:
    """Attracting fixed data of rep(word) for any non-trivial word."""
    config = resolve(config)
    matrix = evaluate(rep, word, config.linalg).entries
    return _attracting_data(matrix, subspace, config.linalg.proximal_gap, str(word))


def fixed_line(rep: RepPoint, conj_class: ConjClass, subspace: bool = False, config: Optional[LabConfig] = None) -> BoundaryPoint:
    """Attracting eigenline of the class core (a point of the limit set) and optionally its top-(d-2) subspace."""
    return attracting_point(rep, conj_class.core, subspace, config)


@dataclass
class LimitCone:
    directions: np.ndarray
    minima: Dict[str, float] = field(default_factory=dict)
    class_count: int = 0

    def positive(self, name: str) -> bool:
        return self.minima[name] > 0


def limit_cone(
    rep: RepPoint,
    max_len: int,
    functionals: Sequence[WeightFunctional] = (),
    config: Optional[LabConfig] = None,
) -> LimitCone:
    """
    Projectivized Jordan vectors of all primitive classes with core length <= max_len.

    Directions are deduplicated at 1e-9; minima of each functional over the normalized sample are
    reported so positivity on the cone can be checked before computing exponents.
    """
    config = resolve(config)
    vectors: List[np.ndarray] = []
    for length in range(1, max_len + 1):
        codes, _ = class_codes(rep.rank, length, True)
        if codes.shape[0]:
            vectors.append(evaluate_codes(rep, codes, config.linalg).spectra(Projection.JORDAN))
    spectra = np.vstack(vectors) if vectors else np.zeros((0, rep.dim))
    norms = np.linalg.norm(spectra, axis=1)
    spectra = spectra[norms > 0] / norms[norms > 0, None]

    directions = np.unique(np.round(spectra, 9) + 0.0, axis=0)
    minima = {phi.name: float(np.min(phi(spectra))) if len(spectra) else float("nan") for phi in functionals}
    logger.info(f"Limit cone from {len(spectra)} classes: {len(directions)} distinct directions")
    return LimitCone(directions=directions.reshape(-1, rep.dim), minima=minima, class_count=len(spectra))


@dataclass
class HyperconvexityReport:
    min_gap: float
    gaps: np.ndarray
    triples: List[tuple]
    sampled: bool = True


def _distinct(u: np.ndarray, v: np.ndarray) -> bool:
    return 1.0 - abs(np.vdot(u, v)) > 1e-12


def hyperconvexity_certificate(
    rep: RepPoint,
    sample_size: int,
    max_len: int = 4,
    config: Optional[LabConfig] = None,
) -> HyperconvexityReport:
    """
    Sampled transversality of xi1(x) + xi1(y) and xi^{d-2}(z) over triples of attracting points.

    The gap of a triple is the smallest singular value of the d x d matrix [xi1(x), xi1(y), basis of
    xi^{d-2}(z)]; it vanishes exactly when the sum fails to be direct.
    """
    config = resolve(config)
    if rep.dim < 3:
        raise ValueError(f"Hyperconvexity needs d >= 3, got d = {rep.dim}")

    points = []
    for length in range(1, max_len + 1):
        codes, _ = class_codes(rep.rank, length, True)
        for row in codes:
            word = Word.from_codes(row, rep.rank)
            try:
                points.append((str(word), attracting_point(rep, word, subspace=True, config=config)))
            except NonProximalError as e:
                logger.warning(f"Skipping class {word}: {e}")
    if len(points) < 3:
        raise EstimationError(f"insufficient distinct classes: {len(points)} proximal classes up to length {max_len}")

    rng = np.random.default_rng(config.seed)
    gaps, triples = [], []
    attempts = 0
    while len(gaps) < sample_size and attempts < 20 * sample_size:
        attempts += 1
        i, j, k = rng.choice(len(points), size=3, replace=False)
        (name_x, x), (name_y, y), (name_z, z) = points[i], points[j], points[k]
        if not (_distinct(x.line, y.line) and _distinct(x.line, z.line) and _distinct(y.line, z.line)):
            continue
        frame = np.column_stack([x.line, y.line, z.subspace])
        gaps.append(float(np.linalg.svd(frame, compute_uv=False)[-1]))
        triples.append((name_x, name_y, name_z))
    if not gaps:
        raise EstimationError("insufficient distinct classes: no triple of distinct attracting points")
    gaps = np.array(gaps)
    logger.info(f"Hyperconvexity: {len(gaps)} triples, min gap {gaps.min():.3e}")
    return HyperconvexityReport(min_gap=float(gaps.min()), gaps=gaps, triples=triples)
