"""
Sampled limit sets and box-counting dimension.

A cloud is the set of attracting fixed lines of all primitive classes up to a core length, read
in one affine chart of projective space and stored as real coordinates (x1, y1, x2, y2, ...).
"""

import csv
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from anosov_lab.configs.base import LabConfig, resolve
from anosov_lab.exceptions import EstimationError
from anosov_lab.reps.base import RepPoint
from anosov_lab.reps.batch import evaluate_codes
from anosov_lab.utils.parallel import ordered_map
from anosov_lab.words import check_budget, class_codes

logger = logging.getLogger(__name__)

DEDUP_TOLERANCE = 1e-12
BOX_LEVELS = 9


@dataclass
class LimitCloud:
    """
    points[i] are the chart coordinates of one limit point; chart < d is a coordinate chart
    (divide by that coordinate and drop it), chart == d is the diagonal chart x1 + ... + xd = 1.
    """

    points: np.ndarray
    chart: int
    dim: int
    classes: int = 0
    skipped: int = 0

    def __len__(self) -> int:
        return self.points.shape[0]


def chart_functionals(dim: int) -> np.ndarray:
    """Rows are the linear forms defining the charts: e_1, ..., e_d, then the normalized all-ones form."""
    return np.vstack([np.eye(dim), np.ones((1, dim)) / np.sqrt(dim)])


def to_chart(lines: np.ndarray, chart: int) -> np.ndarray:
    """Affine coordinates of unit lines in the given chart, as real columns (x1, y1, ...)."""
    dim = lines.shape[1]
    values = lines @ chart_functionals(dim)[chart]
    affine = lines / values[:, None]
    drop = chart if chart < dim else dim - 1
    kept = np.delete(affine, drop, axis=1)
    out = np.empty((kept.shape[0], 2 * kept.shape[1]))
    out[:, 0::2] = kept.real
    out[:, 1::2] = kept.imag
    return out


def best_chart(lines: np.ndarray) -> int:
    """Chart maximizing the smallest |chart form| over the sample."""
    values = np.abs(lines @ chart_functionals(lines.shape[1]).T)
    return int(np.argmax(values.min(axis=0)))


def _attracting_lines(rep: RepPoint, length: int, first: int, config: LabConfig):
    codes, _ = class_codes(rep.rank, length, config.enumeration.primitive_only, first)
    if codes.shape[0] == 0:
        return np.zeros((0, rep.dim), dtype=np.complex128), 0
    batch = evaluate_codes(rep, codes, config.linalg)
    eigenvalues, vectors = np.linalg.eig(batch.forward)
    moduli = np.abs(eigenvalues)
    order = np.argsort(-moduli, axis=1, kind="stable")
    rows = np.arange(codes.shape[0])
    top, second = moduli[rows, order[:, 0]], moduli[rows, order[:, 1]]
    with np.errstate(divide="ignore"):
        proximal = np.log(top) - np.log(second) >= config.linalg.proximal_gap
    lines = vectors[rows, :, order[:, 0]]
    lines = lines / np.linalg.norm(lines, axis=1, keepdims=True)
    return lines[proximal], int(np.count_nonzero(~proximal))


def deduplicate(points: np.ndarray, tolerance: float = DEDUP_TOLERANCE) -> np.ndarray:
    """Sort rows lexicographically and drop rows within tolerance (max norm) of their predecessor."""
    if points.shape[0] <= 1:
        return points
    order = np.lexsort(points.T[::-1])
    points = points[order]
    keep = np.ones(points.shape[0], dtype=bool)
    keep[1:] = np.max(np.abs(np.diff(points, axis=0)), axis=1) > tolerance
    return points[keep]


def sample_limit_set(
    rep: RepPoint,
    max_len: int,
    config: Optional[LabConfig] = None,
    threads: Optional[int] = None,
    chart: Optional[int] = None,
) -> LimitCloud:
    """Attracting fixed points of every primitive class of core length <= max_len, in one affine chart."""
    config = resolve(config)
    check_budget(rep.rank, max_len, config.enumeration.budget)
    jobs = [(length, first) for length in range(1, max_len + 1) for first in range(2 * rep.rank)]
    results = ordered_map(lambda job: _attracting_lines(rep, job[0], job[1], config), jobs, threads or config.threads)
    lines = np.vstack([r[0] for r in results])
    skipped = sum(r[1] for r in results)
    if lines.shape[0] == 0:
        raise EstimationError(f"No proximal classes up to core length {max_len}")
    if skipped:
        logger.warning(f"Limit set sample skipped {skipped} non-proximal classes")
    chart = best_chart(lines) if chart is None else chart
    points = deduplicate(to_chart(lines, chart))
    logger.info(f"Limit set: {points.shape[0]} points from {lines.shape[0]} classes in chart {chart}")
    return LimitCloud(points=points, chart=chart, dim=rep.dim, classes=lines.shape[0], skipped=skipped)


@dataclass
class BoxDimension:
    value: float
    scales: List[float]
    counts: List[int]
    usable: List[bool] = field(default_factory=list)

    def to_dict(self) -> Dict:
        return {"value": self.value, "scales": self.scales, "counts": self.counts, "usable": self.usable}


def box_dimension(points: np.ndarray, levels: int = BOX_LEVELS) -> BoxDimension:
    """
    Box-counting slope on the grid anchored at the bounding box corner, with boxes of side
    eps_j = side * 2^-j for j = 0 .. levels - 1 (side: longest bounding box edge).

    A scale is usable when it neither merges all points into one box nor separates every point.
    """
    points = np.asarray(points.points if isinstance(points, LimitCloud) else points, dtype=np.float64)
    if points.size == 0:
        raise EstimationError("Empty point cloud")
    points = points.reshape(points.shape[0], -1)
    low = points.min(axis=0)
    side = float(np.max(points.max(axis=0) - low))
    if points.shape[0] == 1 or side == 0.0:
        return BoxDimension(0.0, [], [], [])

    scales, counts, usable = [], [], []
    for j in range(levels):
        boxes = 2**j
        epsilon = side / boxes
        index = np.minimum(np.floor((points - low) / epsilon).astype(np.int64), boxes - 1)
        count = int(np.unique(index, axis=0).shape[0])
        scales.append(epsilon)
        counts.append(count)
        usable.append(1 < count < points.shape[0])
    if sum(usable) < 4:
        raise EstimationError(f"fewer than 4 usable scales for box counting: counts {counts}")
    mask = np.array(usable)
    x = np.log(1.0 / np.array(scales))[mask]
    y = np.log(np.array(counts, dtype=np.float64))[mask]
    slope = float(np.polyfit(x, y, 1)[0])
    logger.info(f"Box dimension {slope:.6g} from {int(mask.sum())} scales")
    return BoxDimension(slope, scales, counts, usable)


def export_cloud_csv(cloud: LimitCloud, path: str) -> None:
    width = cloud.points.shape[1] // 2
    header = ["x", "y"] if width == 1 else [f"{axis}{i}" for i in range(1, width + 1) for axis in ("x", "y")]
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header + ["chart"])
        for row in cloud.points:
            writer.writerow([f"{value:.17g}" for value in row] + [cloud.chart])


def export_ppm(cloud: LimitCloud, path: str, width: int = 512, height: int = 512) -> None:
    """Binary 8-bit grayscale raster of hit counts (first two coordinates), clipped at 255."""
    if width < 1 or height < 1:
        raise ValueError(f"Raster size must be positive, got {width}x{height}")
    xy = cloud.points[:, :2]
    low = xy.min(axis=0)
    extent = np.maximum(xy.max(axis=0) - low, 1e-300)
    column = np.minimum((width * (xy[:, 0] - low[0]) / extent[0]).astype(np.int64), width - 1)
    row = height - 1 - np.minimum((height * (xy[:, 1] - low[1]) / extent[1]).astype(np.int64), height - 1)
    hits = np.zeros((height, width), dtype=np.int64)
    np.add.at(hits, (row, column), 1)
    with open(path, "wb") as handle:
        handle.write(f"P5 {width} {height} 255\n".encode("ascii"))
        handle.write(np.minimum(hits, 255).astype(np.uint8).tobytes())
