"""
Discretized transfer operator of a Schottky group and the Bowen equation.

The limit set is covered by cylinder cells C_v = g_{v_1} ... g_{v_{N-1}}(D_{v_N}) for reduced words
v of a fixed depth N. For a cell v and a letter c with c != v_1^1, the branch g_c sends C_v into
the cell (c, v_1, ..., v_{N-1}). The operator

    (L_s f)(v) = sum_c |g_c'(x_v)|^s f(c, v_1, ..., v_{N-1})

uses the spherical derivative at the cell's sample point x_v (the image of the last disk center).
Its Perron root decreases in s and equals 1 at the Hausdorff dimension of the limit set.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from anosov_lab.bowen.schottky import SchottkyData, mobius
from anosov_lab.exceptions import BracketError, EigenvalueError, EstimationError
from anosov_lab.utils.parallel import ordered_map
from anosov_lab.words import next_codes, word_codes

logger = logging.getLogger(__name__)

_POWER_TOLERANCE = 1e-13
_MIN_WIDTH = 1e-14


def cylinder_depth(rank: int, per_disk: int) -> int:
    """Smallest N with (2k-1)^(N-1) >= per_disk (N = 1 for the cyclic group)."""
    if per_disk < 1:
        raise ValueError(f"Need at least one sample per disk, got {per_disk}")
    branching = 2 * rank - 1
    if branching == 1:
        return 1
    depth = 1
    while branching ** (depth - 1) < per_disk:
        depth += 1
    return depth


def spherical_log_derivative(matrix: np.ndarray, z: np.ndarray) -> np.ndarray:
    """log of |g'(z)| (1 + |z|^2) / (1 + |g z|^2) for a determinant-one 2x2 matrix."""
    (_, _), (r, s) = matrix
    return -2.0 * np.log(np.abs(r * z + s)) + np.log1p(np.abs(z) ** 2) - np.log1p(np.abs(mobius(matrix, z)) ** 2)


@dataclass
class TransferDiscretization:
    """
    Compressed transfer matrix: row v has one entry per admissible letter c, stored as the column
    index of the target cell and the log of the spherical derivative.
    """

    cells: np.ndarray
    points: np.ndarray
    targets: np.ndarray
    log_derivatives: np.ndarray
    s: float
    depth: int

    @property
    def size(self) -> int:
        return self.cells.shape[0]

    @property
    def weights(self) -> np.ndarray:
        return np.exp(self.s * self.log_derivatives)

    def at(self, s: float) -> "TransferDiscretization":
        if s < 0:
            raise ValueError(f"Transfer exponent must be non-negative, got s={s}")
        return TransferDiscretization(self.cells, self.points, self.targets, self.log_derivatives, float(s), self.depth)

    def apply(self, f: np.ndarray) -> np.ndarray:
        return np.sum(self.weights * f[self.targets], axis=1)

    def dense(self) -> np.ndarray:
        """Full (K, K) matrix; zero entries are the inadmissible (backtracking) pairs."""
        matrix = np.zeros((self.size, self.size))
        rows = np.repeat(np.arange(self.size), self.targets.shape[1])
        np.add.at(matrix, (rows, self.targets.reshape(-1)), self.weights.reshape(-1))
        return matrix

    def admissibility_mask(self) -> np.ndarray:
        return self.dense() > 0


def _cell_points(sch: SchottkyData, letters: np.ndarray, cells: np.ndarray) -> np.ndarray:
    points = sch.centers[cells[:, -1]].copy()
    for column in range(cells.shape[1] - 2, -1, -1):
        matrices = letters[cells[:, column]]
        points = (matrices[:, 0, 0] * points + matrices[:, 0, 1]) / (matrices[:, 1, 0] * points + matrices[:, 1, 1])
    return points


def _shard(
    sch: SchottkyData, letters: np.ndarray, depth: int, first: int
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    cells = word_codes(sch.rank, depth, first)
    points = _cell_points(sch, letters, cells)
    # c may precede v_1 exactly when c may follow v_1 (c != v_1^1)
    branches = next_codes(sch.rank)[cells[:, 0]].astype(np.int64)
    log_derivatives = np.empty(branches.shape)
    for code in range(2 * sch.rank):
        rows, slots = np.nonzero(branches == code)
        if rows.size:
            log_derivatives[rows, slots] = spherical_log_derivative(letters[code], points[rows])
    return cells, points, branches, log_derivatives


def build_transfer(
    sch: SchottkyData,
    s: float,
    m: int,
    threads: Optional[int] = None,
) -> TransferDiscretization:
    """
    Transfer discretization with at least m cells per disk.

    Cells are built per first letter on the worker pool and merged in letter order.
    """
    if s < 0:
        raise ValueError(f"Transfer exponent must be non-negative, got s={s}")
    depth = cylinder_depth(sch.rank, m)
    letters = sch.letter_stack()
    shards = ordered_map(lambda first: _shard(sch, letters, depth, first), range(2 * sch.rank), threads)
    cells = np.concatenate([shard[0] for shard in shards])
    points = np.concatenate([shard[1] for shard in shards])
    branches = np.concatenate([shard[2] for shard in shards])
    log_derivatives = np.concatenate([shard[3] for shard in shards])

    # target of (c, v) is the cell (c, v_1, ..., v_{N-1})
    index = {tuple(row): i for i, row in enumerate(cells.tolist())}
    targets = np.empty(branches.shape, dtype=np.int64)
    for i, row in enumerate(cells.tolist()):
        for j, c in enumerate(branches[i].tolist()):
            targets[i, j] = index[(c, *row[:-1])]
    logger.debug(f"Transfer discretization: depth {depth}, {cells.shape[0]} cells")
    return TransferDiscretization(cells, points, targets, log_derivatives, float(s), depth)


def spectral_radius(transfer: TransferDiscretization, tolerance: float = 1e-10, max_iter: int = 100_000) -> float:
    """
    Perron root by power iteration, stopped when the Collatz-Wielandt bounds
    min(Lf / f) <= rho <= max(Lf / f) agree to the relative tolerance.
    """
    f = np.ones(transfer.size)
    for iteration in range(max_iter):
        g = transfer.apply(f)
        ratio = g / f
        lower, upper = float(ratio.min()), float(ratio.max())
        if upper - lower <= tolerance * upper:
            return 0.5 * (lower + upper)
        # keep the iterate strictly positive
        f = np.maximum(g / np.max(g), 1e-300)
    raise EigenvalueError(
        f"power iteration did not converge in {max_iter} steps",
        {"size": transfer.size, "lower": lower, "upper": upper, "s": transfer.s},
    )


@dataclass
class BowenResult:
    value: float
    radius: float
    iterations: int
    depth: int
    cells: int

    def to_dict(self) -> dict:
        return {"value": self.value, "radius": self.radius, "iterations": self.iterations, "depth": self.depth, "cells": self.cells}


def bowen_dimension(
    sch: SchottkyData,
    tol: float = 1e-10,
    m: int = 243,
    threads: Optional[int] = None,
) -> BowenResult:
    """
    Solve spectral_radius(L_s) = 1 for s in [0, 2] by bisection.

    The radius is checked to decrease strictly along the bracket at every step. A radius at s = 0
    not above 1 (the cyclic group) gives dimension 0.
    """
    transfer = build_transfer(sch, 0.0, m, threads)
    low, high = 0.0, 2.0
    radius_low = spectral_radius(transfer.at(low), _POWER_TOLERANCE)
    if radius_low <= 1.0 + tol:
        logger.info(f"Spectral radius {radius_low:.6g} at s=0: dimension 0")
        return BowenResult(0.0, radius_low, 0, transfer.depth, transfer.size)
    radius_high = spectral_radius(transfer.at(high), _POWER_TOLERANCE)
    if radius_high >= 1.0:
        raise BracketError(f"Bowen bracket failure: radius {radius_low:.6g} at s=0 and {radius_high:.6g} at s=2")

    # radii are resolved to _POWER_TOLERANCE, so monotonicity is checked up to that slack
    slack = 4.0 * _POWER_TOLERANCE * radius_low
    iterations, middle, radius = 0, 0.5 * (low + high), radius_low
    max_steps = int(math.ceil(math.log2(2.0 / _MIN_WIDTH))) + 1
    while iterations < max_steps:
        iterations += 1
        middle = 0.5 * (low + high)
        radius = spectral_radius(transfer.at(middle), _POWER_TOLERANCE)
        if not radius_high - slack < radius < radius_low + slack:
            raise EstimationError(
                f"spectral radius not decreasing in s: {radius_low:.12g} at {low:.12g}, {radius:.12g} at {middle:.12g}, "
                f"{radius_high:.12g} at {high:.12g}"
            )
        if abs(radius - 1.0) <= tol or high - low <= _MIN_WIDTH:
            break
        if radius > 1.0:
            low, radius_low = middle, radius
        else:
            high, radius_high = middle, radius
    logger.info(f"Bowen dimension {middle:.12g} (radius {radius:.12g}) after {iterations} steps, {transfer.size} cells")
    return BowenResult(middle, radius, iterations, transfer.depth, transfer.size)
