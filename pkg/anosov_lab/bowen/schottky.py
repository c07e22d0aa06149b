"""
Classical Schottky data: 2k round disks in the plane and k Möbius maps pairing them.

Disks follow the letter code order D_a, D_A, D_b, D_B, ... The map for letter code c sends the
exterior of D_{c^1} onto the interior of D_c, so g_i maps the exterior of D_{2i+1} into D_{2i} and
its inverse maps the exterior of D_{2i} into D_{2i+1}.
"""

import logging
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from anosov_lab.exceptions import ConfigurationError
from anosov_lab.families.disks import disk_generators
from anosov_lab.matlin import ProjMatrix
from anosov_lab.reps.base import RepPoint

logger = logging.getLogger(__name__)

_BOUNDARY_SAMPLES = 16


def mobius(matrix: np.ndarray, z: np.ndarray) -> np.ndarray:
    (p, q), (r, s) = matrix
    return (p * z + q) / (r * z + s)


def _circumcircle(points: np.ndarray) -> Tuple[complex, float]:
    a, b, c = points
    d = 2.0 * (a.real * (b.imag - c.imag) + b.real * (c.imag - a.imag) + c.real * (a.imag - b.imag))
    if abs(d) < 1e-300:
        raise ConfigurationError("image of a disk boundary is a line: the Möbius map sends it through infinity")
    ux = (abs(a) ** 2 * (b.imag - c.imag) + abs(b) ** 2 * (c.imag - a.imag) + abs(c) ** 2 * (a.imag - b.imag)) / d
    uy = (abs(a) ** 2 * (c.real - b.real) + abs(b) ** 2 * (a.real - c.real) + abs(c) ** 2 * (b.real - a.real)) / d
    center = complex(ux, uy)
    return center, float(abs(a - center))


@dataclass(frozen=True, eq=False)
class SchottkyData:
    centers: np.ndarray
    radii: np.ndarray
    generators: Tuple[ProjMatrix, ...]
    margin: float = 0.0

    def __post_init__(self):
        centers = np.asarray(self.centers, dtype=np.complex128).reshape(-1)
        radii = np.asarray(self.radii, dtype=np.float64).reshape(-1)
        generators = tuple(g if isinstance(g, ProjMatrix) else ProjMatrix(g) for g in self.generators)
        if centers.size != 2 * len(generators) or radii.size != centers.size:
            raise ConfigurationError(
                f"Schottky data needs 2 disks per generator: {len(generators)} generators, {centers.size} disks"
            )
        if any(g.dim != 2 for g in generators):
            raise ConfigurationError("Schottky data lives in PSL2(C): generators must be 2x2")
        if np.any(radii <= 0):
            raise ConfigurationError("Disk radii must be positive")
        object.__setattr__(self, "centers", centers)
        object.__setattr__(self, "radii", radii)
        object.__setattr__(self, "generators", generators)
        object.__setattr__(self, "margin", self._disjointness_margin())
        self._check_pairing()

    @classmethod
    def from_disks(cls, centers: Sequence[complex], radii: Sequence[float], rotations: Sequence[float] = None) -> "SchottkyData":
        centers = [complex(c) for c in centers]
        rotations = list(rotations) if rotations is not None else [np.pi] * (len(centers) // 2)
        return cls(np.array(centers), np.array(radii, dtype=np.float64), tuple(disk_generators(centers, list(radii), rotations)))

    @classmethod
    def from_rep(cls, rep: RepPoint) -> "SchottkyData":
        """
        Schottky data from the isometric circles of a PSL2(C) representation.

        For g = [[p, q], [r, s]] with det 1, g maps the exterior of |rz + s| = 1 onto the interior of
        |-rz + p| = 1. Fails when the circles overlap or some generator fixes infinity.
        """
        if rep.dim != 2:
            raise ConfigurationError(f"Isometric circles need a PSL2 representation, got d = {rep.dim}")
        centers, radii = [], []
        for index, g in enumerate(rep.generators):
            entries = g.entries / np.sqrt(np.linalg.det(g.entries))
            (p, _), (r, s) = entries
            if abs(r) < 1e-14:
                raise ConfigurationError(f"Generator {index + 1} fixes infinity: no isometric circle")
            centers.extend([p / r, -s / r])
            radii.extend([1.0 / abs(r), 1.0 / abs(r)])
        return cls(np.array(centers), np.array(radii), rep.generators)

    @property
    def rank(self) -> int:
        return len(self.generators)

    def letter_stack(self) -> np.ndarray:
        """Determinant-one generator matrices in code order, shape (2k, 2, 2)."""
        stack = []
        for g in self.generators:
            entries = g.entries / np.sqrt(np.linalg.det(g.entries))
            stack.extend([entries, np.array([[entries[1, 1], -entries[0, 1]], [-entries[1, 0], entries[0, 0]]])])
        return np.array(stack)

    def rep(self) -> RepPoint:
        return RepPoint(self.generators, family="schottky_data")

    def _disjointness_margin(self) -> float:
        gaps = np.abs(self.centers[:, None] - self.centers[None, :]) - (self.radii[:, None] + self.radii[None, :])
        np.fill_diagonal(gaps, np.inf)
        margin = float(gaps.min()) if self.centers.size > 1 else np.inf
        if margin <= 0:
            i, j = np.unravel_index(np.argmin(gaps), gaps.shape)
            raise ConfigurationError(f"overlapping disks {i} and {j} (margin {margin:.3e})")
        return margin

    def _check_pairing(self) -> None:
        angles = 2.0 * np.pi * np.arange(_BOUNDARY_SAMPLES) / _BOUNDARY_SAMPLES
        letters = self.letter_stack()
        for code in range(2 * self.rank):
            source = code ^ 1
            boundary = self.centers[source] + self.radii[source] * np.exp(1j * angles)
            outside = self.centers[source] + 2.0 * self.radii[source] * np.exp(1j * angles)
            on_target = np.abs(mobius(letters[code], boundary) - self.centers[code])
            inside_target = np.abs(mobius(letters[code], outside) - self.centers[code])
            if not np.allclose(on_target, self.radii[code], rtol=1e-8, atol=0):
                raise ConfigurationError(f"pairing map {code} does not send boundary of disk {source} onto disk {code}")
            if np.any(inside_target >= self.radii[code]):
                raise ConfigurationError(f"pairing map {code} does not send the exterior of disk {source} into disk {code}")

    def conjugate(self, h: np.ndarray) -> "SchottkyData":
        """
        Conjugate by the Möbius map h: generators become h g h^-1 and disks their images under h.

        The pole of h must lie outside every disk so that disk interiors map to disk interiors.
        """
        h = np.asarray(h, dtype=np.complex128)
        (_, _), (r, s) = h
        angles = np.array([0.0, 2.0 * np.pi / 3.0, 4.0 * np.pi / 3.0])
        centers, radii = [], []
        for center, radius in zip(self.centers, self.radii):
            if abs(r) > 0 and abs(-s / r - center) <= radius:
                raise ConfigurationError("conjugating map has its pole inside a Schottky disk")
            image_center, image_radius = _circumcircle(mobius(h, center + radius * np.exp(1j * angles)))
            centers.append(image_center)
            radii.append(image_radius)
        h_matrix = ProjMatrix(h)
        h_inverse = h_matrix.inverse()
        generators = tuple(h_matrix @ g @ h_inverse for g in self.generators)
        return SchottkyData(np.array(centers), np.array(radii), generators)
