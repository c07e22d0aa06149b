from typing import List, Tuple

import numpy as np

from anosov_lab.configs.families.base import to_complex
from anosov_lab.configs.families.disks import DisksConfig
from anosov_lab.families.base import FamilyBase


def pairing_matrix(center: complex, radius: float, source_center: complex, source_radius: float, theta: float) -> np.ndarray:
    """g(z) = c + e^{i theta} r r' / (z - c'): maps the exterior of D(c', r') onto the interior of D(c, r)."""
    twist = np.exp(1j * theta) * radius * source_radius
    return np.array([[center, -center * source_center + twist], [1.0, -source_center]], dtype=np.complex128)


def disk_generators(centers: List[complex], radii: List[float], rotations: List[float]) -> List[np.ndarray]:
    generators = []
    for i, theta in enumerate(rotations):
        target, source = 2 * i, 2 * i + 1
        generators.append(pairing_matrix(centers[target], radii[target], centers[source], radii[source], theta))
    return generators


class DiskSchottkyFamily(FamilyBase):
    """Classical Schottky group from paired round disks (real when centers are real and every theta is pi)."""

    name = "disks"

    def __init__(self, config: DisksConfig):
        super().__init__(config)
        self.centers = [to_complex(c) for c in config.centers]
        self.radii = list(config.radii)
        self.rotations = list(config.rotations)

    def disks(self) -> Tuple[np.ndarray, np.ndarray]:
        return np.array(self.centers, dtype=np.complex128), np.array(self.radii, dtype=np.float64)

    def generators(self, z: complex) -> List[np.ndarray]:
        generators = disk_generators(self.centers, self.radii, self.rotations)
        if self.conj_symmetric:
            generators = [g.real.astype(np.complex128) for g in generators]
        return generators

    @property
    def conj_symmetric(self) -> bool:
        real_centers = all(c.imag == 0 for c in self.centers)
        real_twists = all(abs(np.sin(theta)) < 1e-15 for theta in self.rotations)
        return real_centers and real_twists
