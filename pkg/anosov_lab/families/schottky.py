from typing import List

import numpy as np

from anosov_lab.configs.families.schottky import SchottkyConfig
from anosov_lab.families.base import FamilyBase


def hyperbolic(attracting: complex, repelling: complex, length: complex) -> np.ndarray:
    """Loxodromic element with the given fixed points and complex translation length."""
    frame = np.array([[attracting, repelling], [1.0, 1.0]], dtype=np.complex128)
    diagonal = np.diag(np.exp(np.array([length / 2, -length / 2], dtype=np.complex128)))
    return frame @ diagonal @ np.linalg.inv(frame)


class RealSchottkyFamily(FamilyBase):
    """
    Two-generator Schottky group in PSL2(R) given by translation lengths and an axis ratio u.

    a has attracting point -u and repelling point -1/u, b has attracting point u and repelling
    point 1/u. The parameter z is added to the complex translation length of b, so real z stays
    Fuchsian and imaginary z twists b out of PSL2(R).
    """

    name = "schottky"

    def __init__(self, config: SchottkyConfig):
        super().__init__(config)

    def generators(self, z: complex) -> List[np.ndarray]:
        u = self.config.axis_ratio
        length_a, length_b = self.config.lengths
        a = hyperbolic(-u, -1.0 / u, length_a)
        b = hyperbolic(u, 1.0 / u, length_b + z)
        if z.imag == 0:
            a, b = a.real.astype(np.complex128), b.real.astype(np.complex128)
        return [a, b]

    @property
    def conj_symmetric(self) -> bool:
        return True
