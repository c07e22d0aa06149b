import logging
from typing import List

import numpy as np

from anosov_lab.configs.families.base import to_complex_matrix
from anosov_lab.configs.families.bending import BendingConfig
from anosov_lab.families.base import FamilyBase
from anosov_lab.matlin import exp_traceless
from anosov_lab.utils.factory import FamilyFactory

logger = logging.getLogger(__name__)


def axis_generator(matrix: np.ndarray) -> np.ndarray:
    """Traceless X with exp(tX) translating by t along the axis of a loxodromic 2x2 matrix."""
    eigenvalues, vectors = np.linalg.eig(matrix)
    order = np.argsort(-np.abs(eigenvalues), kind="stable")
    vectors = vectors[:, order]
    x = vectors @ np.diag([0.5, -0.5]) @ np.linalg.inv(vectors)
    if np.all(matrix.imag == 0) and np.all(np.abs(eigenvalues.imag) < 1e-14):
        x = x.real.astype(np.complex128)
    return x


class BendingFamily(FamilyBase):
    """
    Complex bending: the chosen generator B of a PSL2 base becomes exp(zX) B exp(-zX).

    Real z slides B along the axis of X inside the base group's real form; imaginary z rotates it
    around that axis. The z = 0 node is the base representation.
    """

    name = "bending"

    def __init__(self, config: BendingConfig):
        super().__init__(config)
        self.base = FamilyFactory.from_dict(config.base)
        self.base_generators = self.base.generators(0j)
        if self.base_generators[0].shape != (2, 2):
            raise ValueError("Bending needs a PSL2 base family")
        if config.generator > len(self.base_generators) or config.axis_generator > len(self.base_generators):
            raise ValueError(f"Base family has only {len(self.base_generators)} generators")

        if config.axis is not None:
            self.axis = to_complex_matrix(config.axis)
            if abs(np.trace(self.axis)) > 1e-12:
                raise ValueError("The bending axis X must be traceless")
        else:
            self.axis = axis_generator(self.base_generators[config.axis_generator - 1])
        if self.is_global_conjugation():
            logger.warning(
                f"X commutes with every generator except {config.generator}: the bending is a global conjugation"
            )
        logger.debug(f"Bending generator {config.generator} along X = {self.axis.tolist()}")

    def generators(self, z: complex) -> List[np.ndarray]:
        generators = [g.copy() for g in self.base_generators]
        if z == 0:
            return generators
        index = self.config.generator - 1
        forward = exp_traceless(self.axis, z)
        backward = exp_traceless(self.axis, -z)
        generators[index] = forward @ generators[index] @ backward
        return generators

    def is_global_conjugation(self) -> bool:
        """True when X commutes with all the unbent generators, so every period is constant in z."""
        others = [g for i, g in enumerate(self.base_generators) if i != self.config.generator - 1]
        return all(np.allclose(self.axis @ g, g @ self.axis, atol=1e-12) for g in others)

    @property
    def conj_symmetric(self) -> bool:
        return self.base.conj_symmetric and bool(np.all(self.axis.imag == 0))
