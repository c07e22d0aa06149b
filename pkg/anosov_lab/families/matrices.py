from typing import List

import numpy as np

from anosov_lab.configs.families.base import to_complex_matrix
from anosov_lab.configs.families.matrices import MatricesConfig
from anosov_lab.families.base import FamilyBase


class ConstantFamily(FamilyBase):
    """The same explicit generators at every parameter value."""

    name = "matrices"

    def __init__(self, config: MatricesConfig):
        super().__init__(config)
        self._generators = [to_complex_matrix(g) for g in config.generators]

    def generators(self, z: complex) -> List[np.ndarray]:
        return [g.copy() for g in self._generators]

    @property
    def conj_symmetric(self) -> bool:
        return all(np.all(g.imag == 0) for g in self._generators)
