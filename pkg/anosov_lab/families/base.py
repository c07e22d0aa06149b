from abc import ABC, abstractmethod
from typing import List

import numpy as np

from anosov_lab.matlin import ProjMatrix
from anosov_lab.reps.base import RepPoint


class FamilyBase(ABC):
    """
    A family z -> rho_z of representations over a complex parameter.

    Subclasses return raw generator matrices; `at` normalizes them into a RepPoint.
    """

    name = "custom"

    def __init__(self, config):
        self.config = config

    @abstractmethod
    def generators(self, z: complex) -> List[np.ndarray]:
        """
        Generator images at the parameter z.

        Args:
            z (complex): Family parameter.

        Returns:
            list: One d x d complex array per generator.
        """
        pass

    @property
    @abstractmethod
    def conj_symmetric(self) -> bool:
        """True when rho at conj(z) is the entrywise conjugate of rho at z."""
        pass

    @property
    def holomorphic(self) -> bool:
        return True

    @property
    def rank(self) -> int:
        return len(self.generators(0j))

    @property
    def dim(self) -> int:
        return self.generators(0j)[0].shape[0]

    def at(self, z: complex = 0j) -> RepPoint:
        return RepPoint(tuple(ProjMatrix(g) for g in self.generators(complex(z))), family=self.name, parameter=z)
