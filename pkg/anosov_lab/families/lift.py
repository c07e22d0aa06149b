from functools import partial
from typing import List

import numpy as np

from anosov_lab.configs.families.lift import LiftConfig
from anosov_lab.families.base import FamilyBase
from anosov_lab.matlin import ProjMatrix, sym_power, wedge
from anosov_lab.reps.base import RepPoint
from anosov_lab.utils.factory import FamilyFactory


class LiftFamily(FamilyBase):
    """Nodewise symmetric or exterior power of another family."""

    name = "lift"

    def __init__(self, config: LiftConfig):
        super().__init__(config)
        self.base = FamilyFactory.from_dict(config.base)
        if config.kind == "sym":
            self.lift = partial(sym_power, d=config.degree)
        else:
            self.lift = partial(wedge, k=config.degree)

    def generators(self, z: complex) -> List[np.ndarray]:
        return [self.lift(ProjMatrix(g)).entries.copy() for g in self.base.generators(z)]

    def at(self, z: complex = 0j) -> RepPoint:
        return self.base.at(z).map(self.lift, family=self.name)

    @property
    def holomorphic(self) -> bool:
        return self.base.holomorphic

    @property
    def conj_symmetric(self) -> bool:
        return self.base.conj_symmetric
