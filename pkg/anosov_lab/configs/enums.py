from enum import Enum


class Projection(Enum):
    JORDAN = "jordan"
    CARTAN = "cartan"


class ExponentMethod(Enum):
    GROWTH = "growth"
    DIRICHLET = "dirichlet"


class Axis(Enum):
    S = "s"
    T = "t"
