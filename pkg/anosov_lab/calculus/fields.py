"""
Scalar fields over parameter grids and their finite-difference derivatives at the grid center.

Field values are indexed by node offsets (i_s, i_t); derivatives are taken in the real
coordinates s = Re z, t = Im z with the grid spacings ds, dt.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from anosov_lab.configs.base import LabConfig, resolve
from anosov_lab.configs.enums import Axis
from anosov_lab.exceptions import EstimationError
from anosov_lab.reps.base import WeightFunctional
from anosov_lab.reps.grid import GridGeometry, Node, ParamGrid
from anosov_lab.spectrum.exponents import entropy_growth
from anosov_lab.spectrum.table import ClassSpectrum, FunctionalSpec, spectrum_table
from anosov_lab.spectrum.thermo import intersection, renormalized_intersection
from anosov_lab.utils.parallel import ordered_map
from anosov_lab.words import ConjClass

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ScalarField:
    """Real values on the nodes of a grid geometry; values[i_t + nt // 2, i_s + ns // 2]."""

    geometry: GridGeometry
    values: np.ndarray
    provenance: str = "custom"

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        if values.shape != (self.geometry.nt, self.geometry.ns):
            raise ValueError(f"Field shape {values.shape} does not match grid {self.geometry.nt}x{self.geometry.ns}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_function(cls, geometry: GridGeometry, func: Callable[[float, float], float], provenance: str = "custom") -> "ScalarField":
        """Sample func(s, t) at the node offsets s = i_s ds, t = i_t dt."""
        values = np.empty((geometry.nt, geometry.ns))
        for i_s, i_t in geometry.nodes():
            values[i_t + geometry.half_t, i_s + geometry.half_s] = func(i_s * geometry.ds, i_t * geometry.dt)
        return cls(geometry, values, provenance)

    @classmethod
    def from_nodes(cls, geometry: GridGeometry, values: Dict[Node, float], provenance: str = "custom") -> "ScalarField":
        array = np.empty((geometry.nt, geometry.ns))
        for (i_s, i_t), value in values.items():
            array[i_t + geometry.half_t, i_s + geometry.half_s] = value
        return cls(geometry, array, provenance)

    def at(self, node: Node) -> float:
        if not self.geometry.contains(node):
            raise KeyError(f"Node {node} outside the grid")
        return float(self.values[node[1] + self.geometry.half_t, node[0] + self.geometry.half_s])

    @property
    def center(self) -> float:
        return self.at((0, 0))

    def _require(self, nodes: Sequence[Node]) -> None:
        for node in nodes:
            if not self.geometry.contains(node):
                raise EstimationError(f"grid too small: stencil node {node} missing from a {self.geometry.ns}x{self.geometry.nt} grid")
            if not np.isfinite(self.at(node)):
                raise EstimationError(f"non-finite {self.provenance} value at stencil node {node}")


def _richardson(fine: float, coarse: Optional[float]) -> float:
    return fine if coarse is None else (4.0 * fine - coarse) / 3.0


def _second_along(f: ScalarField, axis: Axis, step: int) -> float:
    unit = (step, 0) if axis is Axis.S else (0, step)
    spacing = (f.geometry.ds if axis is Axis.S else f.geometry.dt) * step
    plus, minus = unit, (-unit[0], -unit[1])
    f._require([plus, minus])
    return (f.at(plus) - 2.0 * f.center + f.at(minus)) / spacing**2


def _first_along(f: ScalarField, axis: Axis, step: int) -> float:
    unit = (step, 0) if axis is Axis.S else (0, step)
    spacing = (f.geometry.ds if axis is Axis.S else f.geometry.dt) * step
    f._require([unit, (-unit[0], -unit[1])])
    return (f.at(unit) - f.at((-unit[0], -unit[1]))) / (2.0 * spacing)


def _mixed(f: ScalarField, step: int) -> float:
    nodes = [(step, step), (step, -step), (-step, step), (-step, -step)]
    f._require(nodes)
    a, b, c, d = (f.at(n) for n in nodes)
    return (a - b - c + d) / (4.0 * step**2 * f.geometry.ds * f.geometry.dt)


def _uses_richardson(f: ScalarField) -> bool:
    return f.geometry.ns >= 5 and f.geometry.nt >= 5


@dataclass
class Hessian:
    ss: float
    st: float
    tt: float
    richardson: bool = False

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.ss, self.st], [self.st, self.tt]])

    @property
    def laplacian(self) -> float:
        return self.ss + self.tt

    def to_dict(self) -> dict:
        return {"ss": self.ss, "st": self.st, "tt": self.tt, "richardson": self.richardson}


def hessian_grid(f: ScalarField) -> Hessian:
    """
    Central second differences at the center; on grids of at least 5x5 the inner and outer rings
    are combined by Richardson extrapolation (4 D(h) - D(2h)) / 3.
    """
    if f.geometry.ns < 3 or f.geometry.nt < 3:
        raise EstimationError(f"grid too small for a Hessian: {f.geometry.ns}x{f.geometry.nt}, need at least 3x3")
    richardson = _uses_richardson(f)
    ss = _richardson(_second_along(f, Axis.S, 1), _second_along(f, Axis.S, 2) if richardson else None)
    tt = _richardson(_second_along(f, Axis.T, 1), _second_along(f, Axis.T, 2) if richardson else None)
    st = _richardson(_mixed(f, 1), _mixed(f, 2) if richardson else None)
    return Hessian(ss=ss, st=st, tt=tt, richardson=richardson)


def gradient(f: ScalarField) -> np.ndarray:
    """(f_s, f_t) at the center by central differences, Richardson-combined on grids of at least 5x5."""
    richardson = _uses_richardson(f)
    fs = _richardson(_first_along(f, Axis.S, 1), _first_along(f, Axis.S, 2) if richardson else None)
    ft = _richardson(_first_along(f, Axis.T, 1), _first_along(f, Axis.T, 2) if richardson else None)
    return np.array([fs, ft])


def second_difference(f: ScalarField, axis: Axis) -> float:
    """Plain 3-point second difference along one axis."""
    return _second_along(f, axis, 1)


@dataclass
class HessianSignature:
    eigenvalues: List[float]
    positive: int
    zero: int
    negative: int

    def to_dict(self) -> dict:
        return {"eigenvalues": self.eigenvalues, "signature": [self.positive, self.zero, self.negative]}


def hessian_signature(f: ScalarField, floor: float = 1e-6) -> HessianSignature:
    """
    Eigenvalues of the 2x2 parameter Hessian and its (+, 0, -) counts.

    An eigenvalue counts as zero when it is below floor * max(1, largest |eigenvalue|).
    """
    eigenvalues = np.linalg.eigvalsh(hessian_grid(f).matrix)
    threshold = floor * max(1.0, float(np.max(np.abs(eigenvalues))))
    positive = int(np.count_nonzero(eigenvalues > threshold))
    negative = int(np.count_nonzero(eigenvalues < -threshold))
    return HessianSignature(
        eigenvalues=[float(e) for e in eigenvalues],
        positive=positive,
        zero=2 - positive - negative,
        negative=negative,
    )


class GridSpectrum:
    """
    One period table over every node of a grid.

    On conjugation-symmetric grids a node and its mirror share a column, so every field built from
    periods takes identical values at (i_s, i_t) and (i_s, -i_t).
    """

    def __init__(
        self,
        grid: ParamGrid,
        functionals: Sequence[FunctionalSpec],
        max_len: int,
        config: Optional[LabConfig] = None,
        threads: Optional[int] = None,
    ):
        self.grid = grid
        self.config = resolve(config)
        self.threads = threads
        self.columns: Dict[Node, int] = {}
        computed: List[Node] = []
        for node in grid.geometry.nodes():
            if grid.conj_symmetric and node[1] < 0:
                continue
            self.columns[node] = len(computed)
            computed.append(node)
        if grid.conj_symmetric:
            for node in grid.geometry.nodes():
                if node[1] < 0:
                    self.columns[node] = self.columns[grid.mirror(node)]
        # the center goes first so that it is the table's base column
        center = self.columns[(0, 0)]
        order = [center] + [i for i in range(len(computed)) if i != center]
        remap = {old: new for new, old in enumerate(order)}
        self.columns = {node: remap[column] for node, column in self.columns.items()}
        computed = [computed[i] for i in order]
        self.spectrum: ClassSpectrum = spectrum_table(
            [grid.nodes[node] for node in computed],
            functionals,
            max_len,
            self.config,
            threads,
            rep_names=[f"({node[0]},{node[1]})" for node in computed],
        )
        logger.info(f"Grid spectrum: {len(computed)} distinct nodes of {len(self.columns)}, {len(self.spectrum)} classes")

    @property
    def geometry(self) -> GridGeometry:
        return self.grid.geometry

    def _map_nodes(self, func: Callable[[Node], float], provenance: str) -> ScalarField:
        distinct = sorted(set(self.columns.values()))
        representative = {}
        for node, column in self.columns.items():
            representative.setdefault(column, node)
        values = ordered_map(lambda column: func(representative[column]), distinct, self.threads or self.config.threads)
        by_column = dict(zip(distinct, values))
        return ScalarField.from_nodes(self.geometry, {node: by_column[c] for node, c in self.columns.items()}, provenance)

    def entropy_field(self, functional: FunctionalSpec = 0) -> ScalarField:
        functional = self.functional_index(functional)
        return self._map_nodes(
            lambda node: entropy_growth(self.spectrum, self.columns[node], functional, self.config).value,
            f"h[{self.functional_name(functional)}]",
        )

    def intersection_field(self, functional: FunctionalSpec = 0) -> ScalarField:
        """I(rho_center, rho_node)."""
        functional = self.functional_index(functional)
        base = self.columns[(0, 0)]
        return self._map_nodes(
            lambda node: intersection(
                self.spectrum, base, self.columns[node], functional, self.config, with_gibbs=False
            ).value,
            f"I[{self.functional_name(functional)}]",
        )

    def renormalized_field(self, functional: FunctionalSpec = 0) -> ScalarField:
        """J(rho_center, rho_node)."""
        functional = self.functional_index(functional)
        base = self.columns[(0, 0)]
        return self._map_nodes(
            lambda node: renormalized_intersection(self.spectrum, base, self.columns[node], functional, self.config).value,
            f"J[{self.functional_name(functional)}]",
        )

    def period_field(self, conj_class: ConjClass, functional: FunctionalSpec = 0) -> ScalarField:
        functional = self.functional_index(functional)
        row = self.spectrum.find(conj_class)
        return self._map_nodes(
            lambda node: float(self.spectrum.column(self.columns[node], functional)[row]),
            f"period[{conj_class}, {self.functional_name(functional)}]",
        )

    def functional_index(self, functional) -> int:
        if isinstance(functional, WeightFunctional):
            functional = functional.name
        if isinstance(functional, str):
            return self.spectrum.functional_names.index(functional)
        return int(functional)

    def functional_name(self, index: int) -> str:
        return self.spectrum.functional_names[index]
