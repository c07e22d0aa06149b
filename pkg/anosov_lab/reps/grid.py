import json
import logging
from dataclasses import dataclass
from types import MappingProxyType
from typing import Dict, Iterator, Mapping, Tuple

import numpy as np

from anosov_lab.exceptions import AnosovLabError, GridFormatError
from anosov_lab.matlin import ProjMatrix
from anosov_lab.reps.base import RepPoint

logger = logging.getLogger(__name__)

Node = Tuple[int, int]


@dataclass(frozen=True)
class GridGeometry:
    """
    Rectangle of complex parameters z = (s0 + i_s ds) + i (t0 + i_t dt).

    ns and nt are odd node counts; node offsets i_s, i_t run over -(n // 2) .. n // 2.
    """

    s0: float
    t0: float
    ds: float
    dt: float
    ns: int
    nt: int

    def __post_init__(self):
        if self.ns < 1 or self.nt < 1 or self.ns % 2 == 0 or self.nt % 2 == 0:
            raise ValueError(f"Grid node counts must be odd and positive, got ns={self.ns}, nt={self.nt}")
        if self.ds <= 0 or self.dt <= 0:
            raise ValueError("Grid spacings must be positive")

    @property
    def half_s(self) -> int:
        return self.ns // 2

    @property
    def half_t(self) -> int:
        return self.nt // 2

    def nodes(self) -> Iterator[Node]:
        """Row-major order: i_t outer, i_s inner."""
        for it in range(-self.half_t, self.half_t + 1):
            for i_s in range(-self.half_s, self.half_s + 1):
                yield (i_s, it)

    def contains(self, node: Node) -> bool:
        return abs(node[0]) <= self.half_s and abs(node[1]) <= self.half_t

    def z(self, node: Node) -> complex:
        return complex(self.s0 + node[0] * self.ds, self.t0 + node[1] * self.dt)

    def to_dict(self) -> dict:
        return {"s0": self.s0, "t0": self.t0, "ds": self.ds, "dt": self.dt, "ns": self.ns, "nt": self.nt}


@dataclass(frozen=True, eq=False)
class ParamGrid:
    """Representations at the nodes of a complex parameter rectangle, with holomorphy and conjugation flags."""

    geometry: GridGeometry
    nodes: Mapping[Node, RepPoint]
    holomorphic: bool = True
    conj_symmetric: bool = False
    family: str = "custom"

    def __post_init__(self):
        expected = set(self.geometry.nodes())
        if set(self.nodes) != expected:
            missing = sorted(expected - set(self.nodes))
            raise ValueError(f"Grid nodes do not match geometry; missing {missing[:3]}")
        reps = list(self.nodes.values())
        if len({(r.rank, r.dim) for r in reps}) != 1:
            raise ValueError("All grid nodes must share rank and dimension")
        object.__setattr__(self, "nodes", MappingProxyType(dict(self.nodes)))
        if self.conj_symmetric:
            self.verify_conj_symmetry()

    @property
    def center(self) -> RepPoint:
        return self.nodes[(0, 0)]

    @property
    def rank(self) -> int:
        return self.center.rank

    @property
    def dim(self) -> int:
        return self.center.dim

    def mirror(self, node: Node) -> Node:
        return (node[0], -node[1])

    def verify_conj_symmetry(self, atol: float = 1e-12) -> None:
        """rho at the mirrored node must be the entrywise conjugate of rho at the node."""
        if self.geometry.t0 != 0.0:
            raise ValueError("A conjugation-symmetric grid must be centered on the real axis")
        for node, rep in self.nodes.items():
            if node[1] <= 0:
                continue
            mirrored = self.nodes[self.mirror(node)]
            for g, h in zip(rep.generators, mirrored.generators):
                if not np.allclose(np.conj(g.entries), h.entries, rtol=0, atol=atol):
                    raise ValueError(f"conj_symmetric flag violated at node {node}")


def grid_builder(family, center: complex, ds: float, dt: float, n: int) -> ParamGrid:
    """
    Evaluate a family on the (2n+1) x (2n+1) mesh around `center`.

    For conjugation-symmetric families centered on the real axis only the nodes with i_t >= 0 are
    evaluated; the others are exact entrywise conjugates.
    """
    center = complex(center)
    geometry = GridGeometry(center.real, center.imag, ds, dt, 2 * n + 1, 2 * n + 1)
    symmetric = bool(family.conj_symmetric and center.imag == 0.0)
    nodes: Dict[Node, RepPoint] = {}
    for node in geometry.nodes():
        if symmetric and node[1] < 0:
            continue
        nodes[node] = family.at(geometry.z(node))
    if symmetric:
        for node in list(nodes):
            if node[1] > 0:
                nodes[(node[0], -node[1])] = nodes[node].conj()
        if n > 0:
            sample = (n, -n)
            fresh = family.at(geometry.z(sample))
            for g, h in zip(fresh.generators, nodes[sample].generators):
                if not np.allclose(g.entries, h.entries, rtol=0, atol=1e-12):
                    raise ValueError(f"Family {family.name} is not conjugation-symmetric at node {sample}")
    logger.info(f"Built {geometry.ns}x{geometry.nt} grid of family {family.name} around {center}")
    return ParamGrid(
        geometry=geometry,
        nodes=nodes,
        holomorphic=family.holomorphic,
        conj_symmetric=symmetric,
        family=family.name,
    )


def save_grid(grid: ParamGrid, path: str) -> None:
    payload = {
        "rank": grid.rank,
        "dim": grid.dim,
        "grid": grid.geometry.to_dict(),
        "flags": {"holomorphic": grid.holomorphic, "conj_symmetric": grid.conj_symmetric},
        "nodes": [
            {
                "is": node[0],
                "it": node[1],
                "generators": [
                    [[[float(x.real), float(x.imag)] for x in row] for row in g.entries] for g in grid.nodes[node].generators
                ],
            }
            for node in grid.geometry.nodes()
        ],
    }
    with open(path, "w") as f:
        json.dump(payload, f, indent=1)


def _parse_matrix(raw, dim: int, node: Node, index: int) -> ProjMatrix:
    label = f"node (is={node[0]}, it={node[1]}) generator {index + 1}"
    try:
        array = np.array(raw, dtype=np.float64)
    except (TypeError, ValueError) as e:
        raise GridFormatError(f"Malformed matrix at {label}: {e}")
    if array.shape != (dim, dim, 2):
        raise GridFormatError(f"Wrong matrix shape {array.shape[:2]} at {label}, expected {dim}x{dim}")
    try:
        return ProjMatrix.from_normalized(array[..., 0] + 1j * array[..., 1])
    except AnosovLabError as e:
        raise GridFormatError(f"Non-invertible matrix at {label}: {e}")


def load_grid(path: str) -> ParamGrid:
    """Parse and validate a grid file (see save_grid for the format)."""
    try:
        with open(path, "r") as f:
            payload = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        logger.error(f"Failed to read grid file {path}: {e}")
        raise GridFormatError(f"Malformed grid file {path}: {e}")

    try:
        rank, dim = int(payload["rank"]), int(payload["dim"])
        raw_geometry = payload["grid"]
        geometry = GridGeometry(
            float(raw_geometry["s0"]),
            float(raw_geometry["t0"]),
            float(raw_geometry["ds"]),
            float(raw_geometry["dt"]),
            int(raw_geometry["ns"]),
            int(raw_geometry["nt"]),
        )
        flags = payload.get("flags", {})
        raw_nodes = payload["nodes"]
    except (KeyError, TypeError, ValueError) as e:
        raise GridFormatError(f"Malformed grid header in {path}: {e}")

    if len(raw_nodes) != geometry.ns * geometry.nt:
        raise GridFormatError(f"Expected {geometry.ns * geometry.nt} nodes, found {len(raw_nodes)}")

    nodes: Dict[Node, RepPoint] = {}
    for position, raw in enumerate(raw_nodes):
        try:
            node = (int(raw["is"]), int(raw["it"]))
            generators = raw["generators"]
        except (KeyError, TypeError, ValueError) as e:
            raise GridFormatError(f"Malformed node entry #{position}: {e}")
        if not geometry.contains(node):
            raise GridFormatError(f"Node (is={node[0]}, it={node[1]}) lies outside the grid")
        if node in nodes:
            raise GridFormatError(f"Duplicate node (is={node[0]}, it={node[1]})")
        if len(generators) != rank:
            raise GridFormatError(f"Node (is={node[0]}, it={node[1]}) has {len(generators)} generators, expected {rank}")
        matrices = tuple(_parse_matrix(g, dim, node, i) for i, g in enumerate(generators))
        nodes[node] = RepPoint(matrices, family="grid", parameter=geometry.z(node))

    try:
        return ParamGrid(
            geometry=geometry,
            nodes=nodes,
            holomorphic=bool(flags.get("holomorphic", False)),
            conj_symmetric=bool(flags.get("conj_symmetric", False)),
            family="grid",
        )
    except ValueError as e:
        raise GridFormatError(f"Invalid grid {path}: {e}")
