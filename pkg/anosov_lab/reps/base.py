import logging
import re
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from anosov_lab.configs.base import LinalgConfig
from anosov_lab.configs.enums import Projection
from anosov_lab.matlin import CartanVector, ProjMatrix, log_spectra, renormalized_product
from anosov_lab.words import ConjClass, Word, cyclic_reduce, letter_to_code

logger = logging.getLogger(__name__)

_NAME_PATTERN = re.compile(r"^\s*(?:(?P<scale>[0-9.eE+-]+)\s*\*\s*)?(?P<kind>omega|w|a)_?(?P<index>\d+)\s*$")


@dataclass(frozen=True, eq=False)
class WeightFunctional:
    """
    Linear functional x -> sum(coeffs * x) on Cartan coordinates.

    Coefficients are canonicalized to mean zero, which leaves values on mean-zero vectors unchanged.
    """

    coeffs: np.ndarray
    name: str = "custom"

    def __post_init__(self):
        coeffs = np.array(self.coeffs, dtype=np.float64).reshape(-1)
        if coeffs.size < 2:
            raise ValueError("A weight functional needs dimension at least 2")
        coeffs = coeffs - coeffs.mean()
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def omega(cls, k: int, dim: int) -> "WeightFunctional":
        """Fundamental weight omega_k(x) = x_1 + ... + x_k."""
        if not 1 <= k <= dim - 1:
            raise ValueError(f"omega_{k} undefined in dimension {dim}")
        return cls(np.r_[np.ones(k), np.zeros(dim - k)], name=f"omega{k}")

    @classmethod
    def root(cls, k: int, dim: int) -> "WeightFunctional":
        """Simple root a_k(x) = x_k - x_{k+1}."""
        if not 1 <= k <= dim - 1:
            raise ValueError(f"a_{k} undefined in dimension {dim}")
        coeffs = np.zeros(dim)
        coeffs[k - 1], coeffs[k] = 1.0, -1.0
        return cls(coeffs, name=f"a{k}")

    @classmethod
    def parse(cls, name: str, dim: int) -> "WeightFunctional":
        """Parse "a1", "omega2", "w1" or a scaled form like "2*a1"."""
        match = _NAME_PATTERN.match(name)
        if not match:
            raise ValueError(f"Unknown weight functional: {name}")
        index = int(match.group("index"))
        base = cls.root(index, dim) if match.group("kind") == "a" else cls.omega(index, dim)
        if match.group("scale") is None:
            return base
        return base.scaled(float(match.group("scale")), name=name.replace(" ", ""))

    @property
    def dim(self) -> int:
        return self.coeffs.size

    def scaled(self, factor: float, name: Optional[str] = None) -> "WeightFunctional":
        return WeightFunctional(factor * self.coeffs, name=name or f"{factor!r}*{self.name}")

    def simple_root_index(self) -> Optional[int]:
        """Return k if this functional is exactly a_k, otherwise None."""
        for k in range(1, self.dim):
            if np.allclose(self.coeffs, WeightFunctional.root(k, self.dim).coeffs, rtol=0, atol=1e-14):
                return k
        return None

    def __call__(self, x: Union[CartanVector, np.ndarray]) -> Union[float, np.ndarray]:
        values = x.coords if isinstance(x, CartanVector) else np.asarray(x)
        if values.shape[-1] != self.dim:
            raise ValueError(f"Functional of dimension {self.dim} applied to vectors of dimension {values.shape[-1]}")
        result = values @ self.coeffs
        return float(result) if np.ndim(result) == 0 else result

    def __repr__(self) -> str:
        return f"WeightFunctional({self.name}, dim={self.dim})"


@dataclass(frozen=True, eq=False)
class RepPoint:
    """
    Representation of the free group of rank k into PGL_d(C), given by generator images.

    Inverses are cached on construction. `family` and `parameter` record where the point came from.
    """

    generators: Tuple[ProjMatrix, ...]
    family: str = "custom"
    parameter: complex = 0j
    inverses: Tuple[ProjMatrix, ...] = field(init=False, repr=False)

    def __post_init__(self):
        generators = tuple(g if isinstance(g, ProjMatrix) else ProjMatrix(g) for g in self.generators)
        if not generators:
            raise ValueError("A representation needs at least one generator")
        dims = {g.dim for g in generators}
        if len(dims) != 1:
            raise ValueError(f"Generators have inconsistent dimensions: {sorted(dims)}")
        inverses = tuple(g.inverse() for g in generators)
        identity = ProjMatrix.identity(generators[0].dim)
        for index, (g, g_inv) in enumerate(zip(generators, inverses)):
            if not (g @ g_inv).projectively_close(identity, atol=1e-10):
                raise ValueError(f"Inverse cache check failed for generator {index + 1}")
        object.__setattr__(self, "generators", generators)
        object.__setattr__(self, "inverses", inverses)
        object.__setattr__(self, "parameter", complex(self.parameter))

    @classmethod
    def from_arrays(cls, arrays: Sequence[np.ndarray], family: str = "custom", parameter: complex = 0j) -> "RepPoint":
        return cls(tuple(ProjMatrix(a) for a in arrays), family=family, parameter=parameter)

    @property
    def rank(self) -> int:
        return len(self.generators)

    @property
    def dim(self) -> int:
        return self.generators[0].dim

    def letter_stack(self) -> np.ndarray:
        """Generator images in code order a, a^-1, b, b^-1, ..., shape (2k, d, d)."""
        stack = []
        for g, g_inv in zip(self.generators, self.inverses):
            stack.extend([g.entries, g_inv.entries])
        return np.array(stack)

    def image(self, letter: int) -> ProjMatrix:
        return self.generators[letter - 1] if letter > 0 else self.inverses[-letter - 1]

    def conj(self) -> "RepPoint":
        return RepPoint(tuple(g.conj() for g in self.generators), family=self.family, parameter=self.parameter.conjugate())

    def conjugated_by(self, h: ProjMatrix) -> "RepPoint":
        h_inv = h.inverse()
        return RepPoint(tuple(h @ g @ h_inv for g in self.generators), family=self.family, parameter=self.parameter)

    def map(self, func, family: Optional[str] = None) -> "RepPoint":
        """Apply a matrix-level homomorphism (sym_power, wedge, ...) generatorwise."""
        return RepPoint(tuple(func(g) for g in self.generators), family=family or self.family, parameter=self.parameter)


def _check_rank(rep: RepPoint, word: Word) -> None:
    if word.letters and max(abs(x) for x in word.letters) > rep.rank:
        raise ValueError(f"Word {word} uses generators beyond rank {rep.rank}")


def evaluate(rep: RepPoint, word: Word, config: Optional[LinalgConfig] = None) -> ProjMatrix:
    """Image of a word, multiplied left to right with periodic renormalization."""
    _check_rank(rep, word)
    every = (config or LinalgConfig()).renormalize_every
    stack = rep.letter_stack()
    product, _ = renormalized_product((stack[letter_to_code(x)] for x in word.letters), rep.dim, every)
    return ProjMatrix(product)


def word_spectrum(
    rep: RepPoint,
    word: Word,
    projection: Projection = Projection.JORDAN,
    config: Optional[LinalgConfig] = None,
) -> CartanVector:
    """
    Jordan or Cartan projection of the image of a word, with the bottom half of the spectrum read
    off the inverse word so that long words keep full accuracy.

    The Jordan projection is evaluated on the cyclic core of the word.
    """
    _check_rank(rep, word)
    config = config or LinalgConfig()
    if projection is Projection.JORDAN:
        word, _ = cyclic_reduce(word)
    stack = rep.letter_stack()
    every = config.renormalize_every
    forward, forward_scale = renormalized_product((stack[letter_to_code(x)] for x in word.letters), rep.dim, every)
    inverse_letters = word.inverse().letters
    backward, backward_scale = renormalized_product((stack[letter_to_code(x)] for x in inverse_letters), rep.dim, every)
    coords = log_spectra(
        forward[None],
        np.array([forward_scale]),
        backward[None],
        np.array([backward_scale]),
        projection,
        config,
    )[0]
    return CartanVector(coords)


def period(rep: RepPoint, conj_class: ConjClass, functional: WeightFunctional, config: Optional[LinalgConfig] = None) -> float:
    """functional(jordan(rep(core))) for the canonical core of the class."""
    if functional.dim != rep.dim:
        raise ValueError(f"Functional dimension {functional.dim} does not match representation dimension {rep.dim}")
    return functional(word_spectrum(rep, conj_class.core, Projection.JORDAN, config))
