"""
Small dense complex linear algebra for elements of PGL_d(C).

Singular values and eigenvalues come from LAPACK through numpy.linalg. Everything that feeds
period tables goes through the batched helpers at the bottom of this module, which take stacks
of renormalized word products together with their accumulated log-scales.
"""

import logging
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Optional, Tuple

import numpy as np

from anosov_lab.configs.base import LinalgConfig
from anosov_lab.configs.enums import Projection
from anosov_lab.exceptions import DegenerateMatrixError, EigenvalueError

logger = logging.getLogger(__name__)

DEFAULT_LINALG = LinalgConfig()


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class ProjMatrix:
    """
    Determinant-normalized invertible d x d complex matrix.

    Entries are rescaled by |det|^(-1/d) on construction; the phase of det is kept.
    """

    entries: np.ndarray

    def __post_init__(self):
        entries = np.array(self.entries, dtype=np.complex128)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise ValueError(f"Expected a square matrix, got shape {entries.shape}")
        if entries.shape[0] < 2:
            raise ValueError(f"Matrix dimension must be at least 2, got {entries.shape[0]}")
        if not np.all(np.isfinite(entries)):
            raise DegenerateMatrixError("degenerate matrix: non-finite entries")

        _, logabsdet = np.linalg.slogdet(entries)
        if not np.isfinite(logabsdet):
            raise DegenerateMatrixError("degenerate matrix: zero determinant")
        scale = np.exp(-logabsdet / entries.shape[0])
        if scale != 1.0:
            entries = entries * scale
        object.__setattr__(self, "entries", _frozen(entries))

    @classmethod
    def identity(cls, dim: int) -> "ProjMatrix":
        return cls(np.eye(dim, dtype=np.complex128))

    @classmethod
    def from_normalized(cls, entries: np.ndarray, atol: float = 1e-12) -> "ProjMatrix":
        """
        Wrap entries that already satisfy |det| = 1 without rescaling them.

        Entries whose log|det| is farther than atol from 0 go through the normal constructor.
        """
        entries = np.array(entries, dtype=np.complex128)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1] or entries.shape[0] < 2 or not np.all(np.isfinite(entries)):
            return cls(entries)
        _, logabsdet = np.linalg.slogdet(entries)
        if not abs(logabsdet) <= atol:
            return cls(entries)
        matrix = object.__new__(cls)
        object.__setattr__(matrix, "entries", _frozen(entries))
        return matrix

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __matmul__(self, other: "ProjMatrix") -> "ProjMatrix":
        if not isinstance(other, ProjMatrix):
            return NotImplemented
        return ProjMatrix(self.entries @ other.entries)

    def __repr__(self) -> str:
        return f"ProjMatrix(dim={self.dim})"

    def inverse(self) -> "ProjMatrix":
        try:
            return ProjMatrix(np.linalg.inv(self.entries))
        except np.linalg.LinAlgError as e:
            raise DegenerateMatrixError(f"degenerate matrix: {e}")

    def conj(self) -> "ProjMatrix":
        # |det| is unchanged, so the conjugate entries are already normalized
        return ProjMatrix.from_normalized(np.conj(self.entries), atol=np.inf)

    def power(self, n: int) -> "ProjMatrix":
        base = self if n >= 0 else self.inverse()
        return ProjMatrix(np.linalg.matrix_power(base.entries, abs(n)))

    def condition_number(self) -> float:
        values = np.linalg.svd(self.entries, compute_uv=False)
        return float(values[0] / values[-1]) if values[-1] > 0 else float("inf")

    def projectively_close(self, other: "ProjMatrix", atol: float = 1e-9) -> bool:
        """True when self = c * other for a unit scalar c, up to atol relative to the entry norm."""
        if self.dim != other.dim:
            return False
        a, b = self.entries, other.entries
        phase = np.vdot(b, a) / np.vdot(b, b)
        phase /= abs(phase) if phase != 0 else 1.0
        return bool(np.linalg.norm(a - phase * b) <= atol * max(1.0, np.linalg.norm(a)))


@dataclass(frozen=True, eq=False)
class CartanVector:
    """Non-increasing, mean-zero real d-vector (a Cartan or Jordan projection)."""

    coords: np.ndarray

    def __post_init__(self):
        coords = np.array(self.coords, dtype=np.float64).reshape(-1)
        scale = max(1.0, float(np.max(np.abs(coords)))) if coords.size else 1.0
        if np.any(np.diff(coords) > 1e-12 * scale):
            raise ValueError(f"Cartan coordinates must be non-increasing: {coords}")
        if abs(coords.sum()) > 1e-12 * coords.size * scale:
            raise ValueError(f"Cartan coordinates must sum to 0, got sum {coords.sum():.3e}")
        object.__setattr__(self, "coords", _frozen(coords))

    @property
    def dim(self) -> int:
        return self.coords.size

    def __len__(self) -> int:
        return self.coords.size

    def __getitem__(self, index):
        return self.coords[index]

    def __repr__(self) -> str:
        return f"CartanVector({np.array2string(self.coords, precision=6)})"

    def opposite(self) -> "CartanVector":
        """The opposition involution x -> -reverse(x); cartan(g^-1) = cartan(g).opposite()."""
        return CartanVector(-self.coords[::-1])

    def scaled(self, factor: float) -> "CartanVector":
        if factor < 0:
            raise ValueError("Only non-negative multiples stay in the positive chamber")
        return CartanVector(factor * self.coords)

    def norm(self) -> float:
        return float(np.linalg.norm(self.coords))

    def allclose(self, other: "CartanVector", atol: float = 1e-10) -> bool:
        return self.dim == other.dim and bool(np.allclose(self.coords, other.coords, rtol=0, atol=atol))


def _check_condition(values: np.ndarray, threshold: float) -> None:
    if values[-1] <= 0 or values[0] / values[-1] > threshold:
        condition = values[0] / values[-1] if values[-1] > 0 else float("inf")
        raise DegenerateMatrixError(f"degenerate matrix: condition number {condition:.3e} exceeds {threshold:.1e}")


def _singular_values(entries: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.svd(entries, compute_uv=False)
    except np.linalg.LinAlgError as e:
        raise EigenvalueError(f"singular value iteration did not converge: {e}", {"dim": entries.shape[-1]})


def cartan(g: ProjMatrix, config: Optional[LinalgConfig] = None) -> CartanVector:
    """Sorted, mean-subtracted logarithms of the singular values of g."""
    config = config or DEFAULT_LINALG
    values = _singular_values(g.entries)
    _check_condition(values, config.condition_threshold)
    logs = np.log(values)
    return CartanVector(logs - logs.mean())


def jordan(g: ProjMatrix, config: Optional[LinalgConfig] = None) -> CartanVector:
    """Sorted, mean-subtracted logarithms of the eigenvalue moduli of g."""
    config = config or DEFAULT_LINALG
    _check_condition(_singular_values(g.entries), config.condition_threshold)
    try:
        moduli = np.abs(np.linalg.eigvals(g.entries))
    except np.linalg.LinAlgError as e:
        diagnostics = {"dim": g.dim, "max_abs_entry": float(np.max(np.abs(g.entries)))}
        logger.error(f"Eigenvalue iteration failed: {e}")
        raise EigenvalueError(f"eigenvalue iteration did not converge: {e}", diagnostics)
    logs = np.sort(np.log(moduli))[::-1]
    return CartanVector(logs - logs.mean())


def wedge(g: ProjMatrix, k: int) -> ProjMatrix:
    """k-th exterior power in the lexicographic basis e_I, I = (i_1 < ... < i_k)."""
    d = g.dim
    if not 1 <= k <= d - 1:
        raise ValueError(f"Exterior power k={k} out of range 1..{d - 1}")
    return ProjMatrix(batched_wedge(g.entries[None], k)[0])


def sym_power(g: ProjMatrix, d: int) -> ProjMatrix:
    """
    Action of a 2x2 matrix on homogeneous polynomials of degree d-1.

    Column j holds the coefficients of (a e1 + c e2)^(d-1-j) (b e1 + e e2)^j in the monomial basis
    e1^(d-1-i) e2^i.
    """
    if g.dim != 2:
        raise ValueError(f"sym_power needs a 2x2 matrix, got dimension {g.dim}")
    if d < 2:
        raise ValueError(f"sym_power target dimension must be at least 2, got {d}")
    (a, b), (c, e) = g.entries
    columns = []
    for j in range(d):
        poly = np.ones(1, dtype=np.complex128)
        for _ in range(d - 1 - j):
            poly = np.convolve(poly, [a, c])
        for _ in range(j):
            poly = np.convolve(poly, [b, e])
        columns.append(poly)
    return ProjMatrix(np.stack(columns, axis=1))


def exp_traceless(x: np.ndarray, z: complex = 1.0) -> np.ndarray:
    """exp(z X) for a traceless 2x2 matrix X, holomorphic in z."""
    m = z * np.asarray(x, dtype=np.complex128)
    delta = np.sqrt(-np.linalg.det(m) + 0j)
    factor = np.sinh(delta) / delta if abs(delta) > 1e-8 else 1.0 + delta * delta / 6.0
    return np.cosh(delta) * np.eye(2, dtype=np.complex128) + factor * m


def renormalized_product(matrices: Iterable[np.ndarray], dim: int, every: int = 8) -> Tuple[np.ndarray, float]:
    """
    Left-to-right product with renormalization by the largest entry modulus every `every` factors.

    Returns (stored product, log-scale) with true product = exp(log-scale) * stored product.
    """
    product = np.eye(dim, dtype=np.complex128)
    log_scale = 0.0
    for count, matrix in enumerate(matrices, start=1):
        product = product @ matrix
        if count % every == 0:
            peak = np.max(np.abs(product))
            product = product / peak
            log_scale += float(np.log(peak))
    return product, log_scale


def _decomposition_error(stack: np.ndarray, projection: Projection, error: Exception) -> EigenvalueError:
    failing = next(
        (i for i in range(stack.shape[0]) if not np.all(np.isfinite(stack[i]))),
        None,
    )
    logger.error(f"Batched {projection.value} decomposition failed: {error}")
    return EigenvalueError(
        f"{projection.value} iteration did not converge: {error}",
        {"batch_size": stack.shape[0], "dim": stack.shape[-1], "failing_index": failing},
    )


def batched_wedge(stack: np.ndarray, k: int) -> np.ndarray:
    """k-th exterior powers of a stack of d x d matrices, same basis as `wedge`."""
    d = stack.shape[-1]
    index = np.array(list(combinations(range(d), k)))
    minors = stack[:, index[:, None, :, None], index[None, :, None, :]]
    return np.linalg.det(minors)


def _top_partial_sums(stack: np.ndarray, count: int, projection: Projection) -> np.ndarray:
    """
    Columns k = 1..count of log(s_1 ... s_k) for singular values or eigenvalue moduli s_i.

    Jordan partial sums are the top eigenvalue modulus of the k-th exterior power, which keeps the
    lower coordinates accurate when they are much smaller than the norm of the product.
    """
    try:
        if projection is Projection.CARTAN:
            moduli = np.linalg.svd(stack, compute_uv=False)[:, :count]
        else:
            moduli = np.empty((stack.shape[0], count))
            for k in range(1, count + 1):
                power = stack if k == 1 else batched_wedge(stack, k)
                moduli[:, k - 1] = np.max(np.abs(np.linalg.eigvals(power)), axis=-1)
    except np.linalg.LinAlgError as e:
        raise _decomposition_error(stack, projection, e)
    with np.errstate(divide="ignore"):
        logs = np.log(moduli)
    if not np.all(np.isfinite(logs)):
        bad = int(np.argmin(np.all(np.isfinite(logs), axis=1)))
        raise DegenerateMatrixError(f"degenerate matrix: zero {projection.value} value at batch index {bad}")
    if projection is Projection.CARTAN:
        return np.cumsum(logs, axis=1)
    return logs


def _log_abs_det(stack: np.ndarray) -> np.ndarray:
    _, logabsdet = np.linalg.slogdet(stack)
    if not np.all(np.isfinite(logabsdet)):
        bad = int(np.argmin(np.isfinite(logabsdet)))
        raise DegenerateMatrixError(f"degenerate matrix: zero determinant at batch index {bad}")
    return logabsdet


def _spectra_chunk(forward, forward_scale, backward, backward_scale, projection, residual_tolerance) -> np.ndarray:
    d = forward.shape[-1]
    steps = np.arange(1, d + 1)
    total = _log_abs_det(forward) + d * forward_scale
    if backward is None:
        partial = _top_partial_sums(forward, d - 1, projection) + forward_scale[:, None] * steps[None, : d - 1]
        partial = np.hstack([np.zeros((len(total), 1)), partial, total[:, None]])
        coords = np.diff(partial, axis=1)
    else:
        half = d // 2
        top = _top_partial_sums(forward, half, projection) + forward_scale[:, None] * steps[None, :half]
        bottom = _top_partial_sums(backward, half, projection) + backward_scale[:, None] * steps[None, :half]
        coords = np.empty((len(total), d))
        coords[:, :half] = np.diff(top, axis=1, prepend=0.0)
        # lambda_{d+1-k}(g) = -lambda_k(g^-1)
        coords[:, d - half :] = -np.diff(bottom, axis=1, prepend=0.0)[:, ::-1]
        if d % 2:
            coords[:, half] = total - top[:, -1] + bottom[:, -1]
        residual = np.abs(coords.sum(axis=1) - total)
        size = np.maximum(1.0, np.max(np.abs(coords), axis=1))
        if np.any(residual > residual_tolerance * size):
            bad = int(np.argmax(residual / size))
            logger.error(f"Spectrum residual {residual[bad]:.3e} at batch index {bad}")
            raise EigenvalueError(
                f"{projection.value} spectrum inconsistent with the determinant: residual {residual[bad]:.3e}",
                {"batch_index": bad, "residual": float(residual[bad]), "dim": d},
            )
    return coords - coords.mean(axis=1, keepdims=True)


def log_spectra(
    forward: np.ndarray,
    forward_scale: np.ndarray,
    backward: Optional[np.ndarray] = None,
    backward_scale: Optional[np.ndarray] = None,
    projection: Projection = Projection.JORDAN,
    config: Optional[LinalgConfig] = None,
    chunk: int = 1 << 16,
) -> np.ndarray:
    """
    Jordan or Cartan projections of a stack of word products, shape (N, d), each row mean-zero.

    Coordinates are differences of the partial sums lambda_1 + ... + lambda_k. With the inverse-word
    products given, the top half comes from the forward products and the bottom half from the
    inverses (lambda_d(g) = -lambda_1(g^-1)); the middle coordinate of odd d is closed by log|det|,
    and the sum of the two halves is checked against log|det|.
    """
    config = config or DEFAULT_LINALG
    forward_scale = np.asarray(forward_scale, dtype=np.float64)
    if backward is not None:
        backward_scale = np.asarray(backward_scale, dtype=np.float64)
    out = np.empty(forward.shape[:2], dtype=np.float64)
    for start in range(0, forward.shape[0], chunk):
        rows = slice(start, start + chunk)
        out[rows] = _spectra_chunk(
            forward[rows],
            forward_scale[rows],
            None if backward is None else backward[rows],
            None if backward is None else backward_scale[rows],
            projection,
            config.spectrum_residual,
        )
    return out
