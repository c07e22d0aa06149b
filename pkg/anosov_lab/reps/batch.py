"""
Vectorized evaluation of many words at once.

Two shapes of work show up in the lab: a fixed list of class cores (period tables, limit sets) and
the full tree of reduced words level by level (Dirichlet sums, Anosov certificates). Both keep the
stored products bounded by renormalizing every few factors and carry the log-scale separately.
"""

import logging
from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

from anosov_lab.configs.base import LinalgConfig
from anosov_lab.configs.enums import Projection
from anosov_lab.matlin import log_spectra
from anosov_lab.reps.base import RepPoint
from anosov_lab.words import cyclic_strip, next_codes

logger = logging.getLogger(__name__)


@dataclass
class WordBatch:
    """
    Products of a batch of words and, for d > 2, of their inverses.

    Jordan projections are class functions and are read off the cyclic cores: rows that are not
    cyclically reduced are re-evaluated on their cores when the batch knows its representation.
    """

    codes: np.ndarray
    forward: np.ndarray
    forward_scale: np.ndarray
    backward: Optional[np.ndarray] = None
    backward_scale: Optional[np.ndarray] = None
    rep: Optional[RepPoint] = None
    config: Optional[LinalgConfig] = None

    def __len__(self) -> int:
        return self.codes.shape[0]

    def _stored_spectra(self, rows, projection: Projection) -> np.ndarray:
        return log_spectra(
            self.forward[rows],
            self.forward_scale[rows],
            None if self.backward is None else self.backward[rows],
            None if self.backward is None else self.backward_scale[rows],
            projection,
            self.config,
        )

    def spectra(self, projection: Projection = Projection.JORDAN) -> np.ndarray:
        if len(self) == 0:
            return np.zeros((0, self.forward.shape[-1]))
        if projection is not Projection.JORDAN or self.rep is None:
            return self._stored_spectra(slice(None), projection)
        strip = cyclic_strip(self.codes)
        if not strip.any():
            return self._stored_spectra(slice(None), projection)
        out = np.empty((len(self), self.forward.shape[-1]))
        length = self.codes.shape[1]
        for k in np.unique(strip):
            rows = np.flatnonzero(strip == k)
            if k == 0:
                out[rows] = self._stored_spectra(rows, projection)
            else:
                cores = evaluate_codes(self.rep, self.codes[rows, k : length - k], self.config)
                out[rows] = cores.spectra(projection)
        return out


def _renormalize(stack: np.ndarray, scale: np.ndarray) -> None:
    peak = np.max(np.abs(stack), axis=(1, 2))
    stack /= peak[:, None, None]
    scale += np.log(peak)


def evaluate_codes(rep: RepPoint, codes: np.ndarray, config: Optional[LinalgConfig] = None) -> WordBatch:
    """Evaluate rows of a code array of equal length."""
    config = config or LinalgConfig()
    letters = rep.letter_stack()
    count, length = codes.shape
    d = rep.dim
    with_inverse = d > 2

    forward = np.broadcast_to(np.eye(d, dtype=np.complex128), (count, d, d)).copy()
    forward_scale = np.zeros(count)
    backward = forward.copy() if with_inverse else None
    backward_scale = np.zeros(count) if with_inverse else None
    for column in range(length):
        forward = forward @ letters[codes[:, column]]
        if with_inverse:
            # (w x)^-1 = x^-1 w^-1
            backward = letters[codes[:, column] ^ 1] @ backward
        if (column + 1) % config.renormalize_every == 0:
            _renormalize(forward, forward_scale)
            if with_inverse:
                _renormalize(backward, backward_scale)
    return WordBatch(codes, forward, forward_scale, backward, backward_scale, rep, config)


def grow_levels(
    rep: RepPoint,
    max_len: int,
    first: Optional[int] = None,
    config: Optional[LinalgConfig] = None,
) -> Iterator[WordBatch]:
    """
    Yield the batch of all reduced words of length 1, 2, ..., max_len in lexicographic order.

    With `first` set, only the subtree of words starting with that code is grown.
    """
    config = config or LinalgConfig()
    letters = rep.letter_stack()
    table = next_codes(rep.rank)
    with_inverse = rep.dim > 2

    start = np.arange(2 * rep.rank, dtype=np.int16) if first is None else np.array([first], dtype=np.int16)
    codes = start[:, None]
    forward = letters[start].copy()
    forward_scale = np.zeros(len(start))
    backward = letters[start ^ 1].copy() if with_inverse else None
    backward_scale = np.zeros(len(start)) if with_inverse else None
    yield WordBatch(codes, forward, forward_scale, backward, backward_scale, rep, config)

    branching = table.shape[1]
    for length in range(2, max_len + 1):
        parents = np.repeat(np.arange(codes.shape[0]), branching)
        children = table[codes[:, -1]].reshape(-1)
        codes = np.hstack([codes[parents], children[:, None]])
        forward = forward[parents] @ letters[children]
        forward_scale = forward_scale[parents].copy()
        if with_inverse:
            backward = letters[children ^ 1] @ backward[parents]
            backward_scale = backward_scale[parents].copy()
        if length % config.renormalize_every == 0:
            _renormalize(forward, forward_scale)
            if with_inverse:
                _renormalize(backward, backward_scale)
        logger.debug(f"Grew {codes.shape[0]} words of length {length}")
        yield WordBatch(codes, forward, forward_scale, backward, backward_scale, rep, config)
