import csv
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from anosov_lab.configs.base import LabConfig, resolve
from anosov_lab.configs.enums import Projection
from anosov_lab.exceptions import EstimationError, NonProximalError, PositivityError
from anosov_lab.reps.base import RepPoint, WeightFunctional
from anosov_lab.reps.batch import evaluate_codes
from anosov_lab.utils.parallel import ordered_map
from anosov_lab.words import ClassList, ConjClass, Word, check_budget, class_codes

logger = logging.getLogger(__name__)

FunctionalSpec = Union[str, WeightFunctional]


@dataclass(frozen=True, eq=False)
class ClassSpectrum:
    """
    Periods of primitive conjugacy classes for one or more representations and functionals.

    periods[i, r, f] is functional f evaluated on the Jordan projection of rep r at class i. Rows are
    sorted by the base column (rep 0, functional 0); ties keep the canonical (length, lex) order.
    """

    classes: Sequence[ConjClass]
    core_lengths: np.ndarray
    periods: np.ndarray
    rep_names: Tuple[str, ...]
    functional_names: Tuple[str, ...]
    max_len: int
    skipped: int = 0

    def __post_init__(self):
        object.__setattr__(self, "classes", ClassList.from_classes(self.classes))
        if self.periods.shape != (len(self.classes), len(self.rep_names), len(self.functional_names)):
            raise ValueError(f"Period array shape {self.periods.shape} does not match the table")
        self.periods.setflags(write=False)
        self.core_lengths.setflags(write=False)

    def __len__(self) -> int:
        return len(self.classes)

    @property
    def base(self) -> np.ndarray:
        return self.periods[:, 0, 0]

    def _rep_index(self, rep: Union[int, str]) -> int:
        return self.rep_names.index(rep) if isinstance(rep, str) else rep

    def _functional_index(self, functional: Union[int, str]) -> int:
        return self.functional_names.index(functional) if isinstance(functional, str) else functional

    def column(self, rep: Union[int, str] = 0, functional: Union[int, str] = 0) -> np.ndarray:
        return self.periods[:, self._rep_index(rep), self._functional_index(functional)]

    def cutoff(self, rep: Union[int, str] = 0, functional: Union[int, str] = 0) -> float:
        """
        Period cut-off T_cut below which the table is complete.

        Every class with a period below the smallest period among classes of the maximal core length
        is assumed to be present; longer cores have larger periods in the Anosov regime.
        """
        column = self.column(rep, functional)
        longest = column[self.core_lengths == self.max_len]
        if longest.size == 0:
            return float(np.max(column))
        return float(np.min(longest))

    def below_cutoff(self, rep: Union[int, str] = 0, functional: Union[int, str] = 0) -> np.ndarray:
        return self.column(rep, functional) <= self.cutoff(rep, functional)

    def scaled(self, factor: float) -> "ClassSpectrum":
        return ClassSpectrum(
            self.classes,
            self.core_lengths.copy(),
            self.periods * factor,
            self.rep_names,
            self.functional_names,
            self.max_len,
            self.skipped,
        )

    def find(self, conj_class: ConjClass) -> int:
        index = self.classes.locate(conj_class)
        if index >= 0:
            return index
        raise KeyError(f"Class {conj_class} not in table")


def _resolve_functionals(functionals: Sequence[FunctionalSpec], dim: int) -> List[WeightFunctional]:
    resolved = [f if isinstance(f, WeightFunctional) else WeightFunctional.parse(f, dim) for f in functionals]
    for f in resolved:
        if f.dim != dim:
            raise ValueError(f"Functional {f.name} has dimension {f.dim}, representations have {dim}")
    return resolved


def _shard_periods(reps, functionals, length, first, config: LabConfig):
    codes, primitive = class_codes(reps[0].rank, length, config.enumeration.primitive_only, first)
    periods = np.empty((codes.shape[0], len(reps), len(functionals)))
    proximal = np.ones(codes.shape[0], dtype=bool)
    coeffs = np.stack([f.coeffs for f in functionals], axis=1)
    for r, rep in enumerate(reps):
        spectra = evaluate_codes(rep, codes, config.linalg).spectra(Projection.JORDAN)
        proximal &= (spectra[:, 0] - spectra[:, 1]) >= config.linalg.proximal_gap
        periods[:, r, :] = spectra @ coeffs
    return codes, primitive, periods, proximal


def spectrum_table(
    reps: Union[RepPoint, Sequence[RepPoint]],
    functionals: Sequence[FunctionalSpec],
    max_len: int,
    config: Optional[LabConfig] = None,
    threads: Optional[int] = None,
    rep_names: Optional[Sequence[str]] = None,
) -> ClassSpectrum:
    """
    Period table of every primitive class with core length <= max_len.

    Work is sharded by (core length, first letter) and merged in that order, so the table does not
    depend on the worker count.
    """
    config = resolve(config)
    reps = [reps] if isinstance(reps, RepPoint) else list(reps)
    if not reps:
        raise ValueError("At least one representation is required")
    if len({(r.rank, r.dim) for r in reps}) != 1:
        raise ValueError("All representations in a table must share rank and dimension")
    if not functionals:
        raise ValueError("At least one functional is required")
    rank, dim = reps[0].rank, reps[0].dim
    functionals = _resolve_functionals(functionals, dim)
    rep_names = tuple(rep_names) if rep_names is not None else tuple(f"rep{i}" for i in range(len(reps)))
    if len(rep_names) != len(reps):
        raise ValueError("One name per representation is required")
    check_budget(rank, max_len, config.enumeration.budget)

    jobs = [(length, first) for length in range(1, max_len + 1) for first in range(2 * rank)]
    results = ordered_map(
        lambda job: _shard_periods(reps, functionals, job[0], job[1], config),
        jobs,
        threads or config.threads,
    )

    codes_list, flags_list, periods_list, lengths_list = [], [], [], []
    total, skipped, first_skipped = 0, 0, None
    for (length, _), (codes, primitive, periods, proximal) in zip(jobs, results):
        total += codes.shape[0]
        if not np.all(proximal):
            skipped += int(np.count_nonzero(~proximal))
            if first_skipped is None:
                first_skipped = str(Word.from_codes(codes[np.argmin(proximal)], rank))
        padded = np.full((int(np.count_nonzero(proximal)), max_len), -1, dtype=np.int16)
        padded[:, :length] = codes[proximal]
        codes_list.append(padded)
        flags_list.append(primitive[proximal])
        periods_list.append(periods[proximal])
        lengths_list.append(np.full(int(np.count_nonzero(proximal)), length))

    if total == 0:
        raise EstimationError("No conjugacy classes enumerated")
    if skipped:
        logger.warning(f"Skipped {skipped} of {total} non-proximal classes (first: {first_skipped})")
    if skipped > config.enumeration.max_skip_ratio * total:
        raise NonProximalError(f"non-proximal element {first_skipped}: {skipped} of {total} classes lack an eigenvalue gap")

    periods = np.concatenate(periods_list, axis=0)
    lengths = np.concatenate(lengths_list)
    rows = ClassList(np.vstack(codes_list), lengths, np.concatenate(flags_list), rank)
    base = periods[:, 0, 0]
    if np.any(base <= 0):
        bad = int(np.argmax(base <= 0))
        raise PositivityError(
            f"functional not positive on limit cone: {functionals[0].name} period {base[bad]:.3e} "
            f"at class {rows[bad]}"
        )

    order = np.argsort(base, kind="stable")
    classes = rows.take(order)
    logger.info(f"Spectrum table: {len(classes)} classes, {len(reps)} reps, {len(functionals)} functionals, L={max_len}")
    return ClassSpectrum(
        classes=classes,
        core_lengths=lengths[order],
        periods=periods[order],
        rep_names=rep_names,
        functional_names=tuple(f.name for f in functionals),
        max_len=max_len,
        skipped=skipped,
    )


def export_csv(spectrum: ClassSpectrum, path: str) -> None:
    header = ["class", "core_length", "primitive"] + [
        f"{r}:{f}" for r in spectrum.rep_names for f in spectrum.functional_names
    ]
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        flags = spectrum.classes.primitive
        for index, (length, row) in enumerate(zip(spectrum.core_lengths, spectrum.periods)):
            writer.writerow(
                [str(spectrum.classes[index]), int(length), int(flags[index])] + [f"{value:.17g}" for value in row.reshape(-1)]
            )


def load_csv(path: str, rank: Optional[int] = None) -> ClassSpectrum:
    """Read an export_csv file; files without the primitive column load every class as primitive."""
    with open(path, "r", newline="") as handle:
        rows = list(csv.reader(handle))
    if not rows or rows[0][:2] != ["class", "core_length"]:
        raise ValueError(f"{path} is not a spectrum export")
    with_flags = len(rows[0]) > 2 and rows[0][2] == "primitive"
    first_value = 3 if with_flags else 2
    pairs = [column.rsplit(":", 1) for column in rows[0][first_value:]]
    rep_names = tuple(dict.fromkeys(r for r, _ in pairs))
    functional_names = tuple(dict.fromkeys(f for _, f in pairs))
    body = rows[1:]
    words = [Word.parse(row[0]) for row in body]
    rank = rank or max((w.rank for w in words), default=1)
    flags = [row[2] == "1" if with_flags else True for row in body]
    classes = ClassList.from_rows([Word(w.letters, rank).codes for w in words], flags, rank)
    lengths = np.array([int(row[1]) for row in body], dtype=int)
    periods = np.array([[float(v) for v in row[first_value:]] for row in body]).reshape(
        len(body), len(rep_names), len(functional_names)
    )
    return ClassSpectrum(
        classes=classes,
        core_lengths=lengths,
        periods=periods,
        rep_names=rep_names,
        functional_names=functional_names,
        max_len=int(lengths.max()) if len(lengths) else 0,
    )
