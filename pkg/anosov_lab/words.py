"""
Free-group combinatorics: reduced words, enumeration by length, cyclic reduction and primitive
conjugacy classes.

Letters are signed generator indices +-1..+-k. Vectorized routines work on integer codes
code(x) = 2(|x| - 1) + (x < 0), i.e. the alphabet a, A, b, B, ... in this order; the order of the
codes is the lexicographic order used everywhere in the lab. Strings use lowercase letters for
generators and uppercase letters for their inverses ("aBab").
"""

import logging
from dataclasses import dataclass
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np

from anosov_lab.configs.base import EnumerationConfig
from anosov_lab.exceptions import EnumerationBudgetError

logger = logging.getLogger(__name__)

_ALPHABET = "abcdefghijklmnopqrstuvwxyz"


def letter_to_code(letter: int) -> int:
    return 2 * (abs(letter) - 1) + (1 if letter < 0 else 0)


def code_to_letter(code: int) -> int:
    generator = code // 2 + 1
    return -generator if code % 2 else generator


@dataclass(frozen=True)
class Word:
    """Freely reduced word in the free group of the given rank."""

    letters: Tuple[int, ...]
    rank: int

    def __post_init__(self):
        letters = tuple(int(x) for x in self.letters)
        if self.rank < 1:
            raise ValueError(f"Rank must be positive, got {self.rank}")
        for x in letters:
            if x == 0 or abs(x) > self.rank:
                raise ValueError(f"Letter {x} out of range for rank {self.rank}")
        for x, y in zip(letters, letters[1:]):
            if x == -y:
                raise ValueError(f"Word {letters} is not freely reduced")
        object.__setattr__(self, "letters", letters)

    @classmethod
    def identity(cls, rank: int) -> "Word":
        return cls((), rank)

    @classmethod
    def reduce(cls, letters: Sequence[int], rank: int) -> "Word":
        stack: List[int] = []
        for x in letters:
            if stack and stack[-1] == -x:
                stack.pop()
            else:
                stack.append(x)
        return cls(tuple(stack), rank)

    @classmethod
    def from_codes(cls, codes: Sequence[int], rank: int) -> "Word":
        return cls(tuple(code_to_letter(int(c)) for c in codes), rank)

    @classmethod
    def parse(cls, text: str, rank: Optional[int] = None) -> "Word":
        """Parse "aBab"-style strings; "1" or "" is the identity."""
        letters = []
        for char in text.strip():
            if char == "1":
                continue
            index = _ALPHABET.find(char.lower())
            if index < 0:
                raise ValueError(f"Invalid letter {char!r} in word {text!r}")
            letters.append(-(index + 1) if char.isupper() else index + 1)
        if rank is None:
            rank = max((abs(x) for x in letters), default=1)
        return cls.reduce(letters, rank)

    @property
    def codes(self) -> Tuple[int, ...]:
        return tuple(letter_to_code(x) for x in self.letters)

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        if not self.letters:
            return "1"
        if self.rank > len(_ALPHABET):
            return ".".join(str(x) for x in self.letters)
        return "".join(_ALPHABET[abs(x) - 1].upper() if x < 0 else _ALPHABET[x - 1] for x in self.letters)

    def __mul__(self, other: "Word") -> "Word":
        return Word.reduce(self.letters + other.letters, max(self.rank, other.rank))

    def __pow__(self, n: int) -> "Word":
        base = self if n >= 0 else self.inverse()
        return Word.reduce(base.letters * abs(n), self.rank)

    def inverse(self) -> "Word":
        return Word(tuple(-x for x in reversed(self.letters)), self.rank)

    def is_cyclically_reduced(self) -> bool:
        return len(self.letters) < 2 or self.letters[0] != -self.letters[-1]

    def rotate(self, shift: int) -> "Word":
        if not self.letters:
            return self
        shift %= len(self.letters)
        return Word(self.letters[shift:] + self.letters[:shift], self.rank)


def cyclic_reduce(word: Word) -> Tuple[Word, Word]:
    """Return (core, conjugator) with word = conjugator * core * conjugator^-1 and core cyclically reduced."""
    letters = word.letters
    n = len(letters)
    i = 0
    while n - 2 * i >= 2 and letters[i] == -letters[n - 1 - i]:
        i += 1
    return Word(letters[i : n - i], word.rank), Word(letters[:i], word.rank)


def smallest_period(sequence: Sequence[int]) -> int:
    """Smallest p dividing len(sequence) with sequence = block^(n/p), via the failure function."""
    n = len(sequence)
    if n == 0:
        return 0
    failure = [0] * n
    k = 0
    for i in range(1, n):
        while k and sequence[i] != sequence[k]:
            k = failure[k - 1]
        if sequence[i] == sequence[k]:
            k += 1
        failure[i] = k
    period = n - failure[-1]
    return period if n % period == 0 else n


@dataclass(frozen=True)
class ConjClass:
    """
    Conjugacy class of a free-group element, stored as its canonical core: the cyclically reduced
    rotation with the lexicographically least code sequence.

    Use ConjClass.of to canonicalize arbitrary words; the enumeration builds instances directly
    from already canonical codes.
    """

    core: Word
    primitive: bool = True

    @classmethod
    def of(cls, word: Word) -> "ConjClass":
        core, _ = cyclic_reduce(word)
        if len(core) == 0:
            return cls(core, primitive=False)
        rotations = [core.rotate(r) for r in range(len(core))]
        canonical = min(rotations, key=lambda w: w.codes)
        return cls(canonical, primitive=smallest_period(canonical.letters) == len(canonical))

    @property
    def length(self) -> int:
        return len(self.core)

    @property
    def rank(self) -> int:
        return self.core.rank

    def inverse(self) -> "ConjClass":
        return ConjClass.of(self.core.inverse())

    def power(self, n: int) -> "ConjClass":
        return ConjClass.of(self.core**n)

    def __str__(self) -> str:
        return str(self.core)


class ClassList(Sequence[ConjClass]):
    """
    Read-only sequence of conjugacy classes kept as code rows padded with -1.

    ConjClass objects are built on access, so long tables hold one small integer row per class.
    """

    def __init__(self, codes: np.ndarray, lengths: np.ndarray, primitive: np.ndarray, rank: int):
        self.codes = np.array(codes, dtype=np.int16)
        if self.codes.ndim != 2:
            self.codes = self.codes.reshape(len(lengths), -1 if self.codes.size else 0)
        self.lengths = np.array(lengths, dtype=np.int64)
        self.primitive = np.array(primitive, dtype=bool)
        self.rank = rank
        for array in (self.codes, self.lengths, self.primitive):
            array.setflags(write=False)

    @classmethod
    def from_rows(cls, rows: Sequence[np.ndarray], primitive: Sequence[bool], rank: int) -> "ClassList":
        lengths = np.array([len(row) for row in rows], dtype=np.int64)
        codes = np.full((len(rows), int(lengths.max()) if len(rows) else 0), -1, dtype=np.int16)
        for i, row in enumerate(rows):
            codes[i, : len(row)] = row
        return cls(codes, lengths, primitive, rank)

    @classmethod
    def from_classes(cls, classes: Sequence[ConjClass], rank: Optional[int] = None) -> "ClassList":
        if isinstance(classes, ClassList):
            return classes
        rank = rank or max((c.rank for c in classes), default=1)
        return cls.from_rows([c.core.codes for c in classes], [c.primitive for c in classes], rank)

    def __len__(self) -> int:
        return self.lengths.shape[0]

    def __getitem__(self, index):
        if isinstance(index, slice):
            return self.take(np.arange(len(self))[index])
        row = self.codes[index, : self.lengths[index]]
        return ConjClass(Word.from_codes(row, self.rank), primitive=bool(self.primitive[index]))

    def take(self, order: np.ndarray) -> "ClassList":
        return ClassList(self.codes[order], self.lengths[order], self.primitive[order], self.rank)

    def locate(self, conj_class: ConjClass) -> int:
        """Row of the class with the same canonical core, or -1."""
        target = np.array(conj_class.core.codes, dtype=np.int16)
        if target.size > self.codes.shape[1]:
            return -1
        candidates = self.lengths == target.size
        candidates &= np.all(self.codes[:, : target.size] == target, axis=1)
        hits = np.flatnonzero(candidates)
        return int(hits[0]) if hits.size else -1


def element_count(rank: int, length: int) -> int:
    """Number of reduced words of exactly the given length."""
    if length == 0:
        return 1
    return 2 * rank * (2 * rank - 1) ** (length - 1)


def check_budget(rank: int, max_len: int, budget: Optional[int]) -> None:
    if rank < 1 or max_len < 1:
        raise ValueError(f"Rank and length must be positive, got rank={rank}, max_len={max_len}")
    budget = EnumerationConfig().budget if budget is None else budget
    total = sum(element_count(rank, n) for n in range(1, max_len + 1))
    if total > budget:
        logger.error(f"Enumeration of {total} words exceeds budget {budget}")
        raise EnumerationBudgetError(f"enumeration budget exceeded: {total} words > {budget}")


def next_codes(rank: int) -> np.ndarray:
    """Table of admissible next codes, shape (2k, 2k-1), each row ascending."""
    codes = np.arange(2 * rank)
    return np.array([[c for c in codes if c != (p ^ 1)] for p in codes], dtype=np.int16).reshape(2 * rank, -1)


def _extend(words: np.ndarray, steps: int, table: np.ndarray) -> np.ndarray:
    for _ in range(steps):
        children = table[words[:, -1]].reshape(-1, 1)
        words = np.hstack([np.repeat(words, table.shape[1], axis=0), children])
    return words


def iter_word_codes(rank: int, length: int, first: Optional[int] = None, block: int = 1 << 20) -> Iterator[np.ndarray]:
    """
    Reduced words of exactly `length` letters in lexicographic order, yielded in blocks of at most
    about `block` rows.

    Blocks share a prefix; with `first` set, only words starting with that code are produced.
    """
    if length < 1:
        raise ValueError(f"Length must be positive, got {length}")
    table = next_codes(rank)
    branching = table.shape[1]
    if first is None:
        roots = np.arange(2 * rank, dtype=np.int16)[:, None]
    else:
        roots = np.array([[first]], dtype=np.int16)
    prefix_len = 1
    while prefix_len < length and branching ** (length - prefix_len) > block:
        prefix_len += 1
    prefixes = _extend(roots, prefix_len - 1, table)
    per_block = max(1, block // branching ** (length - prefix_len))
    for start in range(0, prefixes.shape[0], per_block):
        yield _extend(prefixes[start : start + per_block], length - prefix_len, table)


def word_codes(rank: int, length: int, first: Optional[int] = None) -> np.ndarray:
    """
    All reduced words of exactly `length` letters as a code array, in lexicographic order.

    With `first` set, only words starting with that code are returned.
    """
    return np.vstack(list(iter_word_codes(rank, length, first)))


def cyclic_strip(codes: np.ndarray) -> np.ndarray:
    """Per row of a reduced-word code array, the number of letters cyclic reduction removes from each end."""
    length = codes.shape[1]
    strip = np.zeros(codes.shape[0], dtype=np.int64)
    cancelling = np.ones(codes.shape[0], dtype=bool)
    for i in range(length // 2):
        cancelling &= codes[:, i] == (codes[:, length - 1 - i] ^ 1)
        strip += cancelling
    return strip


def _canonical_rows(words: np.ndarray, primitive_only: bool) -> Tuple[np.ndarray, np.ndarray]:
    length = words.shape[1]
    if length > 1:
        words = words[words[:, 0] != (words[:, -1] ^ 1)]
    # a letter below the first one starts a smaller rotation
    words = words[words.min(axis=1) >= words[:, 0]]
    primitive = np.ones(words.shape[0], dtype=bool)
    for shift in range(1, length):
        if words.shape[0] == 0:
            break
        smaller = np.zeros(words.shape[0], dtype=bool)
        tied = np.ones(words.shape[0], dtype=bool)
        for j in range(length):
            rotated, current = words[:, (j + shift) % length], words[:, j]
            smaller |= tied & (rotated < current)
            tied &= rotated == current
            if not tied.any():
                break
        keep = ~smaller
        words, primitive = words[keep], primitive[keep] & ~tied[keep]
    if primitive_only:
        words, primitive = words[primitive], primitive[primitive]
    return words, primitive


def class_codes(
    rank: int, length: int, primitive_only: bool = True, first: Optional[int] = None, block: int = 1 << 20
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Canonical cores of exactly `length` letters, in lexicographic order.

    Returns (codes, primitive flags). A cyclic word is canonical when no rotation is
    lexicographically smaller, and primitive when no proper rotation equals it. Words are screened
    block by block, so memory stays bounded by the block size and the number of survivors.
    """
    kept, flags = [], []
    for words in iter_word_codes(rank, length, first, block):
        codes, primitive = _canonical_rows(words, primitive_only)
        kept.append(codes)
        flags.append(primitive)
    if not kept:
        return np.zeros((0, length), dtype=np.int16), np.zeros(0, dtype=bool)
    return np.vstack(kept), np.concatenate(flags)


def enumerate_elements(rank: int, max_len: int, budget: Optional[int] = None) -> Iterator[Word]:
    """Every non-trivial reduced word of length <= max_len, by length then lexicographically."""
    check_budget(rank, max_len, budget)
    for length in range(1, max_len + 1):
        for row in word_codes(rank, length):
            yield Word.from_codes(row, rank)


def conjugacy_classes(
    rank: int, max_len: int, primitive_only: bool = True, budget: Optional[int] = None
) -> Iterator[ConjClass]:
    """Every non-trivial conjugacy class with core length <= max_len, by length then lexicographically."""
    check_budget(rank, max_len, budget)
    for length in range(1, max_len + 1):
        codes, primitive = class_codes(rank, length, primitive_only)
        for row, flag in zip(codes, primitive):
            yield ConjClass(Word.from_codes(row, rank), primitive=bool(flag))
