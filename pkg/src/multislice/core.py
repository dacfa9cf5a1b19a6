"""The multislice domain: validation, ranking, enumeration, sampling.

Words are exposed with 1-based colors and 1-based coordinates, matching
the usual mathematical notation. Internally the dense element table
(:attr:`Multislice.codes`) stores 0-based colors.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from itertools import combinations
from typing import Iterator, Sequence

import numpy as np

DEFAULT_MAX_DOMAIN = 200_000

Element = tuple[int, ...]


class MultisliceError(ValueError):
    """Invalid multislice, element, rank or coordinate."""


class HistogramMismatch(MultisliceError):
    pass


class BudgetExceeded(RuntimeError):
    """A computation would exceed its configured size budget."""


class InvariantViolation(AssertionError):
    """A checked mathematical invariant failed numerically."""


def multinomial(counts: Sequence[int]) -> int:
    total = 0
    result = 1
    for c in counts:
        total += c
        result *= math.comb(total, c)
    return result


@dataclass(frozen=True)
class Multislice:
    """Words in ``[l]^n`` with exactly ``kappa[i]`` occurrences of color ``i+1``."""

    kappa: tuple[int, ...]

    def __post_init__(self):
        kappa = tuple(int(k) for k in self.kappa)
        if len(kappa) < 2:
            raise MultisliceError(f"need at least 2 colors, got kappa={kappa}")
        if any(k < 1 for k in kappa):
            raise MultisliceError(f"all color weights must be positive, got kappa={kappa}")
        object.__setattr__(self, "kappa", kappa)

    @property
    def n(self) -> int:
        return sum(self.kappa)

    @property
    def colors(self) -> int:
        return len(self.kappa)

    @cached_property
    def size(self) -> int:
        return multinomial(self.kappa)

    def is_balanced(self, rho: float) -> bool:
        return min(self.kappa) >= rho * self.n

    def check_dense(self, max_domain: int = DEFAULT_MAX_DOMAIN) -> None:
        if self.size > max_domain:
            raise BudgetExceeded(
                f"multislice {self.kappa} has {self.size} elements, "
                f"above the dense-table budget of {max_domain}"
            )

    @cached_property
    def codes(self) -> np.ndarray:
        """All elements in rank order as a ``(size, n)`` array of 0-based colors."""
        self.check_dense()
        table = _lex_table(self.kappa)
        table.flags.writeable = False
        return table

    @cached_property
    def transpositions(self) -> tuple[tuple[int, int], ...]:
        """All 0-based coordinate pairs ``(a, b)``, ``a < b``, in lexicographic order."""
        return tuple(combinations(range(self.n), 2))

    @cached_property
    def transposition_table(self) -> np.ndarray:
        """``table[t, r]`` is the rank of element ``r`` after applying transposition ``t``."""
        codes = self.codes
        out = np.empty((len(self.transpositions), self.size), dtype=np.int64)
        for t, (a, b) in enumerate(self.transpositions):
            swapped = codes.copy()
            swapped[:, [a, b]] = codes[:, [b, a]]
            out[t] = rank_array(self, swapped)
        out.flags.writeable = False
        return out

    def to_json(self) -> dict:
        return {"kappa": list(self.kappa)}

    @classmethod
    def from_json(cls, obj: dict) -> "Multislice":
        try:
            return cls(tuple(obj["kappa"]))
        except (KeyError, TypeError) as exc:
            raise MultisliceError(f"malformed multislice object: {obj!r}") from exc


def domain_size(spec: Multislice) -> int:
    return spec.size


@lru_cache(maxsize=64)
def _lex_table(kappa: tuple[int, ...]) -> np.ndarray:
    n = sum(kappa)
    if n == 0:
        return np.zeros((1, 0), dtype=np.int8)
    blocks = []
    for c, k in enumerate(kappa):
        if k == 0:
            continue
        rest = list(kappa)
        rest[c] -= 1
        sub = _lex_table(tuple(rest))
        head = np.full((sub.shape[0], 1), c, dtype=np.int8)
        blocks.append(np.hstack([head, sub]))
    return np.vstack(blocks)


def _check_word(spec: Multislice, u: Sequence[int]) -> np.ndarray:
    word = np.asarray(u, dtype=np.int64)
    if word.shape != (spec.n,):
        raise MultisliceError(f"element must have length {spec.n}, got {len(word)}")
    if word.min() < 1 or word.max() > spec.colors:
        raise MultisliceError(f"colors must lie in 1..{spec.colors}, got {tuple(u)}")
    hist = np.bincount(word - 1, minlength=spec.colors)
    if tuple(hist) != spec.kappa:
        raise HistogramMismatch(
            f"color histogram {tuple(int(h) for h in hist)} of {tuple(u)} "
            f"does not match kappa={spec.kappa}"
        )
    return word - 1


def rank(spec: Multislice, u: Sequence[int]) -> int:
    """Lexicographic rank of the word ``u`` (1-based colors)."""
    word = _check_word(spec, u)
    remaining = list(spec.kappa)
    block = spec.size
    total = spec.n
    r = 0
    for c in word:
        for smaller in range(c):
            r += block * remaining[smaller] // total
        block = block * remaining[c] // total
        remaining[c] -= 1
        total -= 1
    return r


def unrank(spec: Multislice, r: int) -> Element:
    if not 0 <= r < spec.size:
        raise MultisliceError(f"rank {r} out of range [0, {spec.size})")
    remaining = list(spec.kappa)
    block = spec.size
    total = spec.n
    word = []
    for _ in range(spec.n):
        for c in range(spec.colors):
            sub = block * remaining[c] // total
            if r < sub:
                word.append(c + 1)
                block = sub
                remaining[c] -= 1
                total -= 1
                break
            r -= sub
    return tuple(word)


def rank_array(spec: Multislice, codes: np.ndarray) -> np.ndarray:
    """Vectorised :func:`rank` for a ``(m, n)`` array of 0-based words.

    Uses int64 arithmetic; intermediate values are bounded by ``size * n``.
    Histograms are not validated.
    """
    codes = np.asarray(codes)
    m = codes.shape[0]
    remaining = np.tile(np.array(spec.kappa, dtype=np.int64), (m, 1))
    block = np.full(m, spec.size, dtype=np.int64)
    ranks = np.zeros(m, dtype=np.int64)
    rows = np.arange(m)
    for j in range(spec.n):
        total = spec.n - j
        col = codes[:, j]
        for c in range(spec.colors - 1):
            below = col > c
            ranks += np.where(below, block * remaining[:, c] // total, 0)
        block = block * remaining[rows, col] // total
        remaining[rows, col] -= 1
    return ranks


def enumerate_elements(spec: Multislice) -> Iterator[Element]:
    """Yield every element in rank (lexicographic) order."""
    word = [c + 1 for c, k in enumerate(spec.kappa) for _ in range(k)]
    n = len(word)
    while True:
        yield tuple(word)
        # next lexicographic multiset permutation
        i = n - 2
        while i >= 0 and word[i] >= word[i + 1]:
            i -= 1
        if i < 0:
            return
        j = n - 1
        while word[j] <= word[i]:
            j -= 1
        word[i], word[j] = word[j], word[i]
        word[i + 1:] = reversed(word[i + 1:])


def sample_uniform(spec: Multislice, seed) -> Element:
    """Draw a uniform element; ``seed`` is anything :func:`numpy.random.default_rng` accepts."""
    rng = np.random.default_rng(seed)
    base = np.repeat(np.arange(1, spec.colors + 1), spec.kappa)
    return tuple(int(c) for c in rng.permutation(base))


def apply_transposition(u: Sequence[int], j1: int, j2: int) -> Element:
    """Swap the entries at 1-based coordinates ``j1`` and ``j2``."""
    n = len(u)
    for j in (j1, j2):
        if not 1 <= j <= n:
            raise MultisliceError(f"coordinate {j} out of range 1..{n}")
    word = list(u)
    word[j1 - 1], word[j2 - 1] = word[j2 - 1], word[j1 - 1]
    return tuple(word)
