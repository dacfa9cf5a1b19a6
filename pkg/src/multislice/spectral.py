"""Transposition-walk spectra, edge expansion and the edge-isoperimetric inequality."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, NamedTuple, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import lobpcg

from .core import BudgetExceeded, InvariantViolation, Multislice, MultisliceError, multinomial
from .harmonic import FunctionTable, degree_one_dimension, high_degree_mass, transposition_average

DEFAULT_EIGEN_BUDGET = 4000
DEFAULT_MAX_CANDIDATES = 10**7
DEFAULT_SEARCH_DOMAIN = 10**4

Partition = tuple[int, ...]


# -- partitions ----------------------------------------------------------------

def is_partition(lam: Sequence[int]) -> bool:
    return (
        len(lam) > 0
        and all(isinstance(p, (int, np.integer)) and p >= 1 for p in lam)
        and all(a >= b for a, b in zip(lam, lam[1:]))
    )


def partitions(n: int, max_parts: int | None = None, max_part: int | None = None) -> Iterator[Partition]:
    """Partitions of ``n`` in decreasing lexicographic order."""
    if max_parts is None:
        max_parts = n
    if max_part is None:
        max_part = n
    if n == 0:
        yield ()
        return
    if max_parts == 0:
        return
    for first in range(min(n, max_part), 0, -1):
        if first * max_parts < n:
            break
        for rest in partitions(n - first, max_parts - 1, first):
            yield (first,) + rest


def majorizes(lam: Sequence[int], mu: Sequence[int]) -> bool:
    """Dominance order: every prefix sum of ``lam`` is at least that of ``mu``."""
    if sum(lam) != sum(mu):
        return False
    a = b = 0
    for i in range(max(len(lam), len(mu))):
        a += lam[i] if i < len(lam) else 0
        b += mu[i] if i < len(mu) else 0
        if a < b:
            return False
    return True


def partitions_majorizing(kappa: Sequence[int]) -> list[Partition]:
    """All partitions ``lam`` of ``n`` with ``lam`` majorizing ``sorted(kappa)``.

    Such partitions never have more parts than ``kappa``, which bounds the search.
    """
    mu = tuple(sorted(kappa, reverse=True))
    return [lam for lam in partitions(sum(mu), max_parts=len(mu)) if majorizes(lam, mu)]


def frobenius_eigenvalue(lam: Sequence[int], n: int | None = None) -> Fraction:
    """Eigenvalue of the transposition average on the isotypic component of ``lam``."""
    lam = tuple(lam)
    if not is_partition(lam):
        raise MultisliceError(f"{lam} is not a partition")
    total = sum(lam)
    if n is not None and n != total:
        raise MultisliceError(f"{lam} is not a partition of {n}")
    if total < 2:
        raise MultisliceError("need n >= 2")
    s = sum(p * p - (2 * i + 1) * p for i, p in enumerate(lam))
    return Fraction(s, total * (total - 1))


# -- spectrum ------------------------------------------------------------------

def transposition_operator(spec: Multislice) -> sp.csr_matrix:
    """Sparse matrix of the transposition average (symmetric, stochastic)."""
    table = spec.transposition_table
    T, N = table.shape
    rows = np.tile(np.arange(N), T)
    W = sp.coo_matrix((np.full(T * N, 1.0 / T), (rows, table.ravel())), shape=(N, N))
    return W.tocsr()


def transposition_counts(spec: Multislice) -> np.ndarray:
    """Dense integer matrix ``W[r, s] = #{tau : r^tau = s}``."""
    table = spec.transposition_table
    W = np.zeros((spec.size, spec.size), dtype=np.int64)
    rows = np.arange(spec.size)
    for perm in table:
        np.add.at(W, (rows, perm), 1)
    return W


@dataclass
class SpectrumGroup:
    eigenvalue: Fraction
    partitions: tuple[Partition, ...]
    dimension: int = 0
    computed: float = float("nan")

    def to_json(self) -> dict:
        return {
            "eigenvalue": str(self.eigenvalue),
            "eigenvalue_float": float(self.eigenvalue),
            "partitions": [list(p) for p in self.partitions],
            "dimension": self.dimension,
            "computed": self.computed,
        }


@dataclass
class SpectrumReport:
    kappa: tuple[int, ...]
    groups: list[SpectrumGroup]
    max_error: float = 0.0
    unmatched: list[float] = field(default_factory=list)
    tol: float = 1e-8

    @property
    def ok(self) -> bool:
        return (
            not self.unmatched
            and self.max_error <= self.tol
            and all(g.dimension > 0 for g in self.groups)
            and sum(g.dimension for g in self.groups) == multinomial(self.kappa)
        )

    def to_json(self) -> dict:
        return {
            "kappa": list(self.kappa),
            "groups": [g.to_json() for g in self.groups],
            "max_error": self.max_error,
            "unmatched": self.unmatched,
            "ok": self.ok,
        }


def predicted_groups(kappa: Sequence[int]) -> list[SpectrumGroup]:
    """Partitions majorizing ``kappa`` grouped by their Frobenius eigenvalue, descending."""
    n = sum(kappa)
    by_value: dict[Fraction, list[Partition]] = {}
    for lam in partitions_majorizing(kappa):
        by_value.setdefault(frobenius_eigenvalue(lam, n), []).append(lam)
    return [SpectrumGroup(c, tuple(ps)) for c, ps in sorted(by_value.items(), reverse=True)]


def spectrum(spec: Multislice, max_domain: int = DEFAULT_EIGEN_BUDGET, tol: float = 1e-8) -> SpectrumReport:
    """Diagonalise the transposition average and match it against the predicted eigenvalues."""
    if spec.size > max_domain:
        raise BudgetExceeded(f"spectrum of {spec.kappa}: {spec.size} elements exceeds budget {max_domain}")
    eig = np.linalg.eigvalsh(transposition_operator(spec).toarray())
    groups = predicted_groups(spec.kappa)
    values = np.array([float(g.eigenvalue) for g in groups])
    nearest = np.abs(eig[:, None] - values[None, :]).argmin(axis=1)
    errors = np.abs(eig - values[nearest])
    report = SpectrumReport(spec.kappa, groups, tol=tol)
    report.unmatched = [float(e) for e, err in zip(eig, errors) if err > tol]
    matched = errors <= tol
    report.max_error = float(errors[matched].max()) if matched.any() else float("inf")
    for k, g in enumerate(groups):
        hit = matched & (nearest == k)
        g.dimension = int(hit.sum())
        if g.dimension:
            g.computed = float(eig[hit].mean())
    return report


def spectral_degree_one_basis(spec: Multislice, dense_limit: int = 2500, tol: float = 1e-8) -> np.ndarray:
    """Orthonormal basis of the two top eigenspaces of the transposition average.

    Raises :class:`InvariantViolation` if the top eigenspace dimension does not
    separate cleanly from the rest of the spectrum.
    """
    n = spec.n
    second = float(frobenius_eigenvalue((n - 1, 1))) if n > 2 else -1.0
    T = transposition_operator(spec)
    dim = degree_one_dimension(spec)
    if spec.size <= dense_limit or dim + 1 >= spec.size - 1:
        vals, vecs = np.linalg.eigh(T.toarray())
        keep = vals >= second - tol
        return vecs[:, keep]
    # block method: single-vector Lanczos can drop copies of a repeated eigenvalue
    block = np.random.default_rng(0).normal(size=(spec.size, dim + 10))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        vals, vecs = lobpcg(T, block, largest=True, tol=1e-10, maxiter=2000)
    keep = vals >= second - tol
    if keep.all():
        raise InvariantViolation(
            f"top {dim + 10} eigenvalues of {spec.kappa} all lie at or above {second}; degree-one "
            "eigenspace is larger than expected"
        )
    q, _ = np.linalg.qr(vecs[:, keep])
    return q


# -- subsets and expansion -------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SubsetFamily:
    """A subset of the multislice, stored as a membership mask over ranks."""

    spec: Multislice
    members: np.ndarray

    def __post_init__(self):
        mask = np.asarray(self.members, dtype=bool)
        if mask.shape != (self.spec.size,):
            raise MultisliceError(f"membership mask must have length {self.spec.size}")
        mask = mask.copy()
        mask.flags.writeable = False
        object.__setattr__(self, "members", mask)

    @classmethod
    def from_ranks(cls, spec: Multislice, ranks: Sequence[int]) -> "SubsetFamily":
        ranks = [int(r) for r in ranks]
        if len(set(ranks)) != len(ranks):
            raise MultisliceError("duplicate ranks in subset")
        if any(not 0 <= r < spec.size for r in ranks):
            raise MultisliceError(f"ranks must lie in [0, {spec.size})")
        mask = np.zeros(spec.size, dtype=bool)
        mask[ranks] = True
        return cls(spec, mask)

    @classmethod
    def from_predicate(cls, spec: Multislice, pred: Callable[[tuple[int, ...]], bool]) -> "SubsetFamily":
        return cls(spec, [bool(pred(tuple(int(c) for c in w))) for w in spec.codes + 1])

    @property
    def size(self) -> int:
        return int(self.members.sum())

    @property
    def volume(self) -> Fraction:
        return Fraction(self.size, self.spec.size)

    def ranks(self) -> list[int]:
        return np.flatnonzero(self.members).tolist()

    def indicator(self) -> FunctionTable:
        return FunctionTable(self.spec, self.members.astype(float))

    def complement(self) -> "SubsetFamily":
        return SubsetFamily(self.spec, ~self.members)

    def __eq__(self, other):
        if not isinstance(other, SubsetFamily):
            return NotImplemented
        return self.spec == other.spec and bool(np.array_equal(self.members, other.members))

    def __hash__(self):
        return hash((self.spec, self.members.tobytes()))

    def to_json(self) -> dict:
        return {"kappa": list(self.spec.kappa), "members": self.ranks()}

    @classmethod
    def from_json(cls, obj: dict) -> "SubsetFamily":
        spec = Multislice.from_json(obj)
        if "members" not in obj:
            raise MultisliceError("subset object has no 'members' field")
        return cls.from_ranks(spec, obj["members"])


def _require_nonempty(A: SubsetFamily) -> None:
    if not A.members.any():
        raise MultisliceError("expansion is undefined for the empty set")


def boundary_count(A: SubsetFamily) -> int:
    """``#{(u, tau) : u in A, u^tau not in A}``."""
    table = A.spec.transposition_table
    inside = A.members
    return int((~inside[table[:, inside]]).sum())


def expansion_exact(A: SubsetFamily) -> Fraction:
    _require_nonempty(A)
    pairs = len(A.spec.transpositions)
    return Fraction(boundary_count(A), A.size * pairs)


def expansion_spectral(A: SubsetFamily) -> float:
    """``<(I - T) 1_A, 1_A> / vol(A)`` with ``T`` the transposition average."""
    _require_nonempty(A)
    one_a = A.indicator()
    t_one_a = transposition_average(one_a)
    return float((one_a - t_one_a).inner(one_a) / (A.size / A.spec.size))


def hoffman_bound(alpha, n: int):
    """Lower bound ``2 (1 - alpha) / (n - 1)`` on the expansion of a set of volume ``alpha``."""
    if n < 2:
        raise MultisliceError("need n >= 2")
    if not 0 < alpha <= 1:
        raise MultisliceError(f"volume must lie in (0, 1], got {alpha}")
    if isinstance(alpha, (Fraction, int)):
        return Fraction(2) * (1 - Fraction(alpha)) / (n - 1)
    return 2 * (1 - alpha) / (n - 1)


def dictator_set(spec: Multislice, j: int, S) -> SubsetFamily:
    """``{u : u_j in S}`` for a 1-based coordinate and a set of 1-based colors."""
    if not 1 <= j <= spec.n:
        raise MultisliceError(f"coordinate {j} out of range 1..{spec.n}")
    S = set(S)
    if any(not 1 <= i <= spec.colors for i in S):
        raise MultisliceError(f"colors must lie in 1..{spec.colors}")
    lookup = np.zeros(spec.colors, dtype=bool)
    lookup[[i - 1 for i in S]] = True
    return SubsetFamily(spec, lookup[spec.codes[:, j - 1]])


def _color_subsets(ell: int) -> list[frozenset[int]]:
    # ordered by bitmask: {}, {1}, {2}, {1,2}, ...
    return [frozenset(i + 1 for i in range(ell) if mask >> i & 1) for mask in range(2 ** ell)]


def all_dictator_sets(spec: Multislice) -> Iterator[tuple[int, frozenset[int], SubsetFamily]]:
    for j in range(1, spec.n + 1):
        for S in _color_subsets(spec.colors):
            yield j, S, dictator_set(spec, j, S)


def identify_dictator(A: SubsetFamily) -> tuple[int, frozenset[int]] | None:
    """Return ``(j, S)`` with ``A = {u : u_j in S}``, or None."""
    codes = A.spec.codes
    for j in range(A.spec.n):
        col = codes[:, j]
        S = frozenset(int(c) + 1 for c in np.unique(col[A.members]))
        lookup = np.zeros(A.spec.colors, dtype=bool)
        lookup[[i - 1 for i in S]] = True
        if np.array_equal(lookup[col], A.members):
            return j + 1, S
    return None


# -- stability -----------------------------------------------------------------

@dataclass
class StabilityReport:
    alpha: Fraction
    expansion: Fraction
    bound: Fraction
    slack: Fraction
    delta: float
    delta_bound: float
    nearest_dictator: tuple[int, frozenset[int]]
    symmetric_difference_volume: Fraction
    tol: float = 1e-9

    @property
    def within_bound(self) -> bool:
        return self.delta <= self.delta_bound + self.tol

    def to_json(self) -> dict:
        j, S = self.nearest_dictator
        return {
            "alpha": str(self.alpha),
            "expansion": str(self.expansion),
            "expansion_float": float(self.expansion),
            "bound": str(self.bound),
            "slack": str(self.slack),
            "delta": self.delta,
            "delta_bound": self.delta_bound,
            "nearest_dictator": {"coordinate": j, "colors": sorted(S)},
            "symmetric_difference_volume": str(self.symmetric_difference_volume),
            "within_bound": self.within_bound,
        }


def nearest_dictator_set(A: SubsetFamily) -> tuple[tuple[int, frozenset[int]], int]:
    """Dictator set minimising ``|A xor B|``; ties go to the smallest ``j``, then smallest color mask."""
    spec = A.spec
    best = None
    for j in range(1, spec.n + 1):
        col = spec.codes[:, j - 1]
        for S in _color_subsets(spec.colors):
            lookup = np.zeros(spec.colors, dtype=bool)
            lookup[[i - 1 for i in S]] = True
            diff = int((lookup[col] != A.members).sum())
            if best is None or diff < best[1]:
                best = ((j, S), diff)
    return best


def stability_report(A: SubsetFamily, check: bool = True, tol: float = 1e-9) -> StabilityReport:
    """Compare ``A`` with the isoperimetric bound and the nearest dictator set.

    ``delta`` is the mass of ``1_A`` above degree one. With ``check`` set,
    raises :class:`InvariantViolation` if it exceeds
    ``n alpha (1 - alpha) slack / (n - 2)``.
    """
    _require_nonempty(A)
    n = A.spec.n
    if n < 3:
        raise MultisliceError("stability report needs n >= 3")
    alpha = A.volume
    phi = expansion_exact(A)
    bound = hoffman_bound(alpha, n)
    slack = phi / bound - 1 if bound > 0 else Fraction(0)
    delta = high_degree_mass(A.indicator())
    delta_bound = float(n * alpha * (1 - alpha) * slack / (n - 2))
    nearest, diff = nearest_dictator_set(A)
    report = StabilityReport(
        alpha, phi, bound, slack, delta, delta_bound, nearest, Fraction(diff, A.spec.size), tol
    )
    if check and not report.within_bound:
        raise InvariantViolation(f"delta={delta} exceeds bound {delta_bound} for kappa={A.spec.kappa}")
    return report


# -- exhaustive search ---------------------------------------------------------

class SearchResult(NamedTuple):
    min_expansion: Fraction
    minimizers: list[SubsetFamily]
    candidates: int


def exhaustive_min_expansion(
    spec: Multislice,
    m: int,
    max_candidates: int = DEFAULT_MAX_CANDIDATES,
    max_domain: int = DEFAULT_SEARCH_DOMAIN,
) -> SearchResult:
    """Minimum expansion over all ``m``-element subsets, with every minimiser.

    Depth-first over combinations with incremental inner-edge counts; the
    last element is chosen in one vectorised step. Sets larger than half the
    domain are searched through their complements, which have the same cut.
    """
    N = spec.size
    if not 1 <= m <= N:
        raise MultisliceError(f"subset size must lie in 1..{N}")
    candidates = math.comb(N, m)
    if candidates > max_candidates:
        raise BudgetExceeded(f"C({N}, {m}) = {candidates} candidates exceeds budget {max_candidates}")
    if N > max_domain:
        raise BudgetExceeded(f"search needs a dense {N}x{N} count matrix; budget is {max_domain}")
    pairs = len(spec.transpositions)
    if m == N:
        return SearchResult(Fraction(0), [SubsetFamily(spec, np.ones(N, dtype=bool))], 1)

    k = min(m, N - m)
    flip = k != m
    W = transposition_counts(spec)
    diag = np.diag(W).copy()
    best_cut = None
    found: list[tuple[int, ...]] = []

    def visit(start: int, chosen: list[int], acc: np.ndarray, weight: int) -> None:
        nonlocal best_cut, found
        if len(chosen) == k - 1:
            cuts = k * pairs - (weight + 2 * acc[start:] + diag[start:])
            low = int(cuts.min())
            if best_cut is None or low < best_cut:
                best_cut, found = low, []
            if low == best_cut:
                for s in np.flatnonzero(cuts == low):
                    found.append(tuple(chosen) + (start + int(s),))
            return
        for s in range(start, N - (k - 1 - len(chosen))):
            visit(s + 1, chosen + [s], acc + W[s], weight + 2 * int(acc[s]) + int(diag[s]))

    visit(0, [], np.zeros(N, dtype=np.int64), 0)
    minimizers = []
    for combo in found:
        mask = np.zeros(N, dtype=bool)
        mask[list(combo)] = True
        minimizers.append(SubsetFamily(spec, ~mask if flip else mask))
    return SearchResult(Fraction(best_cut, m * pairs), minimizers, candidates)


# -- sampling ------------------------------------------------------------------

class MonteCarloEstimate(NamedTuple):
    estimate: float
    stderr: float
    samples: int


def monte_carlo_expansion(A: SubsetFamily, samples: int, seed) -> MonteCarloEstimate:
    """Estimate the expansion by sampling ``u`` from ``A`` and a random transposition."""
    _require_nonempty(A)
    if samples < 1:
        raise MultisliceError("need at least one sample")
    rng = np.random.default_rng(seed)
    ranks = np.flatnonzero(A.members)
    u = ranks[rng.integers(len(ranks), size=samples)]
    t = rng.integers(len(A.spec.transpositions), size=samples)
    exits = ~A.members[A.spec.transposition_table[t, u]]
    p = float(exits.mean())
    stderr = float(exits.std(ddof=1) / math.sqrt(samples)) if samples > 1 else float("nan")
    return MonteCarloEstimate(p, stderr, samples)
