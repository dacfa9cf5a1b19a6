"""Functions on a multislice and their degree-one analysis."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .core import Multislice, MultisliceError, rank

DEFAULT_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class FunctionTable:
    """A real function on ``spec``, stored as its values in rank order."""

    spec: Multislice
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.shape != (self.spec.size,):
            raise MultisliceError(
                f"expected {self.spec.size} values for kappa={self.spec.kappa}, got shape {values.shape}"
            )
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @classmethod
    def from_callable(cls, spec: Multislice, fn: Callable[[tuple[int, ...]], float]) -> "FunctionTable":
        words = spec.codes + 1
        return cls(spec, [fn(tuple(int(c) for c in w)) for w in words])

    @classmethod
    def constant(cls, spec: Multislice, c: float) -> "FunctionTable":
        return cls(spec, np.full(spec.size, float(c)))

    def mean(self) -> float:
        return float(self.values.mean())

    def norm_sq(self) -> float:
        return float(np.mean(self.values ** 2))

    def inner(self, other: "FunctionTable") -> float:
        _same_spec(self, other)
        return float(np.mean(self.values * other.values))

    def __call__(self, u: Sequence[int]) -> float:
        return float(self.values[rank(self.spec, u)])

    def __add__(self, other):
        if isinstance(other, FunctionTable):
            _same_spec(self, other)
            return FunctionTable(self.spec, self.values + other.values)
        return FunctionTable(self.spec, self.values + other)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return FunctionTable(self.spec, -self.values)

    def __mul__(self, other):
        if isinstance(other, FunctionTable):
            _same_spec(self, other)
            return FunctionTable(self.spec, self.values * other.values)
        return FunctionTable(self.spec, self.values * other)

    __rmul__ = __mul__

    def to_json(self) -> dict:
        return {"kappa": list(self.spec.kappa), "values": self.values.tolist()}

    @classmethod
    def from_json(cls, obj: dict) -> "FunctionTable":
        spec = Multislice.from_json(obj)
        if "values" not in obj:
            raise MultisliceError("function table object has no 'values' field")
        return cls(spec, obj["values"])


def _same_spec(f: FunctionTable, g: FunctionTable) -> None:
    if f.spec != g.spec:
        raise MultisliceError(f"functions live on different multislices: {f.spec.kappa} vs {g.spec.kappa}")


def _check_coord(spec: Multislice, j: int) -> None:
    if not 1 <= j <= spec.n:
        raise MultisliceError(f"coordinate {j} out of range 1..{spec.n}")


def _check_color(spec: Multislice, i: int) -> None:
    if not 1 <= i <= spec.colors:
        raise MultisliceError(f"color {i} out of range 1..{spec.colors}")


def indicator_x(spec: Multislice, j: int, i: int) -> FunctionTable:
    """The Boolean variable ``x_ji = 1[u_j = i]``."""
    _check_coord(spec, j)
    _check_color(spec, i)
    return FunctionTable(spec, (spec.codes[:, j - 1] == i - 1).astype(float))


def transposition_average(f: FunctionTable) -> FunctionTable:
    """Average of ``f(u^tau)`` over all ``n choose 2`` transpositions ``tau``."""
    table = f.spec.transposition_table
    return FunctionTable(f.spec, f.values[table].mean(axis=0))


def design_matrix(spec: Multislice) -> np.ndarray:
    """Columns ``1, x_11, ..., x_1l, x_21, ..., x_nl`` (redundant on purpose)."""
    onehot = spec.codes[:, :, None] == np.arange(spec.colors)[None, None, :]
    return np.hstack([np.ones((spec.size, 1)), onehot.reshape(spec.size, -1).astype(float)])


@lru_cache(maxsize=32)
def _degree1_basis(spec: Multislice) -> np.ndarray:
    # orthonormal basis of the column span of the design matrix, constants removed
    X = design_matrix(spec)[:, 1:]
    X = X - X.mean(axis=0)
    U, s, _ = np.linalg.svd(X, full_matrices=False)
    keep = s > s[0] * max(X.shape) * np.finfo(float).eps
    return U[:, keep]


class LevelDecomposition(NamedTuple):
    f0: float
    f1: FunctionTable
    high: FunctionTable


def degree1_projection(f: FunctionTable) -> LevelDecomposition:
    """Split ``f`` into its mean, pure degree-one part and the remainder.

    ``f0 + f1`` is the least-squares fit of ``f`` by ``{1} u {x_ji}``.
    """
    f0 = f.mean()
    centered = f.values - f0
    Q = _degree1_basis(f.spec)
    f1 = Q @ (Q.T @ centered)
    return LevelDecomposition(f0, FunctionTable(f.spec, f1), FunctionTable(f.spec, centered - f1))


def high_degree_mass(f: FunctionTable) -> float:
    return degree1_projection(f).high.norm_sq()


def is_degree_one(f: FunctionTable, tol: float = DEFAULT_TOL) -> bool:
    return high_degree_mass(f) <= tol


# -- normal form ---------------------------------------------------------------

@dataclass(frozen=True)
class Degree1Form:
    """``c + sum_j sum_i c_ji x_ji`` with zero row and column sums, exact rationals."""

    constant: Fraction
    coeffs: tuple[tuple[Fraction, ...], ...]

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.coeffs), len(self.coeffs[0])

    def coeff_array(self) -> np.ndarray:
        return np.array([[float(c) for c in row] for row in self.coeffs])

    def is_centered(self) -> bool:
        rows = all(sum(row) == 0 for row in self.coeffs)
        cols = all(sum(col) == 0 for col in zip(*self.coeffs))
        return rows and cols

    def table(self, spec: Multislice) -> FunctionTable:
        if self.shape != (spec.n, spec.colors):
            raise MultisliceError(f"form has shape {self.shape}, multislice needs {(spec.n, spec.colors)}")
        C = self.coeff_array()
        vals = float(self.constant) + C[np.arange(spec.n)[None, :], spec.codes].sum(axis=1)
        return FunctionTable(spec, vals)

    def to_json(self) -> dict:
        return {"constant": float(self.constant), "coeffs": self.coeff_array().tolist()}

    @classmethod
    def from_json(cls, obj: dict) -> "Degree1Form":
        try:
            constant = _to_fraction(obj["constant"])
            coeffs = tuple(tuple(_to_fraction(c) for c in row) for row in obj["coeffs"])
        except (KeyError, TypeError, ValueError) as exc:
            raise MultisliceError(f"malformed degree-one form: {exc}") from exc
        return cls(constant, coeffs)


def _to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x)
    return Fraction(float(x))


def normal_form(c, raw, spec: Multislice) -> Degree1Form:
    """Center an arbitrary affine representation ``c + sum raw[j][i] x_ji``.

    Uses ``sum_i x_ji = 1`` and ``sum_j x_ji = kappa_i`` to move row and
    column means into the constant. All arithmetic is exact.
    """
    n, ell = spec.n, spec.colors
    R = [[_to_fraction(v) for v in row] for row in np.asarray(raw, dtype=object).tolist()]
    if len(R) != n or any(len(row) != ell for row in R):
        raise MultisliceError(f"coefficient matrix must be {n}x{ell}")
    row_mean = [sum(row) / ell for row in R]
    grand = sum(row_mean) / n
    col_shift = [sum(R[j][i] for j in range(n)) / n - grand for i in range(ell)]
    constant = _to_fraction(c) + sum(row_mean) + sum(b * k for b, k in zip(col_shift, spec.kappa))
    coeffs = tuple(
        tuple(R[j][i] - row_mean[j] - col_shift[i] for i in range(ell)) for j in range(n)
    )
    return Degree1Form(constant, coeffs)


def fit_degree1_form(f: FunctionTable) -> Degree1Form:
    """Normal form of the degree-one part ``f^{<=1}`` (least squares, then centering)."""
    spec = f.spec
    coef, *_ = np.linalg.lstsq(design_matrix(spec), f.values, rcond=None)
    return normal_form(coef[0], coef[1:].reshape(spec.n, spec.colors), spec)


def evaluate_form(form: Degree1Form, u: Sequence[int]) -> float:
    n, ell = form.shape
    if len(u) != n:
        raise MultisliceError(f"form expects words of length {n}, got {len(u)}")
    total = form.constant
    for j, color in enumerate(u):
        if not 1 <= color <= ell:
            raise MultisliceError(f"color {color} out of range 1..{ell}")
        total += form.coeffs[j][color - 1]
    return float(total)


# -- influences and equivalent spans ---------------------------------------------

def influence(f: FunctionTable, j1: int, j2: int) -> float:
    """``E[(f(u) - f(u^(j1 j2)))^2]`` for 1-based coordinates ``j1 != j2``."""
    spec = f.spec
    _check_coord(spec, j1)
    _check_coord(spec, j2)
    if j1 == j2:
        raise MultisliceError("influence needs two distinct coordinates")
    a, b = sorted((j1 - 1, j2 - 1))
    t = spec.transpositions.index((a, b))
    perm = spec.transposition_table[t]
    return float(np.mean((f.values - f.values[perm]) ** 2))


def influences(f: FunctionTable) -> np.ndarray:
    """Symmetric ``n x n`` matrix of all pairwise influences (zero diagonal)."""
    spec = f.spec
    out = np.zeros((spec.n, spec.n))
    diffs = f.values[None, :] - f.values[spec.transposition_table]
    vals = np.mean(diffs ** 2, axis=1)
    for (a, b), v in zip(spec.transpositions, vals):
        out[a, b] = out[b, a] = v
    return out


class Degree1Spans(NamedTuple):
    polynomial: np.ndarray
    junta: np.ndarray


def junta_degree_one_span(spec: Multislice) -> Degree1Spans:
    """Generating sets for the two combinatorial definitions of degree one.

    ``polynomial``: ``1`` and ``x_ji`` for colors ``i < l`` (the last color is
    eliminated through ``x_jl = 1 - sum_{i<l} x_ji``).
    ``junta``: every Boolean dictator ``1[u_j in S]``, ``S`` a subset of colors.
    """
    codes = spec.codes
    poly = [np.ones(spec.size)]
    for j in range(spec.n):
        for i in range(spec.colors - 1):
            poly.append((codes[:, j] == i).astype(float))
    junta = []
    for j in range(spec.n):
        for mask in product((False, True), repeat=spec.colors):
            junta.append(np.asarray(mask)[codes[:, j]].astype(float))
    return Degree1Spans(np.column_stack(poly), np.column_stack(junta))


def degree_one_dimension(spec: Multislice) -> int:
    return (spec.n - 1) * (spec.colors - 1) + 1


def span_rank(*mats: np.ndarray, rtol: float = 1e-8) -> int:
    """Numerical rank of the side-by-side columns, relative to the largest singular value."""
    s = np.linalg.svd(np.hstack(mats), compute_uv=False)
    return int(np.sum(s > rtol * s[0]))
