"""Distance to Booleanity, best dictator approximations and noisy-dictator experiments."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, field
from itertools import product
from typing import Iterator

import numpy as np

from .core import Multislice, MultisliceError
from .harmonic import FunctionTable, degree1_projection, high_degree_mass, normal_form

_TIE = 1e-12


class NotBoolean(MultisliceError):
    pass


@dataclass(frozen=True)
class DictatorFn:
    """``g(u) = colormap[u_j - 1]``; a constant colormap gives a constant function."""

    coordinate: int
    colormap: tuple[int, ...]

    @property
    def is_constant(self) -> bool:
        return len(set(self.colormap)) == 1

    def table(self, spec: Multislice) -> FunctionTable:
        lookup = np.asarray(self.colormap, dtype=float)
        return FunctionTable(spec, lookup[spec.codes[:, self.coordinate - 1]])

    def __call__(self, u) -> int:
        return self.colormap[u[self.coordinate - 1] - 1]


def all_dictators(spec: Multislice) -> Iterator[DictatorFn]:
    for j in range(1, spec.n + 1):
        for cmap in product((0, 1), repeat=spec.colors):
            yield DictatorFn(j, cmap)


@dataclass
class FknReport:
    epsilon: float
    dictator: DictatorFn
    closeness: float
    mode: str

    @property
    def ratio(self) -> float:
        return _ratio(self.closeness, self.epsilon)

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "epsilon": self.epsilon,
            "closeness": self.closeness,
            "ratio": self.ratio,
            "dictator": {"coordinate": self.dictator.coordinate, "colormap": list(self.dictator.colormap)},
        }


def _ratio(closeness: float, eps: float) -> float:
    if eps > 0:
        return closeness / eps
    return 0.0 if closeness <= _TIE else math.inf


def dist_to_boolean_sq(f: FunctionTable) -> float:
    v = f.values
    return float(np.mean(np.minimum(v ** 2, (v - 1) ** 2)))


def round_to_boolean(f: FunctionTable) -> FunctionTable:
    """Pointwise nearest value in {0, 1}; exactly 1/2 rounds up."""
    return FunctionTable(f.spec, (f.values >= 0.5).astype(float))


def is_boolean(f: FunctionTable) -> bool:
    return bool(np.all((f.values == 0) | (f.values == 1)))


def _best_dictator(f: FunctionTable) -> tuple[DictatorFn, float]:
    # per coordinate the colors partition the domain, so the optimal colormap
    # is chosen color by color
    spec, v = f.spec, f.values
    N = spec.size
    best: tuple[DictatorFn, float] | None = None
    for j in range(spec.n):
        col = spec.codes[:, j]
        cnt = np.bincount(col, minlength=spec.colors)
        s1 = np.bincount(col, weights=v, minlength=spec.colors)
        s2 = np.bincount(col, weights=v * v, minlength=spec.colors)
        # cost(b) - cost(0) = cnt * b - 2 * b * s1, so b = 1 iff mean > 1/2
        cmap = (2 * s1 > cnt).astype(int)
        cost = float(np.sum(s2 - 2 * cmap * s1 + cmap * cnt) / N)
        if best is None or cost < best[1] - _TIE:
            best = (DictatorFn(j + 1, tuple(int(b) for b in cmap)), max(cost, 0.0))
    return best


def best_dictator_l2(f: FunctionTable) -> FknReport:
    """Boolean dictator minimising ``E[(f - g)^2]``, against ``eps = E[dist(f, {0,1})^2]``.

    Ties go to color value 0 and then to the smallest coordinate.
    """
    g, cost = _best_dictator(f)
    return FknReport(dist_to_boolean_sq(f), g, cost, "l2")


def best_dictator_hamming(F: FunctionTable) -> FknReport:
    """Boolean dictator minimising ``Pr[F != g]``, against ``eps = ||F^{>1}||^2``."""
    if not is_boolean(F):
        raise NotBoolean("Hamming mode needs a {0,1}-valued function")
    g, _ = _best_dictator(F)
    disagree = float(np.mean(F.values != g.table(F.spec).values))
    return FknReport(high_degree_mass(F), g, disagree, "hamming")


# -- experiments -----------------------------------------------------------------

NOISE_MODELS = ("uniform", "flip", "none")

CSV_COLUMNS = (
    "trial", "epsilon", "closeness", "ratio", "dictator_coord", "colormap",
    "planted_coord", "planted_colormap", "boolean_epsilon", "disagreement", "boolean_ratio",
)


@dataclass
class TrialRow:
    trial: int
    epsilon: float
    closeness: float
    ratio: float
    dictator_coord: int
    colormap: str
    planted_coord: int
    planted_colormap: str
    boolean_epsilon: float
    disagreement: float
    boolean_ratio: float


@dataclass
class ExperimentResult:
    kappa: tuple[int, ...]
    noise: str
    seed: int
    rows: list[TrialRow] = field(default_factory=list)

    @property
    def max_ratio(self) -> float:
        return max((r.ratio for r in self.rows), default=0.0)

    def fitted_constant(self) -> float:
        """Smallest ``C >= 0`` with ``disagreement <= 4 eps + C eps^2`` on every row."""
        C = 0.0
        for r in self.rows:
            excess = r.disagreement - 4 * r.boolean_epsilon
            if excess <= _TIE:
                continue
            if r.boolean_epsilon <= _TIE:
                return math.inf
            C = max(C, excess / r.boolean_epsilon ** 2)
        return C

    def summary(self) -> dict:
        return {
            "kappa": list(self.kappa),
            "noise": self.noise,
            "seed": self.seed,
            "trials": len(self.rows),
            "max_ratio": self.max_ratio,
            "fitted_C": self.fitted_constant(),
        }

    def to_json(self) -> dict:
        return {**self.summary(), "rows": [asdict(r) for r in self.rows]}

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for r in self.rows:
            writer.writerow({k: _fmt(v) for k, v in asdict(r).items()})
        return buf.getvalue()


def _fmt(v):
    return repr(v) if isinstance(v, float) else v


def _centered_noise(spec: Multislice, rng: np.random.Generator) -> np.ndarray:
    # uniform noise on normal-form coefficients, re-centred so the result is exactly degree one
    raw = rng.uniform(-1.0, 1.0, size=(spec.n, spec.colors))
    form = normal_form(rng.uniform(-1.0, 1.0), raw, spec)
    return form.table(spec).values


def fkn_experiment(
    spec: Multislice,
    trials: int,
    seed: int,
    noise: str = "uniform",
    eps_range: tuple[float, float] = (1e-4, 1e-2),
    max_resample: int = 50,
) -> ExperimentResult:
    """Perturb random Boolean dictators and measure how close the best dictator stays.

    ``uniform``: ``f = g + t p`` with ``p`` a random centred degree-one
    function and ``t`` chosen so that ``E[dist(f, {0,1})^2]`` equals a target
    drawn log-uniformly from ``eps_range``; the Boolean variant is ``round(f)``.
    ``flip``: ``F`` is ``g`` with about ``target * |domain|`` points flipped
    (at least one) and ``f = F^{<=1}``.
    ``none``: ``f = g``.

    Trial ``k`` draws from ``SeedSequence(seed).spawn(trials)[k]``, so every
    row depends only on ``(seed, k)``.
    """
    if noise not in NOISE_MODELS:
        raise MultisliceError(f"unknown noise model {noise!r}; choose from {NOISE_MODELS}")
    lo, hi = eps_range
    if not 0 < lo <= hi:
        raise MultisliceError("eps_range must satisfy 0 < lo <= hi")
    result = ExperimentResult(spec.kappa, noise, seed)
    codes = spec.codes
    N = spec.size
    for k, child in enumerate(np.random.SeedSequence(seed).spawn(trials)):
        rng = np.random.default_rng(child)
        j = int(rng.integers(spec.n)) + 1
        while True:
            cmap = tuple(int(b) for b in rng.integers(0, 2, size=spec.colors))
            if len(set(cmap)) > 1:
                break
        planted = np.asarray(cmap, dtype=float)[codes[:, j - 1]]
        target = float(10 ** rng.uniform(math.log10(lo), math.log10(hi)))

        if noise == "uniform":
            for _ in range(max_resample):
                p = _centered_noise(spec, rng)
                t = math.sqrt(target / np.mean(p ** 2))
                if np.max(np.abs(t * p)) < 0.5:
                    break
            else:
                raise RuntimeError(f"could not draw noise below rounding threshold for target {target}")
            f = FunctionTable(spec, planted + t * p)
            F = round_to_boolean(f)
        elif noise == "flip":
            flips = max(1, round(target * N))
            vals = planted.copy()
            idx = rng.choice(N, size=flips, replace=False)
            vals[idx] = 1 - vals[idx]
            F = FunctionTable(spec, vals)
            dec = degree1_projection(F)
            f = dec.f1 + dec.f0
        else:
            f = FunctionTable(spec, planted)
            F = f

        rep = best_dictator_l2(f)
        brep = best_dictator_hamming(F)
        result.rows.append(TrialRow(
            trial=k,
            epsilon=rep.epsilon,
            closeness=rep.closeness,
            ratio=rep.ratio,
            dictator_coord=rep.dictator.coordinate,
            colormap="".join(map(str, rep.dictator.colormap)),
            planted_coord=j,
            planted_colormap="".join(map(str, cmap)),
            boolean_epsilon=brep.epsilon,
            disagreement=brep.closeness,
            boolean_ratio=brep.ratio,
        ))
    return result
