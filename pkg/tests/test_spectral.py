from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest

from multislice.core import BudgetExceeded, InvariantViolation, Multislice, MultisliceError
from multislice.harmonic import design_matrix, span_rank
from multislice.spectral import (
    SubsetFamily,
    all_dictator_sets,
    dictator_set,
    exhaustive_min_expansion,
    expansion_exact,
    expansion_spectral,
    frobenius_eigenvalue,
    hoffman_bound,
    identify_dictator,
    is_partition,
    majorizes,
    monte_carlo_expansion,
    partitions,
    partitions_majorizing,
    spectral_degree_one_basis,
    spectrum,
    stability_report,
    transposition_counts,
    transposition_operator,
)

from oracles import expansion_bruteforce, words


# -- partitions and eigenvalues --------------------------------------------------

def test_partition_counts():
    # p(n) for n = 1..12
    assert [sum(1 for _ in partitions(n)) for n in range(1, 13)] == [1, 2, 3, 5, 7, 11, 15, 22, 30, 42, 56, 77]
    assert all(is_partition(p) for p in partitions(9))
    assert not is_partition((1, 2))


def test_partitions_majorizing_examples():
    assert partitions_majorizing((1, 1)) == [(2,), (1, 1)]
    assert partitions_majorizing((2, 1)) == [(3,), (2, 1)]
    assert partitions_majorizing((2, 2, 2)) == [(6,), (5, 1), (4, 2), (4, 1, 1), (3, 3), (3, 2, 1), (2, 2, 2)]


def test_partitions_majorizing_bruteforce():
    for kappa in [(3, 2, 1), (2, 2, 2, 1), (4, 1, 1, 1), (3, 3, 2)]:
        n = sum(kappa)
        expected = [p for p in partitions(n) if majorizes(p, kappa)]
        assert partitions_majorizing(kappa) == expected
        assert all(len(p) <= len(kappa) for p in expected)
    # order of kappa is irrelevant
    assert partitions_majorizing((1, 2, 3)) == partitions_majorizing((3, 2, 1))


def test_frobenius_examples():
    for n in range(2, 12):
        assert frobenius_eigenvalue((n,)) == 1
        assert frobenius_eigenvalue((n - 1, 1)) == 1 - Fraction(2, n - 1)
    assert frobenius_eigenvalue((4, 1)) == Fraction(1, 2)
    assert frobenius_eigenvalue((3, 3)) == Fraction(1, 5)
    assert frobenius_eigenvalue((4, 1, 1)) == Fraction(1, 5)
    assert frobenius_eigenvalue((2, 2, 2)) == Fraction(-1, 5)
    with pytest.raises(MultisliceError):
        frobenius_eigenvalue((1, 2))
    with pytest.raises(MultisliceError):
        frobenius_eigenvalue((3, 1), 5)


def test_frobenius_strictly_monotone_in_dominance():
    for n in range(2, 11):
        ps = list(partitions(n))
        for lam, mu in combinations(ps, 2):
            if majorizes(lam, mu):
                assert frobenius_eigenvalue(lam) > frobenius_eigenvalue(mu)
            elif majorizes(mu, lam):
                assert frobenius_eigenvalue(mu) > frobenius_eigenvalue(lam)
    chain = [(6,), (5, 1), (4, 2), (3, 3)]
    values = [frobenius_eigenvalue(p) for p in chain]
    assert values == sorted(values, reverse=True) and len(set(values)) == 4


def test_second_below_gap_is_four_over_n():
    # the partition just below (n-1, 1) gives 1 - c = 4/n
    for n in range(4, 30):
        assert 1 - frobenius_eigenvalue((n - 2, 2)) == Fraction(4, n)


# -- spectrum ------------------------------------------------------------------

def test_transposition_operator_is_symmetric_stochastic():
    spec = Multislice((2, 2, 1))
    T = transposition_operator(spec).toarray()
    np.testing.assert_allclose(T, T.T)
    np.testing.assert_allclose(T.sum(axis=1), 1.0)
    W = transposition_counts(spec)
    np.testing.assert_array_equal(W, W.T)
    np.testing.assert_allclose(W / len(spec.transpositions), T)


def _dims(report):
    return {g.eigenvalue: g.dimension for g in report.groups}


def test_spectrum_examples():
    rep = spectrum(Multislice((1, 1)))
    assert rep.ok and _dims(rep) == {1: 1, -1: 1}
    rep = spectrum(Multislice((2, 1)))
    assert rep.ok and _dims(rep) == {1: 1, 0: 2}
    T = transposition_operator(Multislice((2, 1))).toarray()
    np.testing.assert_allclose(T, np.full((3, 3), 1 / 3))
    rep = spectrum(Multislice((2, 2, 2)))
    assert rep.ok and len(rep.groups) == 6
    merged = [g for g in rep.groups if g.eigenvalue == Fraction(1, 5)][0]
    assert set(merged.partitions) == {(3, 3), (4, 1, 1)}


@pytest.mark.parametrize("kappa", [(2, 2), (3, 2), (2, 1, 1), (3, 3), (2, 2, 1, 1), (4, 2, 1)])
def test_constants_are_the_top_eigenspace(kappa):
    rep = spectrum(Multislice(kappa))
    assert rep.groups[0].eigenvalue == 1 and rep.groups[0].dimension == 1
    assert sum(g.dimension for g in rep.groups) == Multislice(kappa).size


def test_spectrum_budget():
    with pytest.raises(BudgetExceeded):
        spectrum(Multislice((3, 3, 3)), max_domain=1000)


@pytest.mark.parametrize("kappa", [(2, 2), (3, 2, 1), (1, 1, 1, 1)])
def test_spectral_basis_matches_polynomial_span(kappa):
    spec = Multislice(kappa)
    Q = spectral_degree_one_basis(spec)
    X = design_matrix(spec)
    d = (spec.n - 1) * (spec.colors - 1) + 1
    assert Q.shape[1] == d
    assert span_rank(Q, X) == d


def test_spectral_basis_sparse_path():
    spec = Multislice((3, 3, 2))
    Q = spectral_degree_one_basis(spec, dense_limit=10)
    assert Q.shape[1] == (spec.n - 1) * 2 + 1
    assert span_rank(Q, design_matrix(spec)) == Q.shape[1]


# -- expansion -----------------------------------------------------------------

def test_expansion_examples():
    spec = Multislice((2, 1))
    full = SubsetFamily(spec, np.ones(3, dtype=bool))
    assert expansion_exact(full) == 0
    assert expansion_spectral(full) == pytest.approx(0, abs=1e-12)
    A = SubsetFamily.from_predicate(spec, lambda u: u[0] == 1)
    assert expansion_exact(A) == Fraction(1, 3)
    assert expansion_spectral(A) == pytest.approx(1 / 3, abs=1e-12)
    single = SubsetFamily.from_ranks(Multislice((2, 2)), [0])
    assert expansion_exact(single) == Fraction(2, 3)
    with pytest.raises(MultisliceError):
        expansion_exact(SubsetFamily(spec, np.zeros(3, dtype=bool)))
    with pytest.raises(MultisliceError):
        expansion_spectral(SubsetFamily(spec, np.zeros(3, dtype=bool)))


@pytest.mark.parametrize("kappa", [(2, 2), (2, 1, 1), (3, 2), (2, 2, 1)])
def test_expansion_against_definition(kappa):
    spec = Multislice(kappa)
    ws = words(kappa)
    rng = np.random.default_rng(17)
    for _ in range(20):
        mask = rng.random(spec.size) < 0.4
        if not mask.any():
            continue
        members = {u for u, m in zip(ws, mask) if m}
        A = SubsetFamily(spec, mask)
        assert expansion_exact(A) == expansion_bruteforce(kappa, lambda u: u in members)


def test_expansion_exhaustive_small():
    # every nonempty subset of three small multislices
    for kappa in [(2, 1), (2, 2), (1, 1, 1)]:
        spec = Multislice(kappa)
        for bits in range(1, 2 ** spec.size):
            mask = np.array([bits >> r & 1 for r in range(spec.size)], dtype=bool)
            A = SubsetFamily(spec, mask)
            phi = expansion_exact(A)
            assert expansion_spectral(A) == pytest.approx(float(phi), abs=1e-9)
            assert phi >= hoffman_bound(A.volume, spec.n)


def test_hoffman_bound():
    assert hoffman_bound(1, 4) == 0
    assert hoffman_bound(Fraction(2, 3), 3) == Fraction(1, 3)
    assert hoffman_bound(Fraction(1, 2), 5) == Fraction(1, 4)
    assert hoffman_bound(0.5, 5) == pytest.approx(0.25)
    with pytest.raises(MultisliceError):
        hoffman_bound(0, 4)
    with pytest.raises(MultisliceError):
        hoffman_bound(Fraction(1, 2), 1)


def test_dictator_set_examples():
    spec = Multislice((2, 1))
    full = dictator_set(spec, 2, {1, 2})
    assert full.size == 3 and expansion_exact(full) == 0
    A = dictator_set(spec, 1, {1})
    assert A.volume == Fraction(2, 3) and expansion_exact(A) == Fraction(1, 3)
    spec = Multislice((2, 2, 2))
    B = dictator_set(spec, 3, {1, 2})
    assert B.volume == Fraction(2, 3)
    assert expansion_exact(B) == Fraction(2, 15) == hoffman_bound(B.volume, 6)
    assert expansion_exact(B) == expansion_bruteforce((2, 2, 2), lambda u: u[2] in (1, 2))
    with pytest.raises(MultisliceError):
        dictator_set(spec, 7, {1})
    with pytest.raises(MultisliceError):
        dictator_set(spec, 1, {4})


def test_identify_dictator():
    spec = Multislice((2, 2, 1))
    for j, S, A in all_dictator_sets(spec):
        if 0 < len(S) < spec.colors:
            jj, SS = identify_dictator(A)
            assert dictator_set(spec, jj, SS) == A
    assert identify_dictator(SubsetFamily.from_ranks(Multislice((2, 2)), [0])) is None


def test_subset_json_roundtrip():
    spec = Multislice((2, 2))
    A = SubsetFamily.from_ranks(spec, [1, 4, 5])
    assert A.to_json() == {"kappa": [2, 2], "members": [1, 4, 5]}
    assert SubsetFamily.from_json(A.to_json()) == A
    with pytest.raises(MultisliceError):
        SubsetFamily.from_json({"kappa": [2, 2], "members": [1, 1]})
    with pytest.raises(MultisliceError):
        SubsetFamily.from_json({"kappa": [2, 2], "members": [6]})


# -- search and stability ---------------------------------------------------------

def test_search_examples():
    res = exhaustive_min_expansion(Multislice((2, 2)), 3)
    assert res.candidates == 20
    assert res.min_expansion == Fraction(1, 3)
    spec = Multislice((2, 2))
    expected = {dictator_set(spec, j, {i}) for j in range(1, 5) for i in (1, 2)}
    assert len(expected) == 8
    assert set(res.minimizers) == expected and len(res.minimizers) == 8

    res = exhaustive_min_expansion(Multislice((2, 1)), 2)
    assert res.min_expansion == Fraction(1, 3)
    expected = {dictator_set(Multislice((2, 1)), j, {1}) for j in range(1, 4)}
    assert set(res.minimizers) == expected


def test_search_full_and_complement_paths():
    spec = Multislice((2, 2, 1))
    assert exhaustive_min_expansion(spec, spec.size).min_expansion == 0
    # sizes above half the domain go through complements; compare with plain enumeration
    spec = Multislice((2, 1, 1))
    for m in (1, 2, 9, 10, 11):
        res = exhaustive_min_expansion(spec, m)
        best = min(
            expansion_exact(SubsetFamily.from_ranks(spec, c)) for c in combinations(range(spec.size), m)
        )
        assert res.min_expansion == best
        assert all(expansion_exact(A) == best and A.size == m for A in res.minimizers)


def test_search_budget():
    with pytest.raises(BudgetExceeded):
        exhaustive_min_expansion(Multislice((3, 3)), 10, max_candidates=1000)
    with pytest.raises(MultisliceError):
        exhaustive_min_expansion(Multislice((2, 2)), 0)


def test_stability_dictator():
    spec = Multislice((3, 3))
    A = dictator_set(spec, 2, {1})
    rep = stability_report(A)
    assert rep.delta == pytest.approx(0, abs=1e-12)
    assert rep.slack == 0
    assert rep.nearest_dictator == (2, frozenset({1}))
    assert rep.symmetric_difference_volume == 0


def test_stability_random_against_oracle():
    from oracles import exact_high_mass

    spec = Multislice((2, 2))
    ws = words((2, 2))
    for combo in combinations(range(6), 3):
        A = SubsetFamily.from_ranks(spec, combo)
        rep = stability_report(A)
        members = {ws[r] for r in combo}
        delta = exact_high_mass((2, 2), lambda u: int(u in members))
        assert rep.delta == pytest.approx(float(delta), abs=1e-12)
        assert rep.within_bound


def test_stability_swapped_dictator():
    spec = Multislice((3, 3))
    B = dictator_set(spec, 1, {1})
    mask = B.members.copy()
    out = int(np.flatnonzero(mask)[0])
    inn = int(np.flatnonzero(~mask)[0])
    mask[out], mask[inn] = False, True
    rep = stability_report(SubsetFamily(spec, mask))
    assert rep.delta <= rep.delta_bound + 1e-9
    assert rep.nearest_dictator == (1, frozenset({1}))
    assert rep.symmetric_difference_volume == Fraction(2, spec.size)


def test_stability_requires_three_points():
    with pytest.raises(MultisliceError):
        stability_report(dictator_set(Multislice((1, 1)), 1, {1}))


def test_stability_check_raises(monkeypatch):
    import multislice.spectral as spectral_mod

    monkeypatch.setattr(spectral_mod, "high_degree_mass", lambda f: 10.0)
    A = SubsetFamily.from_ranks(Multislice((2, 2)), [0, 1])
    with pytest.raises(InvariantViolation):
        stability_report(A)
    assert not stability_report(A, check=False).within_bound


# -- monte carlo ---------------------------------------------------------------

def test_monte_carlo():
    spec = Multislice((2, 1))
    full = SubsetFamily(spec, np.ones(3, dtype=bool))
    assert monte_carlo_expansion(full, 1000, 0).estimate == 0.0
    A = dictator_set(spec, 1, {1})
    est = monte_carlo_expansion(A, 100_000, 42)
    assert abs(est.estimate - 1 / 3) <= 3 * est.stderr
    assert monte_carlo_expansion(A, 5000, 7) == monte_carlo_expansion(A, 5000, 7)
