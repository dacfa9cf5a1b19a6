"""Edge expansion under random transpositions.

Sets of the form {u : u_j in S} leave through as few transposition edges as
any set of their volume can. An exhaustive search confirms it on a small
case; a perturbed dictator set shows how the slack grows.
"""
from fractions import Fraction

from multislice import Multislice
from multislice.spectral import (
    SubsetFamily,
    dictator_set,
    exhaustive_min_expansion,
    expansion_exact,
    hoffman_bound,
    identify_dictator,
    monte_carlo_expansion,
    stability_report,
)

spec = Multislice((3, 3))
A = dictator_set(spec, 1, {1})
print(f"A = {{u : u_1 = 1}} on {spec.kappa}: volume {A.volume}, expansion {expansion_exact(A)}, "
      f"bound {hoffman_bound(A.volume, spec.n)}")
mc = monte_carlo_expansion(A, 20_000, seed=1)
print(f"  Monte Carlo: {mc.estimate:.4f} +- {mc.stderr:.4f}")

res = exhaustive_min_expansion(Multislice((2, 2)), 3)
print(f"(2,2), |A| = 3: {res.candidates} candidates, minimum {res.min_expansion}, minimisers:")
for B in res.minimizers:
    j, S = identify_dictator(B)
    print(f"  ranks {B.ranks()}  = {{u : u_{j} in {sorted(S)}}}")

mask = A.members.copy()
mask[-1] = True
rep = stability_report(SubsetFamily(spec, mask))
print(f"A plus one point: expansion {rep.expansion} (slack {rep.slack}), "
      f"high mass {rep.delta:.4f} <= {rep.delta_bound:.4f}")
print(f"  nearest dictator set {rep.nearest_dictator[0]}, {sorted(rep.nearest_dictator[1])}, "
      f"at symmetric difference {rep.symmetric_difference_volume} = {Fraction(1, spec.size)}")
