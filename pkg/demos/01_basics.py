"""Elements of a multislice: counting, ranking and sampling.

A multislice is the set of words of length n over colors 1..l in which
color i appears exactly kappa_i times.
"""
from collections import Counter

from multislice import Multislice, enumerate_elements, rank, sample_uniform, unrank

spec = Multislice((2, 1, 1))
print(f"kappa = {spec.kappa}: n = {spec.n}, {spec.size} elements")

# Lexicographic order, and rank/unrank as its coordinates.
for r, u in enumerate(enumerate_elements(spec)):
    assert rank(spec, u) == r and unrank(spec, r) == u
    print(f"  {r:2d}  {''.join(map(str, u))}")

# Sampling is a seeded shuffle of the sorted word.
draws = Counter(sample_uniform(spec, seed) for seed in range(12_000))
print(f"12000 seeded draws hit {len(draws)} distinct elements; "
      f"counts range {min(draws.values())}..{max(draws.values())} (expected 1000 each)")

# Sizes grow fast; the count is exact even when enumeration is hopeless.
big = Multislice((30, 30, 30))
print(f"kappa = (30, 30, 30) has {big.size:.3e} elements")
