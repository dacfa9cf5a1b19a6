"""Noisy dictators.

Plant a dictator g, add a small centered degree-one perturbation and measure
how far the best dictator is from f compared with f's distance to the
Boolean functions. A second run flips single points of g instead.
"""
import sys

from multislice import Multislice
from multislice.fkn import fkn_experiment

for kappa in [(3, 3), (2, 2, 2)]:
    spec = Multislice(kappa)
    for noise in ("uniform", "flip"):
        res = fkn_experiment(spec, 300, seed=7, noise=noise)
        s = res.summary()
        print(f"{kappa} {noise:>7}: max closeness/epsilon {s['max_ratio']:.4f}, fitted C {s['fitted_C']:.3g}")

res = fkn_experiment(Multislice((3, 3)), 5, seed=7)
print("\nfirst rows as CSV:")
sys.stdout.write(res.to_csv())
