"""Degree-one functions and their normal form.

x_ji is the indicator that coordinate j carries color i. Affine combinations
of these are many-to-one, so the library reduces them to a unique form whose
coefficient matrix has zero row and column sums.
"""
import numpy as np

from multislice import Multislice
from multislice.harmonic import (
    FunctionTable,
    degree1_projection,
    degree_one_dimension,
    fit_degree1_form,
    indicator_x,
    normal_form,
)

spec = Multislice((2, 2, 2))
print(f"kappa = {spec.kappa}; degree-one space has dimension {degree_one_dimension(spec)}")

form = normal_form(0, [[1, 0, 0]] + [[0, 0, 0]] * 5, spec)
print("normal form of x_11:")
print(f"  constant {form.constant}")
for row in form.coeffs:
    print("  " + "  ".join(f"{str(c):>6}" for c in row))

# x_11 * x_21 is not degree one: part of its mass sits above degree one.
g = indicator_x(spec, 1, 1) * indicator_x(spec, 2, 1)
f0, f1, high = degree1_projection(g)
print(f"x_11 x_21: E = {f0:.4f}, degree-one mass {f1.norm_sq():.4f}, high mass {high.norm_sq():.4f}")
print(f"  Parseval: {g.norm_sq():.4f} = {f0**2 + f1.norm_sq() + high.norm_sq():.4f}")

# Fitting recovers a planted form up to reparametrisation.
rng = np.random.default_rng(0)
planted = normal_form(0.5, rng.normal(size=(spec.n, spec.colors)), spec)
fitted = fit_degree1_form(planted.table(spec))
gap = np.abs(fitted.coeff_array() - planted.coeff_array()).max()
print(f"refit of a random degree-one table: max coefficient difference {gap:.1e}")
