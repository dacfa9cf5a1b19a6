"""The random-transposition average and its eigenvalues.

Averaging a function over all transpositions of coordinates is a symmetric
operator whose eigenvalues are indexed by partitions dominating kappa.
"""
from multislice import Multislice
from multislice.spectral import frobenius_eigenvalue, spectrum

for kappa in [(2, 2), (3, 2, 1)]:
    rep = spectrum(Multislice(kappa))
    print(f"kappa = {kappa}: {sum(g.dimension for g in rep.groups)} eigenvalues, max error {rep.max_error:.1e}")
    for g in rep.groups:
        shapes = ", ".join(str(p) for p in g.partitions)
        print(f"  {str(g.eigenvalue):>6}  x{g.dimension:<4} {shapes}")

# Two shapes can share an eigenvalue.
print("c(3,3) =", frobenius_eigenvalue((3, 3)), " c(4,1,1) =", frobenius_eigenvalue((4, 1, 1)))

# Gap below the top two eigenvalues.
for n in (6, 10, 20):
    print(f"n = {n}: 1 - c(n-1,1) = {1 - frobenius_eigenvalue((n - 1, 1))}, "
          f"1 - c(n-2,2) = {1 - frobenius_eigenvalue((n - 2, 2))}")
