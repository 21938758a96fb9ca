"""
Periods of the signed-permutation coins
=======================================

Three independent routes to the period: the closed formula, the
eigenvalues of the Fourier blocks and direct powers of U.
"""

import math

from dihedral_walk import coin_from_theta, signed_permutation_angles
from dihedral_walk.period import brute_force_period, spectral_period, theorem_period

print("cls  theta      N  formula      spectral     brute")
for cls in "XYZ":
    for theta in signed_permutation_angles(cls):
        for n in (3, 4, 5, 6):
            coin = coin_from_theta(cls, theta)
            row = (theorem_period(cls, theta, n), spectral_period(coin, n), brute_force_period(coin, n, 200))
            print(f"{cls}   {theta:+.4f}  {n:2d}  " + "  ".join(f"{str(r):11s}" for r in row))

###############################################################################
# The Grover coin never returns: an eigenphase has a rational cosine 1/3,
# which no rational multiple of pi can produce.

from dihedral_walk import grover_coin

print(spectral_period(grover_coin(), 4))
print(brute_force_period(grover_coin(), 4, 10_000, mode="eigen"))
print(theorem_period("X", math.pi, 4).to_json())
