"""
Fourier blocks versus the dense operator
========================================

The spectrum of U on 6N states is the union of the spectra of N blocks of
size 6.  We compare both, and the closed-form eigenvalues, for one coin.
"""

import numpy as np

from dihedral_walk import build_evolution, coin_from_theta
from dihedral_walk.fourier import block_spectra, eigen_closed_form, multiset_distance

coin = coin_from_theta("W", 0.9)
n = 12

dense = np.linalg.eigvals(build_evolution(coin, n).matrix)
blocks = block_spectra(coin, n)
union = np.concatenate([s.eigenvalues for s in blocks])
print(f"dense vs block union:  {multiset_distance(dense, union):.2e}")

closed = np.concatenate([eigen_closed_form("W", coin, n, k).eigenvalues for k in range(n)])
print(f"closed form vs blocks: {multiset_distance(closed, union):.2e}")

# every eigenvalue lies on the unit circle
print(f"max ||lambda| - 1|:    {np.abs(np.abs(union) - 1).max():.2e}")

for s in blocks[:3]:
    print(s.k, np.round(s.phases, 4))
