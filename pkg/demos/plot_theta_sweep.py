"""
Sweeping the coin angle
=======================

Time-averaged probability at a few vertices as theta runs over 60 points of
[-pi, pi].  Extremal values sit near the angles where the coin is a signed
permutation.
"""

import numpy as np

from dihedral_walk import InitialCondition, signed_permutation_angles
from dihedral_walk.localize import extremum_offsets, sweep_theta

vertices = [(0, 0), (0, 1), (1, 0)]
for cls in "XYZW":
    sw = sweep_theta(cls, 60, 50, InitialCondition.uniform(0, 0), 500, vertices, parallel=True)
    angles = signed_permutation_angles(cls)
    print(cls)
    for v in vertices:
        off = extremum_offsets(sw, v, angles)
        series = sw.series(v)
        print(f"  {v}: range [{series.min():.4f}, {series.max():.4f}]",
              " ".join(f"{a:+.3f}->{d:.2f}" for a, d in off.items()))

###############################################################################
# The sweep serializes to CSV with one row per (theta, vertex).

print(sw.to_csv().splitlines()[:4])
print(np.round(sw.values[:5], 4))
