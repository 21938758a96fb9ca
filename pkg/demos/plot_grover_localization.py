"""
Localization of the Grover walk
===============================

The walker starts at vertex (1, 0) of Cay(D_50, {a, b}) and we average the
vertex distribution over 300 steps for a few initial coin states.
"""

import numpy as np

from dihedral_walk import InitialCondition, grover_coin, limit_time_avg, time_avg_direct

n, T = 50, 300
states = {
    "|0>": InitialCondition.basis(0, 1, 0),
    "|1>": InitialCondition.basis(1, 1, 0),
    "|2>": InitialCondition.basis(2, 1, 0),
    "uniform": InitialCondition.uniform(1, 0),
}

# a uniformly spread walker would sit at 1/(2N) everywhere
print(f"uniform level 1/(2N) = {1 / (2 * n):.4f}")
for label, init in states.items():
    res = time_avg_direct(grover_coin(), n, init, T)
    top = res.ranked_vertices()[:3]
    print(f"{label:8s}", "  ".join(f"({v.s},{v.r}) {res.at(*v):.4f}" for v in top))

###############################################################################
# The long-time limit keeps a finite weight at the start vertex as N grows.

for n in (8, 16, 50):
    lim = limit_time_avg(grover_coin(), n, InitialCondition.basis(2, 1, 0))
    print(f"N={n:3d}  limit P(1,0) = {lim.at(1, 0):.4f}")

###############################################################################
# Pipe any of these to a plotting tool as CSV.

print(time_avg_direct(grover_coin(), 6, states["uniform"], T).to_csv())
print(np.round(lim.pbar[:5], 4))
