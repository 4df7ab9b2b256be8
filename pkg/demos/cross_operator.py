"""The union of the two coordinate axes in R x R.

This graph is not monotone, yet its Fitzpatrick function is the indicator of
the origin, which dominates the coupling everywhere.  The script tabulates a
few values, shows that the domain of T is the whole line while the domain of
phi_T is a single point, and prints a small gap landscape.
"""
import numpy as np

from fitzkit import fitzpatrick, gap, is_monotone, pp
from fitzkit.harness import cross_operator, grid_rows
from fitzkit.opmodel import domain_hull

T = cross_operator()
print("monotone:", is_monotone(T).monotone, " witness pair:", is_monotone(T).witness)
for z in [pp(0, 0), pp(1, 0), pp(0, 1), pp(-2, 3)]:
    print(f"phi{tuple(z.flat.tolist())} = {fitzpatrick(T, z)}   gap = {gap(T, z)}")

dh = domain_hull(T)
print("conv D(T): points", dh.points.tolist(), "rays", dh.rays.tolist())

print("\ngap on a 5 x 5 window ('.' marks +inf):")
rows = list(grid_rows(T, (-2, 2, -2, 2), 5))
for i in range(5):
    line = rows[5 * i: 5 * i + 5]
    print("  " + " ".join("." if np.isinf(r[4]) else f"{r[4]:g}" for r in line))
