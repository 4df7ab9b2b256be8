"""Evaluate the main estimates on a random monotone linear operator in R^2.

Directions are drawn where the shifted support function is finite, so each
estimate is exercised with finite sides.  All slacks should be nonnegative.
"""
import numpy as np

from fitzkit import PairedPoint, graph_hull
from fitzkit.fitz import estimate_m2, estimate_m3, estimate_m4, estimate_m7, estimate_main, gap
from fitzkit.harness import gen_linear_monotone
from fitzkit.harness.sampling import finite_gap_points, finite_support_directions

rng = np.random.default_rng(7)
T = gen_linear_monotone(2, 7, singular_prob=0.0)
print("A =", np.round(T.A, 3).tolist(), " b =", np.round(T.b, 3).tolist())
hull = graph_hull(T)
candidates = [PairedPoint.from_flat(p) for p in finite_support_directions(T, rng, 64)]

for zf in finite_gap_points(T, rng, 4):
    z = PairedPoint.from_flat(zf)
    p = PairedPoint.from_flat(finite_support_directions(T, rng, 1)[0])
    t = float(rng.uniform(0, 3))
    print(f"\nz = {np.round(z.flat, 3).tolist()}  gap = {gap(T, z):.4g}")
    for name, rep in [
        ("main", estimate_main(T, z, p, t)),
        ("m2", estimate_m2(T, z, p, t)),
        ("m3", estimate_m3(T, z, candidates)),
        ("m4", estimate_m4(T, z, p)),
        ("m7", estimate_m7(T, z, hull)),
    ]:
        print(f"  {name:4s} lhs={rep.lhs:<12.5g} rhs={rep.rhs:<12.5g} slack={rep.slack:<12.5g} ok={rep.passed}")
