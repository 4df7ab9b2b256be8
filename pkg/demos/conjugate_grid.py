"""Discrete conjugates of a non-convex function.

f has a bump on top of a parabola.  Its conjugate ignores the bump, and the
biconjugate recovers the convex envelope on the primal grid.
"""
import numpy as np

from fitzkit import GridFunction, biconjugate, brute_conjugate, fast_conjugate

x = np.linspace(-2, 2, 41)
f = GridFunction(x, x ** 2 + np.where(np.abs(x) < 0.5, 1.0, 0.0))
s = np.linspace(-5, 5, 201)

fast = fast_conjugate(f, s).values
brute = brute_conjugate(f, s).values
print("max |fast - brute| =", np.max(np.abs(fast - brute)))

env = biconjugate(f, s)
print("\n   x      f(x)    f**(x)")
for xi, fi, gi in zip(x[::4], f.values[::4], env.values[::4]):
    print(f"{xi:5.1f}  {fi:7.3f}  {gi:7.3f}")
