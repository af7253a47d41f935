"""The scalar limit pair (b, a) at rho = 1/4 as products over exact zeros.

Builds the pair, checks the fixed-point residual and the zeros of a,
and prints a small table of values.
"""

import numpy as np

from goldrg.golden import parse_golden
from goldrg.limits import fixed_point
from goldrg.rg import RgOptions, r3n_series

rho = parse_golden("1/4")
fp = fixed_point(rho, n=2, cutoff=2000.0)
print(f"{len(fp.b.zeros)} zeros for b, {len(fp.a.zeros)} for a below the cutoff")
print(f"b(0) = {float(fp.b(0.0)):.6f}, a(0) = {float(fp.a(0.0)):.6f}")

xs = np.linspace(-0.5, 0.5, 201)
rb, ra = fp.residual(xs)
print(f"fixed-point residual on [-1/2, 1/2]: b {rb:.2e}, a {ra:.2e}")
print("smallest positive zero of a:", fp.a.smallest_zero())

# %% a short table
for x in (0.0, 0.1, 0.2, 0.25, 0.3, 0.5):
    print(f"  x = {x:4.2f}   b = {float(fp.b(x)): .6f}   a = {float(fp.a(x)): .6f}")

# %% the matrix pair b K^dagger, a K is fixed by the series renormalization too
P = fp.to_pair()
Q = r3n_series(P, RgOptions(n=2, L_choice="S", normalization="none"))
print(f"matrix fixed point: ||R(P) - P|| / ||P|| = {P.distance(Q) / P.norm():.2e}")
