"""Renormalizing the critical almost Mathieu cocycle at delta = 0.2.

The renormalized A collapses onto a rank-one matrix (the singular-value
ratio falls off a cliff), its shape converges to the limit pair, and the
overall scale follows the Lyapunov exponent.
"""

import math

from goldrg.cocycle import Schrodinger, golden_skew
from goldrg.curves import critical_curve
from goldrg.golden import ALPHA, parse_golden
from goldrg.limits import fixed_point, verify_scaling_limit
from goldrg.rg import RgOptions, iterate, scaled_am_pair, unstable_eigenvalue

rho, n, delta = parse_golden("1/4"), 2, 0.2
eps = critical_curve(rho, delta).epsilon
print(f"critical eps at delta = {delta}: {eps:.3e}")

# %% collapse in the analytic picture
opts = RgOptions(n=n, L_choice="S", normalization="norm")
traj = iterate(scaled_am_pair(delta, eps), 4, opts)
for rec in traj.records[1:]:
    print(f"step {rec['step']}: log(s_min/s_max) = {rec['log_singular_ratio_A']:.1f}, "
          f"ratio variance = {rec['ratio_variance']:.3e}")
print(f"variance contraction predicted: alpha^12 = {ALPHA ** 12:.5f}")

# %% the unstable direction
lam = unstable_eigenvalue(lambda e: scaled_am_pair(delta, e), opts, float(rho), h=1e-7, k=3)
print(f"unstable eigenvalue {lam:.3f} vs alpha^-6 = {ALPHA ** -6:.3f}")

# %% Fibonacci products against the limit functions (takes a minute or two)
fp = fixed_point(rho, n, 2000.0)
G = golden_skew(Schrodinger(1 / delta, eps / delta))
rep = verify_scaling_limit(G, n, 6, 0.5, fp)
for k, e in zip(rep.ks, rep.errors):
    print(f"k = {k}: shape error {e:.2e}")
print(f"slope of log M_k: {rep.slope('M'):.6f}, -L = {-rep.lyapunov:.6f}, log 5 = {math.log(5):.6f}")
