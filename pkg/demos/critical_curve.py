"""The critical curve eps(delta) of the scaled almost Mathieu family.

For each delta, bisection of the sign-count rotation number brackets the
plateau where rot = rho, and the stable-manifold residual pins down eps
inside it. At rho = 1/4 symmetry puts the curve at eps = 0.
"""

import numpy as np

from goldrg.curves import critical_curve, limit_epsilon
from goldrg.golden import parse_golden

for text in ("1/4", "3/8"):
    rho = parse_golden(text)
    print(f"rho = {text}: limit eps(0) = {limit_epsilon(float(rho)):+.12f}")
    for delta in np.arange(0.1, 0.35, 0.1):
        p = critical_curve(rho, float(delta))
        print(
            f"  delta = {delta:.1f}  eps = {p.epsilon:+.15f}  plateau width = {p.plateau_width:.2e}  [{p.method}]"
        )
