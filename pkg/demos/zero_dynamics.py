"""Zero sets under renormalization, computed exactly in Q[alpha].

Start from a single zero at rho = 1/4 in the A-factor and watch the
windowed states cycle, then grow the full sets and look at their gaps.
"""

from goldrg.golden import HALF, format_golden, parse_golden
from goldrg.zeros import EMPTY, ZeroPair, ZeroSet, gap_multiset, run_until_periodic, window, zero_step

rho = parse_golden("1/4")

# %% windowed states on [-1/2, 1/2]
res = run_until_periodic(rho)
print(f"period n = {res.n}, preperiod = {res.preperiod}")
for k, (A, B) in enumerate(zip(res.orbitA, res.orbitB)):
    print(f"  step {k}: A = {A.to_json()}, B = {B.to_json()}")

# %% unpruned sets: |A_k| = q_{3k}, |B_k| = p_{3k}, gaps 1 and 1/alpha
P = ZeroPair(EMPTY, ZeroSet.from_points([rho]))
for k in range(1, 5):
    P = zero_step(P)
    gaps = {format_golden(g): c for g, c in gap_multiset(P.A).items()}
    print(f"step {k}: |A| = {len(P.A):4d}, |B| = {len(P.B):4d}, gaps of A: {gaps}")

# %% control: a zero at the origin is a fixed point of the windowed dynamics
Q = ZeroPair(EMPTY, ZeroSet.from_points([parse_golden("0")]))
for _ in range(6):
    Q = zero_step(Q, prune=HALF)
print("rho = 0 after 6 steps:", window(Q.A, HALF).to_json())
