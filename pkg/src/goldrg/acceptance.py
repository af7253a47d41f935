"""Quantitative acceptance checks, shared by the test suite and `goldrg verify`.

Each check returns a CheckResult with the measured numbers; thresholds are
fixed here and restated in tests/test_acceptance.py.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .cocycle import Rank1Scalar, Schrodinger, golden_skew, lyapunov, rotation_lift, rotation_sign_count
from .curves import critical_curve, ids_limit
from .golden import (
    GOLDEN_ALPHA,
    HALF,
    ONE,
    ZERO,
    ALPHA,
    fibonacci,
    fib_q,
    parse_golden,
    period_candidates,
    pisano_period,
)
from .limits import FixedPointPair, fixed_point, verify_scaling_limit
from .rg import (
    X0,
    RgOptions,
    direct_log_singular_ratio,
    iterate,
    scaled_am_pair,
    unstable_eigenvalue,
)
from .cocycle import ScaledSchrodinger
from .zeros import EMPTY, ZeroPair, ZeroSet, gaps, run_until_periodic, window, zero_step

RHO = parse_golden("1/4")
CUTOFF = 2000.0


@dataclass
class CheckResult:
    number: int
    title: str
    passed: bool
    measured: dict = field(default_factory=dict)
    seconds: float = 0.0
    budget: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        within = "" if self.seconds <= self.budget else f" (over {self.budget:g}s budget)"
        summary = ", ".join(f"{k}={_fmt(v)}" for k, v in self.measured.items())
        return f"[{status}] {self.number:2d} {self.title}: {summary} [{self.seconds:.2f}s{within}]"


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.6g}"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_fmt(x) for x in v) + "]"
    return str(v)


def _timed(number, title, budget):
    def deco(fn):
        def run() -> CheckResult:
            t = time.perf_counter()
            passed, measured = fn()
            return CheckResult(number, title, bool(passed), measured, time.perf_counter() - t, budget)

        run.__name__ = fn.__name__
        run.number = number
        return run

    return deco


@lru_cache(maxsize=None)
def limit_pair(cutoff: float = CUTOFF) -> FixedPointPair:
    n = run_until_periodic(RHO).n
    return fixed_point(RHO, n, cutoff)


@_timed(1, "Fibonacci identity p_k - q_k a = (-a)^(k+1), k <= 30", 1.0)
def check_identity():
    bad = [k for k in range(1, 31) if fibonacci(k) - fib_q(k) * GOLDEN_ALPHA != (-GOLDEN_ALPHA) ** (k + 1)]
    return not bad, {"failures": len(bad)}


@_timed(2, "Lyapunov exponent, lambda=3", 1.0)
def check_lyapunov():
    G = golden_skew(Schrodinger(3.0, 0.0))
    L = lyapunov(G, fibonacci(24), 0.0)
    return abs(L - math.log(3)) < 0.02, {"L": L, "error": abs(L - math.log(3))}


@_timed(3, "Rotation number, lambda=3, E=0", 2.0)
def check_rotation():
    G = golden_skew(Schrodinger(3.0, 0.0))
    N = fibonacci(24)
    rs = float(rotation_sign_count(G, N))
    rl = rotation_lift(G, N)
    ok = abs(rs - 0.25) < 1e-3 and abs(rl - rs) <= 1.0 / N
    return ok, {"sign_count": rs, "lift": rl, "diff_times_N": abs(rl - rs) * N}


@_timed(4, "Limit family rotation and IDS", 10.0)
def check_limit_family():
    N = fibonacci(20)
    worst_rot, worst_ids = 0.0, 0.0
    for i in range(11):
        rho = 0.05 + 0.04 * i
        eps = -2 * math.cos(2 * math.pi * rho)
        # symmetric factor -eps - 2cos(2 pi x), shifted by half a step
        fac = Rank1Scalar(lambda x, e=eps: -e - 2 * np.cos(2 * np.pi * (x + ALPHA / 2)))
        rot = float(rotation_sign_count(golden_skew(fac), N))
        worst_rot = max(worst_rot, abs(rot - rho))
        worst_ids = max(worst_ids, abs(ids_limit(eps) - 2 * rot))
    ok = worst_rot < 1e-3 and worst_ids < 2.0 / N
    return ok, {"max_rot_error": worst_rot, "max_ids_error": worst_ids, "2/N": 2.0 / N}


@_timed(5, "Zero dynamics for rho = 1/4", 5.0)
def check_zero_dynamics():
    res = run_until_periodic(RHO)
    at_most_one = all(len(z) <= 1 for z in res.orbitA + res.orbitB)
    # full scaled sets from the seed {rho}: gaps are 1 or 1/alpha
    allowed = {ONE, ONE + GOLDEN_ALPHA}
    P = ZeroPair(EMPTY, ZeroSet.from_points([RHO]))
    gap_ok = True
    for _ in range(4):
        P = zero_step(P)
        gap_ok &= set(gaps(P.A)) <= allowed
    ell = pisano_period(4)
    congruent = fibonacci(3 * res.n - 1) % 4 == 1 and fibonacci(3 * res.n) % 4 == 0
    consistent = congruent and res.n in period_candidates(RHO, 3 * ell) and ell == 6
    P = ZeroPair(EMPTY, ZeroSet.from_points([ZERO]))
    control = True
    for _ in range(10):
        P = zero_step(P, prune=HALF)
        control &= window(P.A, HALF) == ZeroSet.from_points([ZERO])
    ok = at_most_one and gap_ok and consistent and control
    return ok, {"n": res.n, "at_most_one": at_most_one, "gaps_ok": gap_ok, "congruences": consistent, "rho0_control": control}


@_timed(6, "Fixed-point residual of the limit pair", 30.0)
def check_fixed_point():
    fp = limit_pair()
    xs = np.linspace(-0.5, 0.5, 201)
    rb, ra = fp.residual(xs)
    return max(rb, ra) < 1e-6, {"residual_b": rb, "residual_a": ra, "cutoff": fp.a.cutoff}


@_timed(7, "Zeros of a in [-1/2, 1/2]", 5.0)
def check_zero_locations():
    fp = limit_pair()
    inside = [z for z in fp.a.zeros if z <= HALF]
    exact = inside == [RHO]
    xs = np.linspace(-0.5, 0.5, 20001)
    vals = fp.a(xs)
    nz = vals != 0.0
    xs_nz, s = xs[nz], np.sign(vals[nz])
    flips = 0.5 * (xs_nz[:-1] + xs_nz[1:])[s[:-1] != s[1:]]
    numeric = len(flips) == 2 and np.allclose(np.abs(flips), 0.25, atol=1e-4)
    at_zero = float(fp.a(0.25)) == 0.0 and float(fp.a(-0.25)) == 0.0
    return exact and numeric and at_zero, {"zeros": [str(z) for z in inside], "sign_changes": len(flips)}


@_timed(8, "Critical curve at rho = 1/4", 60.0)
def check_critical_curve():
    eps = {}
    for d in (0.1, 0.2, 0.3):
        eps[d] = critical_curve(RHO, d, 1e-6).epsilon
    worst = max(abs(e) for e in eps.values())
    return worst < 1e-6, {"max_abs_eps": worst}


@_timed(9, "Supercritical collapse, delta = 0.2", 120.0)
def check_collapse():
    delta = 0.2
    eps = critical_curve(RHO, delta, 1e-6).epsilon
    n = run_until_periodic(RHO).n
    traj = iterate(scaled_am_pair(delta, eps), 4, RgOptions(n=n, L_choice="S", normalization="norm"))
    logs = [r["log_singular_ratio_A"] for r in traj.records[1:]]
    monotone = all(b < a for a, b in zip(logs, logs[1:]))
    total = logs[0] - logs[-1]
    G = golden_skew(ScaledSchrodinger(delta, eps))
    xs = X0 + np.linspace(-0.2, 0.2, 101)
    direct_dev = 0.0
    for k in (2, 4):
        d = float(direct_log_singular_ratio(G, None, n, k, xs).max())
        direct_dev = max(direct_dev, abs(d - logs[k - 1]) / abs(d))
    var = [r["ratio_variance"] for r in traj.records[1:]]
    rates = [b / a for a, b in zip(var, var[1:])]
    target = ALPHA ** (12 * n / 2)
    rate_ok = all(abs(r / target - 1) < 0.25 for r in rates)
    ok = monotone and total >= math.log(10) and direct_dev < 1e-6 and rate_ok
    return ok, {
        "log_ratio": logs,
        "direct_rel_dev": direct_dev,
        "variance_rates": rates,
        "alpha^(6n)": target,
    }


@_timed(10, "Unstable eigenvalue", 120.0)
def check_unstable():
    n = run_until_periodic(RHO).n
    opts = RgOptions(n=n, L_choice="S", normalization="norm")
    lam = unstable_eigenvalue(lambda e: scaled_am_pair(0.2, e), opts, float(RHO), 0.0, h=1e-7, k=3)
    target = ALPHA ** (-3 * n)
    return abs(lam / target - 1) < 0.05, {"estimate": lam, "alpha^(-3n)": target}


@_timed(11, "Scaling limits of Fibonacci products", 300.0)
def check_scaling_limit():
    delta = 0.2
    eps = critical_curve(RHO, delta, 1e-6).epsilon
    lam = 1.0 / delta
    G = golden_skew(Schrodinger(lam, lam * eps))
    n = run_until_periodic(RHO).n
    rep = verify_scaling_limit(G, n, 6, 0.5, limit_pair())
    e = rep.errors
    decreasing = len(e) >= 3 and all(b < a for a, b in zip(e, e[1:]))
    slope = rep.slope("M")
    slope_ok = abs(slope / -rep.lyapunov - 1) < 0.1
    return decreasing and slope_ok, {"errors": e, "slope_M": slope, "slope_W": rep.slope("W"), "L": rep.lyapunov}


CHECKS = [
    check_identity,
    check_lyapunov,
    check_rotation,
    check_limit_family,
    check_zero_dynamics,
    check_fixed_point,
    check_zero_locations,
    check_critical_curve,
    check_collapse,
    check_unstable,
    check_scaling_limit,
]

SUITES = {
    "golden": [1],
    "cocycle": [2, 3, 4],
    "zeros": [5],
    "limits": [6, 7],
    "curves": [8],
    "rg": [9, 10],
    "scaling": [11],
    "fast": [1, 2, 3, 4, 5, 6, 7, 8, 10],
    "all": list(range(1, 12)),
}


def run_suite(name: str = "all") -> list[CheckResult]:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    wanted = set(SUITES[name])
    return [chk() for chk in CHECKS if chk.number in wanted]
