"""Rotation numbers of the scaled family and the critical curve eps(delta).

The scaled almost Mathieu factor [[v(x) - eps, -delta], [delta, 0]] with
v(x) = -2cos(2 pi x) tends, as delta -> 0, to a rank-one factor whose
rotation number is rho = arccos(-eps/2)/(2 pi). For delta > 0 the set of eps
with rotation number rho is located in two stages: bisection of the sign
count brackets it to the resolution of the finite orbit, and the root of
the stable-manifold residual a_A(rho) (the a-entry of the renormalized A at
rho) pins it down inside that bracket.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np
from scipy.optimize import brentq

from .cocycle import ScaledSchrodinger, am_potential, golden_skew, rotation_sign_count
from .golden import GoldenNumber, fibonacci, format_golden
from .rg import RgOptions, r3n_series, scaled_am_pair
from .zeros import run_until_periodic


class CurveError(RuntimeError):
    pass


@dataclass
class CurvePoint:
    delta: float
    epsilon: float
    rho_target: GoldenNumber
    residual: float
    bracket: tuple
    plateau_width: float = 0.0
    method: str = "bisection"
    check_bracket: Optional[tuple] = None
    details: dict = field(default_factory=dict)

    def to_row(self) -> dict:
        return {
            "delta": self.delta,
            "epsilon": self.epsilon,
            "residual": self.residual,
            "plateau_width": self.plateau_width,
        }

    def to_json(self) -> dict:
        return {
            "delta": self.delta,
            "epsilon": self.epsilon,
            "rho": format_golden(self.rho_target),
            "residual": self.residual,
            "bracket": list(self.bracket),
            "plateau_width": self.plateau_width,
            "method": self.method,
            "check_bracket": list(self.check_bracket) if self.check_bracket else None,
        }


def ids_limit(eps: float, potential: Callable = am_potential, samples: int = 4096) -> float:
    """Measure of {x in [0, 1): v(x) <= eps}.

    Closed form for the cosine potential; otherwise sign changes of v - eps
    on a grid are refined by Brent's method.
    """
    if potential is am_potential:
        if eps <= -2:
            return 0.0
        if eps >= 2:
            return 1.0
        return math.acos(-eps / 2) / math.pi
    g = lambda x: float(potential(x)) - eps
    xs = np.linspace(0.0, 1.0, samples + 1)
    vals = np.asarray(potential(xs), dtype=float) - eps
    total = 0.0
    start = 0.0 if vals[0] <= 0 else None
    for i in range(samples):
        if (vals[i] <= 0) != (vals[i + 1] <= 0):
            root = brentq(g, xs[i], xs[i + 1], xtol=1e-15) if vals[i] != 0 and vals[i + 1] != 0 else xs[i]
            if vals[i] <= 0:
                total += root - start
                start = None
            else:
                start = root
    if start is not None:
        total += 1.0 - start
    return total


def limit_rotation(eps: float) -> float:
    """Rotation number of the delta -> 0 limit factor: arccos(-eps/2)/(2 pi)."""
    if not -2.0 <= eps <= 2.0:
        raise ValueError("eps must lie in [-2, 2]")
    return math.acos(-eps / 2) / (2 * math.pi)


def limit_epsilon(rho: float) -> float:
    return -2.0 * math.cos(2 * math.pi * rho)


def measured_rotation(delta: float, eps: float, N: int) -> Fraction:
    return rotation_sign_count(golden_skew(ScaledSchrodinger(delta, eps)), N)


def stable_manifold_residual(delta: float, eps: float, rho: GoldenNumber, k: int, n: Optional[int] = None,
                             opts: Optional[RgOptions] = None) -> float:
    """a-entry at rho of the k-times renormalized A of the scaled pair (series path)."""
    if n is None:
        n = run_until_periodic(rho).n
    opts = opts or RgOptions(n=n, L_choice="S", normalization="norm")
    P = scaled_am_pair(delta, eps)
    for _ in range(k):
        P = r3n_series(P, opts)
    return float(P.A(float(rho))[0, 0])


def _edge(f, lo: float, hi: float, pred, tol: float) -> float:
    """Boundary between pred false (at lo) and pred true (at hi) by bisection."""
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if pred(f(mid)):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def rotation_bracket(delta: float, rho: Fraction, N: int, lo: float, hi: float, tol: float):
    """Interval of eps where the sign-count rotation at N is within one count of rho."""
    step = Fraction(1, 2 * N)
    cache: dict = {}

    def f(e):
        if e not in cache:
            cache[e] = measured_rotation(delta, e, N) - rho
        return cache[e]

    f_lo, f_hi = f(lo), f(hi)
    if not (f_lo < -step and f_hi > step):
        raise CurveError("no crossing in bracket")
    e_lo = _edge(f, lo, hi, lambda v: v >= -step, tol)
    e_hi = _edge(f, lo, hi, lambda v: v > step, tol)
    samples = sorted(cache.items())
    # finite-orbit counts are monotone only up to one count
    if any(b[1] < a[1] - step for a, b in zip(samples, samples[1:])):
        raise CurveError("rotation number not monotone in eps on the bracket")
    return e_lo, e_hi


def _nested_roots(g, start: float, lo: float, hi: float, k_max: int, tol: float) -> dict:
    """Roots of g(., k) for k = 1..k_max, each searched next to the previous one.

    The residual expands by the unstable eigenvalue per level, so it is only
    monotone in a neighbourhood of the critical point that shrinks with k; the
    bracket is grown outward from the previous root (from `start` for k = 1)
    until g changes sign.
    """
    roots: dict = {}
    xtol, rtol = min(tol * 1e-3, 1e-15), 4 * np.finfo(float).eps
    centre = start
    for k in range(1, k_max + 1):
        f = lambda e, k=k: g(e, k)
        fc = f(centre)
        if fc == 0.0:
            roots[k] = centre
            continue
        half = max(1e-12, 8 * rtol * abs(centre))
        while True:
            a, b = max(lo, centre - half), min(hi, centre + half)
            if f(a) * fc < 0:
                b = centre
                break
            if f(b) * fc < 0:
                a = centre
                break
            if a == lo and b == hi:
                return roots
            half *= 4
        centre = brentq(f, a, b, xtol=xtol, rtol=rtol)
        roots[k] = centre
    return roots


def critical_curve(rho: GoldenNumber, delta: float, tol: float = 1e-6, N: Optional[int] = None,
                   N_check: Optional[int] = None, k_max: int = 3, n_max: int = 4,
                   delta_max: float = 0.5) -> CurvePoint:
    """eps(delta) with rotation number rho for the scaled almost Mathieu family."""
    if not 0 <= delta < delta_max:
        raise ValueError(f"delta must lie in [0, {delta_max})")
    rho_f = float(rho)
    eps0 = limit_epsilon(rho_f)
    if delta == 0:
        return CurvePoint(0.0, eps0, rho, 0.0, (eps0, eps0), 0.0, "limit")
    N = N or fibonacci(26)
    N_check = N_check or fibonacci(24)
    rho_q = Fraction(rho.a) if rho.b == 0 else Fraction(rho_f)
    # between the limit rotations at eps -+ 2 delta, by operator comparison
    lo, hi = max(-2.0, eps0 - 2 * delta - 0.05), min(2.0, eps0 + 2 * delta + 0.05)
    edge_tol = min(tol, 1e-6) * 1e-2
    e_lo, e_hi = rotation_bracket(delta, rho_q, N, lo, hi, edge_tol)
    c_lo, c_hi = rotation_bracket(delta, rho_q, N_check, lo, hi, edge_tol)
    eps, method, details = 0.5 * (e_lo + e_hi), "plateau-midpoint", {}
    try:
        n = run_until_periodic(rho).n
    except (ValueError, RuntimeError):
        n = None
    if n is not None and n <= n_max:
        roots = _nested_roots(lambda e, k: stable_manifold_residual(delta, e, rho, k, n), eps, lo, hi, k_max, tol)
        details["roots"] = roots
        if roots:
            k_best = max(roots)
            # plateaus at different N may not nest when rho has an alpha component
            if min(e_lo, c_lo) <= roots[k_best] <= max(e_hi, c_hi):
                eps, method = roots[k_best], f"stable-manifold k={k_best}"
            else:
                method = "plateau-midpoint (stable-manifold root outside plateau)"
        details["n"] = n
    residual = float(abs(measured_rotation(delta, eps, N) - rho_q))
    return CurvePoint(delta, float(eps), rho, residual, (e_lo, e_hi), e_hi - e_lo, method, (c_lo, c_hi), details)
