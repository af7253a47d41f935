"""Exact propagation of zero sets under renormalization.

If B_o, A_o have zero sets B, A then the renormalized factors have zeros

    B~ = alpha^-3 (B u (A - h) u (A + h))
    A~ = alpha^-3 ((B - h) u (B + h) u (A - 2h) u A u (A + 2h))

with h = alpha^2/2. All sets live in Q[alpha]. A point with |z| > r >= 1/2 is
mapped to a point of modulus > r again, so pruning at any window r >= 1/2
never loses a point that could come back.
"""

from __future__ import annotations

import math
from fractions import Fraction
from collections import Counter
from dataclasses import dataclass
from typing import Iterable

from .golden import (
    ALPHA,
    HALF,
    ZERO,
    GoldenNumber,
    classify_rotation_number,
    fib_q,
    fibonacci,
    format_golden,
    golden_sign,
    parse_golden,
)

class PeriodNotFound(RuntimeError):
    pass


class MonotonicityError(RuntimeError):
    pass


def _value(n0: int, n1: int, d: int) -> float:
    return (n0 + n1 * ALPHA) / d


def _cmp(p, q, d: int) -> int:
    """Exact sign of point p - point q (both over the same denominator d)."""
    return golden_sign(GoldenNumber._raw(p[0] - q[0], p[1] - q[1], d))


def _abs_le(p, r: GoldenNumber, d: int) -> bool:
    """|p/d| <= r, exact."""
    x = GoldenNumber._raw(p[0], p[1], d)
    return golden_sign(r - x) >= 0 and golden_sign(r + x) >= 0


@dataclass(frozen=True)
class ZeroSet:
    """A finite sorted set of exact points (n0 + n1*alpha)/den.

    Membership is decided on the integer pairs, never on floats; floats only
    order the points, with exact comparison wherever two keys are close.
    """

    pairs: tuple
    den: int = 1

    @classmethod
    def build(cls, pairs: Iterable, den: int) -> "ZeroSet":
        uniq = set(pairs)
        keyed = sorted(uniq, key=lambda p: _value(p[0], p[1], den))
        # floats can misorder only points closer than ~1e-9 relative
        for i in range(len(keyed) - 1):
            a, b = keyed[i], keyed[i + 1]
            va, vb = _value(*a, den), _value(*b, den)
            if abs(vb - va) <= 1e-9 * max(1.0, abs(va)) and _cmp(a, b, den) > 0:
                keyed.sort(key=_ExactKey.factory(den))
                break
        return cls(tuple(keyed), den)

    @classmethod
    def from_points(cls, points: Iterable[GoldenNumber]) -> "ZeroSet":
        points = list(points)
        den = 1
        for p in points:
            den = math.lcm(den, p.triple[2])
        pairs = [(p.triple[0] * (den // p.triple[2]), p.triple[1] * (den // p.triple[2])) for p in points]
        return cls.build(pairs, den)

    @property
    def points(self) -> list[GoldenNumber]:
        return [GoldenNumber._raw(n0, n1, self.den) for n0, n1 in self.pairs]

    def floats(self) -> list[float]:
        return [_value(n0, n1, self.den) for n0, n1 in self.pairs]

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.points)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ZeroSet):
            return NotImplemented
        return set(self.points) == set(other.points)

    def __hash__(self):
        return hash(frozenset(self.points))

    def with_den(self, den: int) -> "ZeroSet":
        if den % self.den:
            raise ValueError("new denominator must be a multiple")
        f = den // self.den
        return ZeroSet(tuple((a * f, b * f) for a, b in self.pairs), den)

    def issubset(self, other: "ZeroSet") -> bool:
        d = math.lcm(self.den, other.den)
        return set(self.with_den(d).pairs) <= set(other.with_den(d).pairs)

    def is_symmetric(self) -> bool:
        s = set(self.pairs)
        return all((-a, -b) in s for a, b in s)

    def to_json(self) -> list:
        return [format_golden(p) for p in self.points]

    @classmethod
    def from_json(cls, items) -> "ZeroSet":
        return cls.from_points(parse_golden(s) for s in items)


class _ExactKey:
    __slots__ = ("p", "d")

    def __init__(self, p, d):
        self.p, self.d = p, d

    def __lt__(self, other):
        return _cmp(self.p, other.p, self.d) < 0

    @staticmethod
    def factory(d):
        return lambda p: _ExactKey(p, d)


EMPTY = ZeroSet((), 1)


@dataclass(frozen=True)
class ZeroPair:
    B: ZeroSet
    A: ZeroSet
    step_count: int = 0
    radius: GoldenNumber | None = None  # window the sets are complete on, if known

    def to_json(self) -> dict:
        out = {"B": self.B.to_json(), "A": self.A.to_json(), "step_count": self.step_count}
        if self.radius is not None:
            out["radius"] = format_golden(self.radius)
        return out


def window(Z: ZeroSet, r: GoldenNumber) -> ZeroSet:
    """Z intersected with the closed interval [-r, r]."""
    if golden_sign(r) <= 0:
        raise ValueError("window radius must be positive")
    rf = float(r)
    keep = []
    for p in Z.pairs:
        v = abs(_value(*p, Z.den))
        if v < rf - 1e-9 * max(1.0, rf):
            keep.append(p)
        elif v <= rf + 1e-9 * max(1.0, rf) and _abs_le(p, r, Z.den):
            keep.append(p)
    return ZeroSet(tuple(keep), Z.den)


def _shift_scale(pairs, shift: tuple[int, int]):
    """alpha^-3 (z + shift) on integer pairs; alpha^-3 = 3 + 2 alpha."""
    s0, s1 = shift
    out = []
    for a, b in pairs:
        a, b = a + s0, b + s1
        # (a + b t)(3 + 2t) = 3a + 2b + (2a + b) t after t^2 = 1 - t
        out.append((3 * a + 2 * b, 2 * a + b))
    return out


def zero_step(P: ZeroPair, prune: GoldenNumber | None = None) -> ZeroPair:
    """One renormalization step of the zero sets, exact; optional pruning to [-prune, prune]."""
    den = math.lcm(P.B.den, P.A.den, 2)
    B, A = P.B.with_den(den).pairs, P.A.with_den(den).pairs
    h = den // 2  # alpha^2/2 = (1 - alpha)/2
    hp, hm = (h, -h), (-h, h)
    new_b = _shift_scale(B, (0, 0)) + _shift_scale(A, hm) + _shift_scale(A, hp)
    new_a = (
        _shift_scale(B, hm) + _shift_scale(B, hp)
        + _shift_scale(A, (-2 * h, 2 * h)) + _shift_scale(A, (0, 0)) + _shift_scale(A, (2 * h, -2 * h))
    )
    if prune is not None:
        new_b = _prefilter(new_b, den, prune)
        new_a = _prefilter(new_a, den, prune)
    Bt, At = ZeroSet.build(new_b, den), ZeroSet.build(new_a, den)
    if prune is not None:
        Bt, At = window(Bt, prune), window(At, prune)
    return ZeroPair(_reduce(Bt), _reduce(At), P.step_count + 1)


def _prefilter(pairs, den, r: GoldenNumber):
    lim = float(r) * (1 + 1e-9) + 1e-9
    return [p for p in pairs if abs(_value(*p, den)) <= lim]


def _reduce(Z: ZeroSet) -> ZeroSet:
    g = Z.den
    for a, b in Z.pairs:
        g = math.gcd(g, math.gcd(a, b))
        if g == 1:
            return Z
    if g <= 1 or not Z.pairs:
        return Z if Z.pairs else ZeroSet((), 1)
    return ZeroSet(tuple((a // g, b // g) for a, b in Z.pairs), Z.den // g)


def gaps(Z: ZeroSet) -> list[GoldenNumber]:
    """Consecutive differences of the sorted points, exact."""
    if len(Z) < 2:
        raise ValueError("gaps need at least two points")
    pts = Z.points
    return [pts[i + 1] - pts[i] for i in range(len(pts) - 1)]


def gap_multiset(Z: ZeroSet) -> Counter:
    return Counter(gaps(Z))


@dataclass
class PeriodResult:
    n: int
    orbitA: list
    orbitB: list
    preperiod: int = 0


def _require_periodic(rho: GoldenNumber):
    cls = classify_rotation_number(rho)
    if cls.tag != "PositivePeriodic":
        raise ValueError(f"rotation number {format_golden(rho)} is {cls.tag}, not positive periodic")
    return cls


def run_until_periodic(rho: GoldenNumber, max_steps: int = 200) -> PeriodResult:
    """Least n with the windowed states (A_k(1/2), B_k(1/2)) periodic of period n.

    Seeds B_0 = {}, A_0 = {rho}. Windowing at 1/2 after every step is exact
    because points outside never return.
    """
    _require_periodic(rho)
    P = ZeroPair(EMPTY, ZeroSet.from_points([rho]))
    P = ZeroPair(window(P.B, HALF), window(P.A, HALF))
    seen = {}
    orbitA, orbitB = [], []
    for k in range(max_steps + 1):
        key = (P.A, P.B)
        if key in seen:
            start = seen[key]
            return PeriodResult(k - start, orbitA, orbitB, start)
        seen[key] = k
        orbitA.append(P.A)
        orbitB.append(P.B)
        P = zero_step(P, prune=HALF)
    raise PeriodNotFound("period not found")


def product_form_window(rho: GoldenNumber, n: int, component: str = "A") -> ZeroSet:
    """Windowed zeros alpha^{-3n} Z_n on [-1/2, 1/2] from the explicit product form.

    a_n is a product of a_0 over the q_{3n} translates x + j alpha, |j| <= (q_{3n}-1)/2,
    so its zeros are rho - j alpha (mod 1). b_n uses the p_{3n} half-odd offsets
    (2i+1)/2 alpha and carries an extra half-period shift from its odd translation
    part. Independent of the recursion in zero_step; used to cross-check it.
    """
    if component == "A":
        q = fib_q(3 * n)
        offsets = [Fraction(j) for j in range(-(q - 1) // 2, (q - 1) // 2 + 1)]
        shift = ZERO
    else:
        q = fibonacci(3 * n)
        offsets = [Fraction(2 * i + 1, 2) for i in range(-q // 2, q // 2)]
        shift = HALF
    scale = GoldenNumber(3, 2) ** n
    base = rho + shift
    r, w = float(base), ALPHA ** (3 * n) / 2
    pts = []
    for o in offsets:
        y = r - float(o) * ALPHA
        m = -round(y)
        if abs(y + m) <= w * (1 + 1e-9) + 1e-12:
            z = (base - GoldenNumber(0, o) + m) * scale
            if golden_sign(abs(z) - HALF) <= 0:
                pts.append(z)
    return ZeroSet.from_points(pts)


def seed_periodic_zeros(rho: GoldenNumber, radius: GoldenNumber) -> ZeroSet:
    """(rho + Z) inside [-radius, radius]: zeros of the semi-factor sin(pi(x - rho))."""
    m = int(math.ceil(float(radius))) + 1
    return window(ZeroSet.from_points([rho + j for j in range(-m, m + 1)]), radius)


def period_length(n: int, t: int) -> GoldenNumber:
    """alpha^{-3nt}, the period of the zero sets after t blocks."""
    return GoldenNumber(3, 2) ** (n * t)


def blocks_needed(n: int, radius: float, margin: float = 1.0) -> int:
    """Smallest t with alpha^{-3nt}/2 > radius + margin (limit sets are then complete on the window)."""
    t = 0
    while ALPHA ** (-3 * n * t) / 2 <= radius + margin:
        t += 1
    return t


def _open_window(Z: ZeroSet, r: GoldenNumber) -> ZeroSet:
    inner = window(Z, r)
    return ZeroSet(tuple(p for p in inner.pairs if not _on_boundary(p, r, Z.den)), Z.den)


def _on_boundary(p, r: GoldenNumber, den: int) -> bool:
    x = GoldenNumber._raw(p[0], p[1], den)
    return x == r or x == -r


def limit_zero_sets(rho: GoldenNumber, n: int, t_max: int | None = None,
                    window_radius: GoldenNumber | None = None) -> ZeroPair:
    """Truncated semi-factor zero sets of the fixed point at rotation number rho.

    Starts from the zeros rho + Z of sin(pi(x - rho)) (and none for b = 1),
    applies n zero steps per block and checks that the points in the period
    cell |x| < alpha^{-3nt}/2 survive into the next block. The full zero sets
    of the even limit functions are these sets together with their negatives.
    """
    _require_periodic(rho)
    W = window_radius if window_radius is not None else GoldenNumber(3, 2) * HALF + 2
    if golden_sign(W - HALF) < 0:
        raise ValueError("window radius must be at least 1/2")
    if t_max is None:
        t_max = blocks_needed(n, float(W))
    P = ZeroPair(EMPTY, seed_periodic_zeros(rho, W))
    for t in range(t_max):
        Q = P
        for _ in range(n):
            Q = zero_step(Q, prune=W)
        cell = period_length(n, t) * HALF
        if golden_sign(cell - W) > 0:
            cell = W
        if not (_open_window(P.A, cell).issubset(Q.A) and _open_window(P.B, cell).issubset(Q.B)):
            raise MonotonicityError("monotonicity failed")
        P = Q
    return ZeroPair(P.B, P.A, P.step_count, W)


def positive_representatives(Z: ZeroSet) -> list[GoldenNumber]:
    """|z| for z in Z, sorted; zeros of the even function with semi-factor zeros Z."""
    pts = [abs(p) for p in Z.points]
    if any(golden_sign(p) == 0 for p in pts):
        raise ValueError("zero at the origin")
    return [p for _, p in sorted((float(p), p) for p in pts)]
