"""Exact arithmetic in Q[alpha], alpha = (sqrt(5) - 1)/2 the inverse golden mean.

Elements are stored as integer triples (n0, n1, d) meaning (n0 + n1*alpha)/d
with d > 0 and gcd(n0, n1, d) = 1, which makes the representation canonical.
The public view is the pair of rationals (a, b).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

ALPHA = (math.sqrt(5.0) - 1.0) / 2.0


class GoldenNumber:
    """An exact element a + b*alpha of Q[alpha]."""

    __slots__ = ("_n0", "_n1", "_d", "_hash")

    def __init__(self, a=0, b=0):
        a = Fraction(a)
        b = Fraction(b)
        d = a.denominator * b.denominator // math.gcd(a.denominator, b.denominator)
        self._set(a.numerator * (d // a.denominator), b.numerator * (d // b.denominator), d)

    def _set(self, n0, n1, d):
        g = math.gcd(math.gcd(n0, n1), d)
        if g > 1:
            n0 //= g
            n1 //= g
            d //= g
        self._n0, self._n1, self._d = n0, n1, d
        self._hash = None

    @classmethod
    def _raw(cls, n0: int, n1: int, d: int) -> "GoldenNumber":
        obj = cls.__new__(cls)
        if d < 0:
            n0, n1, d = -n0, -n1, -d
        obj._set(n0, n1, d)
        return obj

    @property
    def a(self) -> Fraction:
        return Fraction(self._n0, self._d)

    @property
    def b(self) -> Fraction:
        return Fraction(self._n1, self._d)

    @property
    def triple(self) -> tuple[int, int, int]:
        """Integer form (n0, n1, d) with value (n0 + n1*alpha)/d."""
        return self._n0, self._n1, self._d

    # ring operations

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return golden_add(self, other)

    __radd__ = __add__

    def __neg__(self):
        return GoldenNumber._raw(-self._n0, -self._n1, self._d)

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return golden_add(self, -other)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return golden_add(other, -self)

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return golden_mul(self, other)

    __rmul__ = __mul__

    def inverse(self) -> "GoldenNumber":
        # conjugate alpha -> -1/alpha = -1 - alpha; the norm is rational
        n0, n1, d = self._n0, self._n1, self._d
        norm = n0 * n0 - n0 * n1 - n1 * n1
        if norm == 0:
            raise ZeroDivisionError("inverse of zero GoldenNumber")
        # (n0 + n1 a)(n0 - n1 - n1 a) = n0^2 - n0 n1 - n1^2
        return GoldenNumber._raw((n0 - n1) * d, -n1 * d, norm)

    def __truediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return golden_mul(self, other.inverse())

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return golden_mul(other, self.inverse())

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        base = self if k >= 0 else self.inverse()
        result = ONE
        for _ in range(abs(k)):
            result = golden_mul(result, base)
        return result

    # comparisons

    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return False
        return (self._n0, self._n1, self._d) == (other._n0, other._n1, other._d)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self._n0, self._n1, self._d))
        return self._hash

    def __lt__(self, other):
        return golden_sign(self - other) < 0

    def __le__(self, other):
        return golden_sign(self - other) <= 0

    def __gt__(self, other):
        return golden_sign(self - other) > 0

    def __ge__(self, other):
        return golden_sign(self - other) >= 0

    def __abs__(self):
        return -self if golden_sign(self) < 0 else self

    def __float__(self):
        return to_float(self)

    def __repr__(self):
        return f"GoldenNumber({self.a}, {self.b})"

    def __str__(self):
        return format_golden(self)

    def to_json(self) -> dict:
        return {"a": _frac_str(self.a), "b": _frac_str(self.b)}

    @classmethod
    def from_json(cls, obj: dict) -> "GoldenNumber":
        return cls(Fraction(obj["a"]), Fraction(obj["b"]))


def _frac_str(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def _coerce(x):
    if isinstance(x, GoldenNumber):
        return x
    if isinstance(x, (int, Fraction)):
        return GoldenNumber(x, 0)
    return NotImplemented


def golden_add(x: GoldenNumber, y: GoldenNumber) -> GoldenNumber:
    d = x._d * y._d // math.gcd(x._d, y._d)
    fx, fy = d // x._d, d // y._d
    return GoldenNumber._raw(x._n0 * fx + y._n0 * fy, x._n1 * fx + y._n1 * fy, d)


def golden_mul(x: GoldenNumber, y: GoldenNumber) -> GoldenNumber:
    # (a1 + b1 t)(a2 + b2 t) with t^2 = 1 - t
    a1, b1, a2, b2 = x._n0, x._n1, y._n0, y._n1
    bb = b1 * b2
    return GoldenNumber._raw(a1 * a2 + bb, a1 * b2 + a2 * b1 - bb, x._d * y._d)


def _sign_int(p: int, q: int) -> int:
    """Sign of p + q*sqrt(5) for integers p, q."""
    if p >= 0 and q >= 0:
        return 0 if p == 0 and q == 0 else 1
    if p <= 0 and q <= 0:
        return -1
    # mixed signs: compare p^2 with 5 q^2
    lhs, rhs = p * p, 5 * q * q
    if lhs == rhs:
        return 0
    dominant = p if lhs > rhs else q
    return 1 if dominant > 0 else -1


def golden_sign(x: GoldenNumber) -> int:
    """Exact sign of a + b*alpha.

    Uses 2*(n0 + n1*alpha) = (2*n0 - n1) + n1*sqrt(5).
    """
    return _sign_int(2 * x._n0 - x._n1, x._n1)


def _sqrt5_times(q: int, bits: int) -> int:
    """floor-ish q*sqrt(5)*2^bits with the sign of q (error < 1)."""
    r = math.isqrt(5 * q * q << (2 * bits))
    return r if q >= 0 else -r


def to_float(x: GoldenNumber) -> float:
    """Correctly rounded up to a couple of ulp, even under cancellation."""
    n0, n1, d = x._n0, x._n1, x._d
    if n1 == 0:
        return n0 / d if max(abs(n0), d) < 2**53 else float(Fraction(n0, d))
    p = 2 * n0 - n1
    bits = 64 + max(p.bit_length(), n1.bit_length())
    if (p >= 0) == (n1 >= 0) or p == 0:
        # value = (p + n1 sqrt5) / (2d), no cancellation
        num = (p << bits) + _sqrt5_times(n1, bits)
        return float(Fraction(num, (2 * d) << bits))
    # mixed signs: multiply through by the conjugate p - n1 sqrt5
    norm = p * p - 5 * n1 * n1
    den = (p << bits) - _sqrt5_times(n1, bits)
    return float(Fraction(norm << bits, 2 * d * den))


ZERO = GoldenNumber(0, 0)
ONE = GoldenNumber(1, 0)
GOLDEN_ALPHA = GoldenNumber(0, 1)
HALF = GoldenNumber(Fraction(1, 2), 0)
ALPHA_INV3 = GoldenNumber(3, 2)  # alpha^-3 = (1 + alpha)^3


def parse_golden(text: str) -> GoldenNumber:
    """Parse strings like "1/4", "a/2", "1/3+1/6*a", "-1/2*a", "1-a".

    The symbol ``a`` stands for alpha. Floats are rejected.
    """
    s = text.replace(" ", "").replace("alpha", "a")
    if not s:
        raise ValueError("empty golden number")
    if "." in s or "e" in s.lower().replace("a", ""):
        raise ValueError(f"inexact literal in {text!r}")
    # split into signed terms
    terms = re.findall(r"[+-]?[^+-]+", s)
    a = Fraction(0)
    b = Fraction(0)
    for term in terms:
        sign = -1 if term.startswith("-") else 1
        body = term.lstrip("+-")
        if "a" in body:
            if body.count("a") != 1:
                raise ValueError(f"cannot parse term {term!r}")
            coef = body.replace("*a", "").replace("a*", "")
            if "a" in coef:
                # forms like a/2
                if coef.startswith("a/"):
                    coef = "1/" + coef[2:]
                elif coef == "a":
                    coef = "1"
                else:
                    raise ValueError(f"cannot parse term {term!r}")
            if coef in ("", "+"):
                coef = "1"
            b += sign * Fraction(coef)
        else:
            a += sign * Fraction(body)
    return GoldenNumber(a, b)


def format_golden(x: GoldenNumber) -> str:
    a, b = x.a, x.b
    if b == 0:
        return str(a)
    bs = "a" if b == 1 else "-a" if b == -1 else f"{b}*a"
    if a == 0:
        return bs
    return f"{a}{'' if bs.startswith('-') else '+'}{bs}"


def fibonacci(k: int) -> int:
    """p_k with p_1 = p_2 = 1. Python ints never overflow."""
    if k < 0:
        raise ValueError("fibonacci index must be nonnegative")
    return _fib_pair(k)[0]


def _fib_pair(k: int) -> tuple[int, int]:
    # fast doubling: returns (F_k, F_{k+1})
    if k == 0:
        return 0, 1
    f, g = _fib_pair(k // 2)
    c = f * (2 * g - f)
    e = f * f + g * g
    return (e, c + e) if k % 2 else (c, e)


def fib_q(k: int) -> int:
    """Companion denominator q_k = p_{k+1}."""
    return fibonacci(k + 1)


@lru_cache(maxsize=None)
def pisano_period(v: int) -> int:
    if v < 2:
        raise ValueError("pisano_period needs v >= 2")
    prev, cur = 0, 1
    for ell in range(1, 6 * v + 1):
        prev, cur = cur, (prev + cur) % v
        if prev == 0 and cur == 1:
            return ell
    raise RuntimeError("pisano period bound exceeded")  # cannot happen: bound is 6v


@dataclass(frozen=True)
class RotationClass:
    tag: str  # PositivePeriodic, NegativePeriodic, SpecialGap, Other
    u: int
    v: int
    w: int

    @property
    def periodic(self) -> bool:
        return self.tag in ("PositivePeriodic", "NegativePeriodic")


def canonical_uvw(rho: GoldenNumber) -> tuple[int, int, int]:
    """(u, v, w) with rho = w/v + (u/v)*alpha and v the least common denominator."""
    n0, n1, d = rho.triple
    return n1, d, n0


def _is_positive_periodic(rho: GoldenNumber) -> bool:
    u, v, w = canonical_uvw(rho)
    if v <= 2:
        return False
    if golden_sign(rho) < 0 or golden_sign(rho - HALF) > 0:
        return False
    # |u/v - (w/v) alpha| <= 1/2
    t = GoldenNumber(Fraction(u, v), Fraction(-w, v))
    return golden_sign(abs(t) - HALF) <= 0


def classify_rotation_number(rho: GoldenNumber) -> RotationClass:
    if golden_sign(rho + HALF) < 0 or golden_sign(rho - HALF) > 0:
        raise ValueError("rotation number must lie in [-1/2, 1/2]")
    u, v, w = canonical_uvw(rho)
    if rho in (ZERO, GOLDEN_ALPHA * HALF, HALF):
        return RotationClass("SpecialGap", u, v, w)
    if golden_sign(rho) > 0 and _is_positive_periodic(rho):
        return RotationClass("PositivePeriodic", u, v, w)
    if golden_sign(rho) < 0 and _is_positive_periodic(rho + HALF):
        return RotationClass("NegativePeriodic", u, v, w)
    return RotationClass("Other", u, v, w)


def period_candidates(rho: GoldenNumber, n_max: int = 60) -> list[int]:
    """n with p_{3n-1} = 1 and p_{3n} = 0 mod v, and the orbit-length bound.

    The bound asks that nu_1 = p_{3n} w/v - (q_{3n} - 1) u/v satisfies
    |nu_1| <= (q_{3n} - 1)/2.
    """
    u, v, w = canonical_uvw(rho)
    out = []
    for n in range(1, n_max + 1):
        p_prev, p = fibonacci(3 * n - 1), fibonacci(3 * n)
        if p_prev % v != 1 % v or p % v != 0:
            continue
        q = fib_q(3 * n)
        nu1 = Fraction(p * w - (q - 1) * u, v)
        if abs(nu1) <= Fraction(q - 1, 2):
            out.append(n)
    return out
