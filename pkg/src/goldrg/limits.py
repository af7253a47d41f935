"""The universal limit functions b, a as even products over their zeros.

f(x) = sign * exp(log_prefactor) * prod_j (1 - x^2/z_j^2)

over the positive representatives z_j <= cutoff of the exact limit zero sets.
The zeros beyond the cutoff have an asymptotic density d per unit length;
their product is replaced by exp(-x^2 tau), tau = sum_{z > cutoff} z^-2
estimated from d and the observed counting error at the cutoff.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .analytic import DEFAULT_DEGREE, DEFAULT_RADII, MatrixSeries, PairH
from .cocycle import RANK1_MATRIX, SkewProduct, lyapunov
from .golden import ALPHA, GoldenNumber, fibonacci, fib_q, format_golden, golden_sign, parse_golden
from .rg import A3, H, direct_factor
from .zeros import ZeroPair, ZeroSet, positive_representatives

SQRT5 = math.sqrt(5.0)
# densities of positive zeros |z| per unit length, from q_m alpha^m -> 1/(alpha sqrt5)
DENSITY_A = 2.0 / (ALPHA * SQRT5)
DENSITY_B = 2.0 / SQRT5
RANK1_DAGGER = np.array([[0.0, 0.0], [0.0, 1.0]])


@dataclass
class LimitProduct:
    zeros: list
    cutoff: float
    log_prefactor: float = 0.0
    sign: int = 1
    tail: float = 0.0  # tau: exp(-x^2 tau) stands for the omitted zeros
    _z2: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        if any(golden_sign(z) <= 0 for z in self.zeros):
            raise ValueError("zeros must be positive")
        if len(set(self.zeros)) != len(self.zeros):
            raise ValueError("zeros must be simple")
        self._z2 = np.array([float(z) ** 2 for z in self.zeros])

    def __call__(self, x):
        return evaluate(self, x)

    def log_abs(self, x):
        """log|f(x)| for real x (-inf at zeros)."""
        x = np.asarray(x, dtype=float)
        t = 1.0 - (x * x)[..., None] / self._z2
        with np.errstate(divide="ignore"):
            return self.log_prefactor - x * x * self.tail + np.sum(np.log(np.abs(t)), axis=-1)

    def tail_bound(self, R: float) -> float:
        """Bound on |log prod_{z > cutoff}(1 - x^2/z^2)| for |x| <= R < cutoff.

        Uses that positive zeros are at least 1/2 apart.
        """
        C = self.cutoff
        if R >= C:
            return math.inf
        return R * R * (2.0 / (C - R) + 1.0 / (C * C - R * R))

    def smallest_zero(self) -> GoldenNumber:
        return min(self.zeros)

    def to_json(self) -> dict:
        return {
            "zeros": [format_golden(z) for z in self.zeros],
            "cutoff": self.cutoff,
            "log_prefactor": self.log_prefactor,
            "sign": self.sign,
            "tail": self.tail,
        }

    @classmethod
    def from_json(cls, obj) -> "LimitProduct":
        return cls([parse_golden(z) for z in obj["zeros"]], obj["cutoff"], obj["log_prefactor"], obj["sign"], obj["tail"])


def evaluate(f: LimitProduct, x):
    """f(x) for real or complex x; exact zeros give exactly 0."""
    x = np.asarray(x)
    x2 = x * x
    t = 1.0 - x2[..., None] / f._z2
    if np.iscomplexobj(x):
        with np.errstate(divide="ignore", invalid="ignore"):
            logs = np.sum(np.log(t), axis=-1)
        return f.sign * np.exp(f.log_prefactor - x2 * f.tail + logs)
    hits = np.any(t == 0.0, axis=-1)
    with np.errstate(divide="ignore"):
        logs = np.sum(np.log(np.abs(t)), axis=-1)
    neg = np.sum(t < 0, axis=-1) % 2
    out = f.sign * np.where(neg == 1, -1.0, 1.0) * np.exp(f.log_prefactor - x2 * f.tail + logs)
    return np.where(hits, 0.0, out) if out.ndim else (0.0 if hits else float(out))


def tail_estimate(count: int, cutoff: float, density: float) -> float:
    """sum_{z > C} z^-2 for zeros with counting function N(z) = d z + E(z).

    Integration by parts gives d/C - E(C)/C^2 + 2 int_C^inf E(z)/z^3 dz;
    the last term is dropped (E grows only logarithmically).
    """
    excess = count - density * cutoff
    return density / cutoff - excess / cutoff**2


def _limit_from_set(Z: ZeroSet, cutoff: float, density: float) -> LimitProduct:
    zeros = [z for z in positive_representatives(Z) if float(z) <= cutoff] if len(Z) else []
    tail = tail_estimate(len(zeros), cutoff, density) if zeros else 0.0
    return LimitProduct(zeros, cutoff, 0.0, 1, tail)


def build_limit(zeros: ZeroPair, cutoff: float) -> tuple[LimitProduct, LimitProduct]:
    """(b, a) from the semi-factor zero sets; both unnormalized with value 1 at 0."""
    if zeros.radius is not None and cutoff > float(zeros.radius):
        raise ValueError("cutoff exceeds the window the zero sets are complete on")
    return _limit_from_set(zeros.B, cutoff, DENSITY_B), _limit_from_set(zeros.A, cutoff, DENSITY_A)


# ---------------------------------------------------------------- scalar renormalization


def scalar_step(b, a, x):
    """Values of one scalar composition step at x, as (b~, a~) log-magnitudes and signs.

    b, a are callables returning (log|f|, sign) arrays.
    """
    x = np.asarray(x, dtype=float)
    y = A3 * x

    def part(f, shift):
        return f(y + shift)

    terms_b = [part(a, -H), part(b, 0.0), part(a, H)]
    terms_a = [part(a, 2 * H), part(b, H), part(a, 0.0), part(b, -H), part(a, -2 * H)]

    def combine(terms):
        lg = sum(t[0] for t in terms)
        sg = np.prod([t[1] for t in terms], axis=0)
        return lg, sg

    return combine(terms_b), combine(terms_a)


def _as_logsign(f: LimitProduct):
    def g(x):
        v = evaluate(f, x)
        with np.errstate(divide="ignore"):
            return np.log(np.abs(v)), np.sign(v)

    return g


def scalar_renormalize(b: LimitProduct, a: LimitProduct, n: int, x):
    """(b~(x), a~(x)) after n scalar composition steps, by nested direct evaluation."""
    fb, fa = _as_logsign(b), _as_logsign(a)
    for _ in range(n):
        fb, fa = _nest(fb, fa)
    lb, sb = fb(x)
    la, sa = fa(x)
    return sb * np.exp(lb), sa * np.exp(la)


def _nest(fb, fa):
    def nb(x):
        return scalar_step(fb, fa, x)[0]

    def na(x):
        return scalar_step(fb, fa, x)[1]

    return nb, na


def constant_shift_matrix(n: int) -> np.ndarray:
    """U^{3n} with U = [[0, 1], [1, 1]]: how constant log-scales (v, u) propagate."""
    m = 3 * n
    return np.array([[fibonacci(m - 1), fibonacci(m)], [fibonacci(m), fib_q(m)]], dtype=float)


@dataclass
class FixedPointPair:
    b: LimitProduct
    a: LimitProduct
    n: int
    matrix: np.ndarray = field(default_factory=lambda: RANK1_MATRIX.copy())

    def __post_init__(self):
        if not (float(self.b(0.0)) > 0 and float(self.a(0.0)) < 0):
            raise ValueError("sign convention b(0) > 0, a(0) < 0 violated")

    def residual(self, xs) -> tuple[float, float]:
        """sup |R(b) - b|, sup |R(a) - a| on the sample points xs."""
        bt, at = scalar_renormalize(self.b, self.a, self.n, xs)
        return float(np.max(np.abs(bt - self.b(xs)))), float(np.max(np.abs(at - self.a(xs))))

    def to_pair(self, radii=DEFAULT_RADII, degree: int = DEFAULT_DEGREE) -> PairH:
        """The matrix fixed point B = b * K^dagger, A = a * K as truncated series."""
        rb, ra = radii
        B = MatrixSeries.from_function(lambda z: evaluate(self.b, z)[:, None, None] * RANK1_DAGGER, rb, degree)
        A = MatrixSeries.from_function(lambda z: evaluate(self.a, z)[:, None, None] * self.matrix, ra, degree)
        return PairH(B, A)

    def to_json(self) -> dict:
        return {"n": self.n, "b": self.b.to_json(), "a": self.a.to_json()}

    @classmethod
    def from_json(cls, obj) -> "FixedPointPair":
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(LimitProduct.from_json(obj["b"]), LimitProduct.from_json(obj["a"]), int(obj["n"]))


def fix_normalization(p: tuple[LimitProduct, LimitProduct], n: int) -> FixedPointPair:
    """Constants making (b, a) a fixed point of the scalar n-step renormalization.

    Measures the log-defects at 0 of one renormalization and solves
    (I - U^{3n}) (v, u) = (v~, u~), then fixes signs b(0) > 0, a(0) < 0.
    """
    b, a = p
    b = replace(b, log_prefactor=0.0, sign=1)
    a = replace(a, log_prefactor=0.0, sign=-1)
    bt, at = scalar_renormalize(b, a, n, 0.0)
    rhs = np.array([math.log(abs(bt)) - 0.0, math.log(abs(at)) - 0.0])
    M = np.eye(2) - constant_shift_matrix(n)
    if abs(np.linalg.det(M)) < 0.5:
        raise ArithmeticError("constant map has eigenvalue 1")
    v, u = np.linalg.solve(M, rhs)
    return FixedPointPair(replace(b, log_prefactor=float(v)), replace(a, log_prefactor=float(u)), n)


def fixed_point(rho: GoldenNumber, n: int, cutoff: float) -> FixedPointPair:
    from .zeros import limit_zero_sets

    W = GoldenNumber(int(math.ceil(cutoff)) + 1)
    zs = limit_zero_sets(rho, n, window_radius=W)
    return fix_normalization(build_limit(zs, cutoff), n)


# ---------------------------------------------------------------- scaling limits


@dataclass
class ScalingReport:
    ks: list
    errors_B: list
    errors_A: list
    log_M: list
    log_W: list
    lengths_B: list
    lengths_A: list
    singular_ratio_A: list
    lyapunov: float

    @property
    def errors(self) -> list:
        return [max(eb, ea) for eb, ea in zip(self.errors_B, self.errors_A)]

    def slope(self, which: str = "M") -> float:
        y = np.array(self.log_M if which == "M" else self.log_W)
        x = np.array(self.lengths_B if which == "M" else self.lengths_A, dtype=float)
        return float(np.polyfit(x, y, 1)[0])

    def to_json(self) -> dict:
        d = dict(self.__dict__)
        d["errors"] = self.errors
        return d


def _shape_error(mats, logs, ref, x0_index):
    """sup_x || F(x)/|F(0)| - (f(x)/f(0)) F(0)/|F(0)| || for F = exp(logs) mats."""
    norms0 = np.linalg.norm(mats[x0_index])
    scale = np.exp(logs - logs[x0_index]) / norms0
    F = mats * scale[:, None, None]
    target = (ref / ref[x0_index])[:, None, None] * (mats[x0_index] / norms0)
    return float(np.max(np.linalg.norm(F - target, axis=(1, 2))))


def verify_scaling_limit(G: SkewProduct, n: int, k_max: int, window: float, fp: FixedPointPair,
                         samples: int = 41, lyap_N: Optional[int] = None) -> ScalingReport:
    """Compare the renormalized Fibonacci products of G with the limit functions.

    For even k <= k_max, evaluates the products of p_{3nk} and q_{3nk}
    factors at alpha^{3nk} x (x in [-window, window]) and measures the
    distance of their shape to b(x) K^dagger, a(x) K after matching at x = 0.
    The matching scales are log M_k and log W_k.
    """
    xs = np.linspace(-window, window, 2 * (samples // 2) + 1)
    i0 = len(xs) // 2
    ref_b, ref_a = fp.b(xs), fp.a(xs)
    rep = ScalingReport([], [], [], [], [], [], [], [], 0.0)
    for k in range(2, k_max + 1, 2):
        mb, lb = direct_factor(G, None, n, k, xs, "B", "identity")
        ma, la = direct_factor(G, None, n, k, xs, "A", "identity")
        rep.ks.append(k)
        rep.errors_B.append(_shape_error(mb, lb, ref_b, i0))
        rep.errors_A.append(_shape_error(ma, la, ref_a, i0))
        rep.log_M.append(math.log(abs(float(ref_b[i0]))) - (lb[i0] + math.log(np.linalg.norm(mb[i0]))))
        rep.log_W.append(math.log(abs(float(ref_a[i0]))) - (la[i0] + math.log(np.linalg.norm(ma[i0]))))
        rep.lengths_B.append(fibonacci(3 * n * k))
        rep.lengths_A.append(fib_q(3 * n * k))
        s = np.linalg.svd(ma[i0], compute_uv=False)
        rep.singular_ratio_A.append(float(s[1] / s[0]))
    N = lyap_N or fibonacci(24)
    rep.lyapunov = lyapunov(G, N, np.linspace(0.0, 1.0, 8, endpoint=False))
    return rep
