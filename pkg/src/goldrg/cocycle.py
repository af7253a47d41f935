"""Skew products (x, y) -> (x + alpha, A(x) y) and their matrix cocycles.

Products are accumulated with renormalization to unit Frobenius norm at
every step; the discarded scale is returned as a log. Orbit phases j*alpha
are generated with a split representation of alpha so that they stay
accurate to ~1e-16 for j up to 2**26.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Union

import mpmath
import numpy as np
from numba import njit

from .golden import ALPHA, GoldenNumber

S_MATRIX = np.array([[0.0, 1.0], [1.0, 0.0]])
RANK1_MATRIX = np.array([[1.0, 0.0], [0.0, 0.0]])
IDENTITY = np.eye(2)

_CHUNK = 1 << 15


def quasi_inverse(m):
    """Adjugate [[d, -b], [-c, a]]; works on (..., 2, 2) arrays."""
    m = np.asarray(m)
    out = np.empty_like(m)
    out[..., 0, 0] = m[..., 1, 1]
    out[..., 0, 1] = -m[..., 0, 1]
    out[..., 1, 0] = -m[..., 1, 0]
    out[..., 1, 1] = m[..., 0, 0]
    return out


def det2(m):
    m = np.asarray(m)
    return m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]


def am_potential(x):
    return -2.0 * np.cos(2.0 * np.pi * x)


# ---------------------------------------------------------------- factors


class FactorFunction:
    """A 2x2-matrix valued function of the circle/line coordinate."""

    periodic = True
    kind = "generic"

    def __call__(self, x):
        raise NotImplementedError

    def det(self, x):
        return det2(self(x))


class Schrodinger(FactorFunction):
    """[[lam*v(t + x) - E, -1], [1, 0]]; determinant one."""

    kind = "schrodinger"

    def __init__(self, lam: float, energy: float, t: float = ALPHA / 2, potential: Callable = am_potential):
        self.lam, self.energy, self.t, self.potential = lam, energy, t, potential

    def diagonal(self, x):
        return self.lam * self.potential(self.t + np.asarray(x)) - self.energy

    @property
    def offdiag(self):
        return 1.0

    def __call__(self, x):
        c = self.diagonal(x)
        out = np.zeros(np.shape(c) + (2, 2), dtype=np.result_type(c, float))
        out[..., 0, 0] = c
        out[..., 0, 1] = -1.0
        out[..., 1, 0] = 1.0
        return out


class ScaledSchrodinger(Schrodinger):
    """[[v(t + x) - eps, -delta], [delta, 0]]; the Schrodinger factor divided by lam."""

    kind = "scaled"

    def __init__(self, delta: float, eps: float, t: float = ALPHA / 2, potential: Callable = am_potential):
        self.delta, self.eps, self.t, self.potential = delta, eps, t, potential

    def diagonal(self, x):
        return self.potential(self.t + np.asarray(x)) - self.eps

    @property
    def offdiag(self):
        return self.delta

    def __call__(self, x):
        c = self.diagonal(x)
        out = np.zeros(np.shape(c) + (2, 2), dtype=np.result_type(c, float))
        out[..., 0, 0] = c
        out[..., 0, 1] = -self.delta
        out[..., 1, 0] = self.delta
        return out


class Rank1Scalar(FactorFunction):
    """x -> a(x) * K for a scalar function a and a constant matrix K."""

    kind = "rank1"

    def __init__(self, scalar: Callable, matrix=RANK1_MATRIX, periodic: bool = True):
        self.scalar = scalar
        self.matrix = np.asarray(matrix, dtype=float)
        self.periodic = periodic

    def __call__(self, x):
        a = np.asarray(self.scalar(np.asarray(x)))
        return a[..., None, None] * self.matrix


class ConstantMatrix(FactorFunction):
    kind = "constant"

    def __init__(self, matrix):
        self.matrix = np.asarray(matrix, dtype=float)

    def __call__(self, x):
        shape = np.shape(x)
        return np.broadcast_to(self.matrix, shape + (2, 2)).copy()


class TaylorMatrix(FactorFunction):
    """Factor given by a matrix-valued Taylor series (not periodic)."""

    kind = "taylor"
    periodic = False

    def __init__(self, series):
        self.series = series

    def __call__(self, x):
        return self.series(x)


def limit_scalar_factor(rho: float) -> Rank1Scalar:
    """a(x) = 4 sin(pi(x - rho)) sin(pi(x + rho)) = -eps - 2cos(2 pi x) times diag(1, 0)."""
    return Rank1Scalar(lambda x: 4.0 * np.sin(np.pi * (x - rho)) * np.sin(np.pi * (x + rho)))


@dataclass(frozen=True)
class SkewProduct:
    frequency: Union[GoldenNumber, float]
    factor: FactorFunction

    @property
    def alpha(self) -> float:
        f = self.frequency
        return float(f) if isinstance(f, GoldenNumber) else f

    def symmetric_factor(self, x):
        return self.factor(np.asarray(x) - self.alpha / 2)


def golden_skew(factor: FactorFunction) -> SkewProduct:
    return SkewProduct(GoldenNumber(0, 1), factor)


# ---------------------------------------------------------------- phases

_split_cache: dict = {}


def _split_parts(freq) -> tuple[float, float, float]:
    """Three doubles summing to freq/2 to ~1e-40, the first two with 26-bit mantissas."""
    key = freq.triple if isinstance(freq, GoldenNumber) else float(freq)
    if key in _split_cache:
        return _split_cache[key]
    with mpmath.workprec(200):
        if isinstance(freq, GoldenNumber):
            value = mpmath.mpf(freq.a.numerator) / freq.a.denominator + mpmath.mpf(freq.b.numerator) / freq.b.denominator * (mpmath.sqrt(5) - 1) / 2
        else:
            value = mpmath.mpf(float(freq))
        value = value / 2
        parts = []
        for _ in range(2):
            v = float(value)
            if v == 0.0:
                parts.append(0.0)
                continue
            m, e = math.frexp(v)
            h = math.ldexp(round(m * 2**26), e - 26)
            parts.append(h)
            value -= h
        parts.append(float(value))
    _split_cache[key] = tuple(parts)
    return _split_cache[key]


def half_steps(freq, m: np.ndarray, periodic: bool = True) -> np.ndarray:
    """m * freq / 2 for integer arrays m, reduced to [-1/2, 1/2) when periodic."""
    h1, h2, h3 = _split_parts(freq)
    m = np.asarray(m, dtype=np.float64)
    if np.any(np.abs(m) >= 2.0**26):
        raise ValueError("orbit too long for exact phase generation")
    if not periodic:
        return m * h1 + m * h2 + m * h3
    t1 = m * h1
    t1 -= np.round(t1)
    t2 = m * h2
    t2 -= np.round(t2)
    t = t1 + t2 + m * h3
    return t - np.round(t)


def orbit_points(x, freq, m: np.ndarray, periodic: bool = True):
    """Points x + m*freq/2 (broadcast: result shape m.shape + x.shape)."""
    x = np.asarray(x)
    off = half_steps(freq, m, periodic)
    pts = off.reshape(off.shape + (1,) * x.ndim) + x
    if periodic:
        pts = pts - np.round(pts.real)
    return pts


# ---------------------------------------------------------------- kernels


@njit(cache=True)
def _chain(mats, prod, logs):
    """prod <- mats[n-1] ... mats[0] prod, renormalized every step."""
    n, s = mats.shape[0], mats.shape[1]
    for j in range(n):
        for i in range(s):
            m00, m01, m10, m11 = mats[j, i, 0, 0], mats[j, i, 0, 1], mats[j, i, 1, 0], mats[j, i, 1, 1]
            p00, p01, p10, p11 = prod[i, 0, 0], prod[i, 0, 1], prod[i, 1, 0], prod[i, 1, 1]
            q00 = m00 * p00 + m01 * p10
            q01 = m00 * p01 + m01 * p11
            q10 = m10 * p00 + m11 * p10
            q11 = m10 * p01 + m11 * p11
            nrm = math.sqrt(abs(q00) ** 2 + abs(q01) ** 2 + abs(q10) ** 2 + abs(q11) ** 2)
            if nrm == 0.0:
                prod[i, 0, 0] = q00
                prod[i, 0, 1] = q01
                prod[i, 1, 0] = q10
                prod[i, 1, 1] = q11
                logs[i] = -np.inf
                continue
            prod[i, 0, 0] = q00 / nrm
            prod[i, 0, 1] = q01 / nrm
            prod[i, 1, 0] = q10 / nrm
            prod[i, 1, 1] = q11 / nrm
            logs[i] += math.log(nrm)


@njit(cache=True)
def _schrodinger_chain(diag, off, prod, logs):
    """Same as _chain for factors [[c, -off], [off, 0]]."""
    n, s = diag.shape[0], diag.shape[1]
    for j in range(n):
        for i in range(s):
            c = diag[j, i]
            p00, p01, p10, p11 = prod[i, 0, 0], prod[i, 0, 1], prod[i, 1, 0], prod[i, 1, 1]
            q00 = c * p00 - off * p10
            q01 = c * p01 - off * p11
            q10 = off * p00
            q11 = off * p01
            nrm = math.sqrt(abs(q00) ** 2 + abs(q01) ** 2 + abs(q10) ** 2 + abs(q11) ** 2)
            prod[i, 0, 0] = q00 / nrm
            prod[i, 0, 1] = q01 / nrm
            prod[i, 1, 0] = q10 / nrm
            prod[i, 1, 1] = q11 / nrm
            logs[i] += math.log(nrm)


@njit(cache=True)
def _sign_kernel(mats, y, state):
    """Propagate y and count sign changes of its first component.

    state = [count, last_sign]; exact zeros are skipped when counting.
    """
    for j in range(mats.shape[0]):
        y0 = mats[j, 0, 0] * y[0] + mats[j, 0, 1] * y[1]
        y1 = mats[j, 1, 0] * y[0] + mats[j, 1, 1] * y[1]
        nrm = abs(y0) + abs(y1)
        if nrm == 0.0:
            return False
        y[0] = y0 / nrm
        y[1] = y1 / nrm
        if y0 > 0.0:
            sg = 1.0
        elif y0 < 0.0:
            sg = -1.0
        else:
            sg = 0.0
        if sg != 0.0:
            if state[1] != 0.0 and sg != state[1]:
                state[0] += 1.0
            state[1] = sg
    return True


@njit(cache=True)
def _lift_kernel(diag, off, y, total):
    """Angle lift for Schrodinger-shaped factors [[c, -off], [off, 0]].

    [[c, -1], [1, 0]] = R(pi/2) [[1, 0], [-c, 1]]: the shear keeps each
    vector in its open half plane, so its angle change has a unique
    principal value; the rotation adds pi/2.
    """
    for j in range(diag.shape[0]):
        c = diag[j] / off
        u, w = y[0], y[1]
        su, sw = u, w - c * u
        dth = math.atan2(u * sw - w * su, u * su + w * sw)
        total[0] += dth + 0.5 * math.pi
        y[0] = -sw
        y[1] = su
        nrm = abs(y[0]) + abs(y[1])
        y[0] /= nrm
        y[1] /= nrm


# ---------------------------------------------------------------- products


def _factor_stream(G: SkewProduct, q: int, x, quasi: bool):
    """Yield chunks of factor matrices, rightmost (first applied) first.

    For q < 0 the factors are A(x - j alpha)^{-1} (or the adjugate when quasi).
    """
    fac = G.factor
    count = abs(q)
    sign = 1 if q > 0 else -1
    for start in range(0, count, _CHUNK):
        j = np.arange(start, min(count, start + _CHUNK))
        m = 2 * j if q > 0 else -2 * (j + 1)
        pts = orbit_points(x, G.frequency, m, fac.periodic)
        mats = fac(pts)
        if sign < 0:
            dets = det2(mats)
            mats = quasi_inverse(mats)
            if not quasi:
                if np.any(dets == 0):
                    raise ZeroDivisionError("noninvertible factor")
                mats = mats / dets[..., None, None]
        yield pts, mats


def product(G: SkewProduct, q: int, x, quasi: bool = False):
    """A^{*q}(x) as (unit-Frobenius matrix, log scale).

    x may be a scalar or an array (result then has shape x.shape + (2, 2)).
    Negative q multiplies the inverses A(x - alpha)^{-1}, ..., A(x + q alpha)^{-1};
    with quasi=True the adjugates are used instead, which stays defined for
    singular factors and differs from the inverse product by det factors.
    """
    x = np.asarray(x)
    scalar = x.ndim == 0
    xs = x.reshape(-1)
    cplx = np.iscomplexobj(xs)
    dtype = np.complex128 if cplx else np.float64
    prod = np.zeros((xs.size, 2, 2), dtype=dtype)
    prod[:, 0, 0] = prod[:, 1, 1] = 1.0
    logs = np.zeros(xs.size)
    fac = G.factor
    fast = q > 0 and isinstance(fac, Schrodinger)
    if q != 0:
        if fast:
            for start in range(0, q, _CHUNK):
                j = np.arange(start, min(q, start + _CHUNK))
                pts = orbit_points(xs, G.frequency, 2 * j, fac.periodic)
                diag = np.ascontiguousarray(fac.diagonal(pts), dtype=dtype)
                _schrodinger_chain(diag, dtype(fac.offdiag) if cplx else float(fac.offdiag), prod, logs)
        else:
            for _, mats in _factor_stream(G, q, xs, quasi):
                _chain(np.ascontiguousarray(mats, dtype=dtype), prod, logs)
    # identity has Frobenius norm sqrt(2): keep the unit-norm convention
    if q == 0:
        prod /= math.sqrt(2.0)
        logs += 0.5 * math.log(2.0)
    if scalar:
        return prod[0], float(logs[0])
    return prod.reshape(x.shape + (2, 2)), logs.reshape(x.shape)


def symmetric_product(G: SkewProduct, q: int, x, quasi: bool = False):
    """A^{*q}_o(x) = A^{*q}(x - q alpha/2), as (matrix, log scale)."""
    x = np.asarray(x)
    shift = half_steps(G.frequency, np.array([q]), G.factor.periodic)[0]
    return product(G, q, x - shift, quasi)


def log_abs_det(G: SkewProduct, q: int, x, symmetric: bool = False):
    """log |det A^{*q}(x)| summed factor by factor (adjugates keep det, inverses flip it).

    Finite only for invertible factors; this is what makes singular-value
    ratios of long products measurable below floating-point resolution.
    """
    x = np.asarray(x, dtype=float)
    if symmetric:
        x = x - half_steps(G.frequency, np.array([q]), G.factor.periodic)[0]
    xs = x.reshape(-1)
    total = np.zeros(xs.size)
    fac = G.factor
    if isinstance(fac, Schrodinger):
        total[:] = abs(q) * 2 * math.log(abs(fac.offdiag))
    else:
        count = abs(q)
        for start in range(0, count, _CHUNK):
            j = np.arange(start, min(count, start + _CHUNK))
            m = 2 * j if q > 0 else -2 * (j + 1)
            pts = orbit_points(xs, G.frequency, m, fac.periodic)
            total += np.log(np.abs(det2(fac(pts)))).sum(axis=0)
    return total.reshape(x.shape) if x.ndim else float(total[0])


def lyapunov(G: SkewProduct, N: int, x0=0.0) -> float:
    """(1/N) log ||A^{*N}(x0)||; an array x0 gives the sample mean."""
    _, logs = product(G, N, np.asarray(x0, dtype=float))
    return float(np.mean(logs)) / N


def default_start(G: SkewProduct, N: int) -> float:
    """Rightmost argument of the symmetric product A^{*N}_o(0): ((1-N)/2) alpha."""
    return float(half_steps(G.frequency, np.array([1 - N]), False)[0])


def rotation_sign_count(G: SkewProduct, N: int, y0=(1.0, 0.0), x0=None) -> Fraction:
    """Rot_N / N from sign changes of the first component of A^{*k} y0, k = 1..N.

    The orbit runs through the symmetric factor A_o starting at x0, by
    default ((1-N)/2) alpha so that it is centred at 0.
    """
    fac = G.factor
    if fac.kind not in ("schrodinger", "scaled", "rank1"):
        raise TypeError("sign counting needs a Schrodinger or rank-1 factor")
    if x0 is None:
        x0 = default_start(G, N)
    y = np.array(y0, dtype=float)
    if fac.kind == "rank1" and not np.any(fac.matrix @ y):
        raise ValueError("rank-1 factor annihilates y0")
    state = np.zeros(2)
    start = x0 - G.alpha / 2
    for _, mats in _factor_stream(G, N, np.array([start]), False):
        if not _sign_kernel(np.ascontiguousarray(mats[:, 0], dtype=np.float64), y, state):
            break
    half = 1 if y[0] == 0.0 else 0
    return Fraction(int(state[0]) + half, 2 * N)


def rotation_lift(G: SkewProduct, N: int, y0=(1.0, 0.0), x0=None) -> float:
    """Sigma_N / N from the continuous angle lift, reported mod 1."""
    fac = G.factor
    if x0 is None:
        x0 = default_start(G, N)
    start = x0 - G.alpha / 2
    y = np.array(y0, dtype=float)
    total = np.zeros(1)
    if isinstance(fac, Schrodinger):
        off = float(fac.offdiag)
        if off == 0.0:
            raise ZeroDivisionError("zero vector encountered: singular factor")
        for j0 in range(0, N, _CHUNK):
            j = np.arange(j0, min(N, j0 + _CHUNK))
            pts = orbit_points(np.array([start]), G.frequency, 2 * j, fac.periodic)[:, 0]
            _lift_kernel(np.ascontiguousarray(fac.diagonal(pts), dtype=np.float64), off, y, total)
    else:
        total[0] = _generic_lift(G, N, start, y)
    return (total[0] / (2 * math.pi * N)) % 1.0


def _angle_change(m, theta: float, ref: float) -> float:
    v = np.array([math.cos(theta), math.sin(theta)])
    w = m @ v
    if not np.any(w):
        raise ZeroDivisionError("zero vector encountered: singular factor")
    d = math.atan2(w[1], w[0]) - theta
    # nearest representative to the reference branch
    return d + 2 * math.pi * round((ref - d) / (2 * math.pi))


def _lift_g(fac: FactorFunction, x: float, theta: float, substeps: int = 64) -> float:
    """Continuous lift g(x, theta), branch fixed by g(0, 0) in [0, 2 pi).

    Continued along theta at x = 0, then along x.
    """
    g = _angle_change(fac(0.0), 0.0, math.pi)
    g = g % (2 * math.pi)
    for s in np.linspace(0.0, 1.0, substeps + 1)[1:]:
        g = _angle_change(fac(0.0), s * theta, g)
    for s in np.linspace(0.0, 1.0, substeps + 1)[1:]:
        g = _angle_change(fac(s * x), theta, g)
    return g


def _generic_lift(G: SkewProduct, N: int, start: float, y) -> float:
    fac = G.factor
    theta = math.atan2(y[1], y[0])
    total = 0.0
    for pts, mats in _factor_stream(G, N, np.array([start]), False):
        for x, m in zip(pts[:, 0], mats[:, 0]):
            if det2(m) <= 0:
                raise ZeroDivisionError("zero vector encountered: singular factor")
            xr = float(np.real(x))
            g = _lift_g(fac, xr, theta)
            total += g
            theta = (theta + g) % (2 * math.pi)
    return total


def is_reversible(G: SkewProduct, grid: int = 64, tol: float = 1e-10) -> bool:
    """max over a grid of ||S A_o(x) S - A_o(-x)^dagger|| < tol."""
    xs = np.linspace(-0.5, 0.5, grid)
    lhs = S_MATRIX @ G.symmetric_factor(xs) @ S_MATRIX
    rhs = quasi_inverse(G.symmetric_factor(-xs))
    return float(np.max(np.abs(lhs - rhs))) < tol
