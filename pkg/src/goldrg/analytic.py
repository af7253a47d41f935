"""Truncated Taylor series on disks |x| <= r with the majorant norm sum |c_k| r^k.

TaylorSeries holds scalar coefficients, MatrixSeries a (2, 2, N+1) block of
them, and PairH the renormalization state (B_o, A_o) on radii (r_B, r_A).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .golden import ALPHA

DEFAULT_DEGREE = 64
DEFAULT_RADII = (0.4, 0.6)


class DomainError(ValueError):
    pass


def _poly_affine(coeffs: np.ndarray, scale: float, shift: float) -> np.ndarray:
    """Coefficients of x -> f(scale*x + shift), truncated to the input length.

    Horner in the variable (scale*x + shift); exact for polynomials up to roundoff.
    Works along the last axis.
    """
    n = coeffs.shape[-1]
    out = np.zeros_like(coeffs)
    for k in range(n - 1, -1, -1):
        nxt = out * shift
        nxt[..., 1:] += scale * out[..., :-1]
        nxt[..., 0] += coeffs[..., k]
        out = nxt
    return out


def _cauchy(f: np.ndarray, g: np.ndarray) -> np.ndarray:
    n = f.shape[-1]
    return np.convolve(f, g)[:n]


@dataclass(frozen=True)
class TaylorSeries:
    coeffs: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "coeffs", np.asarray(self.coeffs, dtype=float))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x):
        return np.polynomial.polynomial.polyval(x, self.coeffs)

    def norm(self) -> float:
        return ts_norm(self)

    def __add__(self, other):
        if isinstance(other, TaylorSeries):
            _check_radius(self, other)
            return TaylorSeries(self.coeffs + other.coeffs, self.radius)
        c = self.coeffs.copy()
        c[0] += other
        return TaylorSeries(c, self.radius)

    def __mul__(self, other):
        if isinstance(other, TaylorSeries):
            return ts_multiply(self, other)
        return TaylorSeries(self.coeffs * other, self.radius)

    __rmul__ = __mul__

    def to_json(self) -> dict:
        return {"radius": self.radius, "coeffs": self.coeffs.tolist()}

    @classmethod
    def from_json(cls, obj) -> "TaylorSeries":
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(np.array(obj["coeffs"], dtype=float), float(obj["radius"]))


def _check_radius(f, g):
    if not np.isclose(f.radius, g.radius, rtol=0, atol=1e-15):
        raise ValueError("radius mismatch")


def ts_norm(f: TaylorSeries) -> float:
    k = np.arange(len(f.coeffs))
    return float(np.sum(np.abs(f.coeffs) * f.radius**k))


def ts_multiply(f: TaylorSeries, g: TaylorSeries) -> TaylorSeries:
    _check_radius(f, g)
    n = max(len(f.coeffs), len(g.coeffs))
    a = np.pad(f.coeffs, (0, n - len(f.coeffs)))
    b = np.pad(g.coeffs, (0, n - len(g.coeffs)))
    return TaylorSeries(_cauchy(a, b), f.radius)


def check_affine_domain(radius: float, scale: float, shift: float, out_radius: float, slack: float = 1e-12):
    if abs(scale) * out_radius + abs(shift) > radius * (1 + slack):
        raise DomainError("argument disk escapes domain")


def ts_affine_compose(f: TaylorSeries, scale: float, shift: float, out_radius: float) -> TaylorSeries:
    check_affine_domain(f.radius, scale, shift, out_radius)
    return TaylorSeries(_poly_affine(f.coeffs, scale, shift), out_radius)


def tail_fraction(f: TaylorSeries) -> float:
    """Share of the norm carried by coefficients above degree N/2."""
    k = np.arange(len(f.coeffs))
    w = np.abs(f.coeffs) * f.radius**k
    total = w.sum()
    return float(w[len(w) // 2 + 1:].sum() / total) if total > 0 else 0.0


def taylor_coefficients(func, degree: int = DEFAULT_DEGREE, sample_radius: float = 1.0, samples: int = 512):
    """Taylor coefficients at 0 of an analytic function via the Cauchy integral.

    func is evaluated on a circle of radius sample_radius; the output keeps
    the trailing shape of func's values (e.g. (2, 2) for matrix functions).
    """
    theta = 2 * np.pi * np.arange(samples) / samples
    z = sample_radius * np.exp(1j * theta)
    vals = np.asarray(func(z))
    coef = np.fft.fft(vals, axis=0) / samples
    coef = coef[: degree + 1]
    coef = coef / (sample_radius ** np.arange(degree + 1)).reshape((-1,) + (1,) * (vals.ndim - 1))
    return np.moveaxis(coef.real, 0, -1)


# ---------------------------------------------------------------- matrices


@dataclass(frozen=True)
class MatrixSeries:
    """2x2 matrix of Taylor series; coeffs has shape (2, 2, N+1)."""

    coeffs: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "coeffs", np.asarray(self.coeffs, dtype=float))

    @classmethod
    def from_function(cls, func, radius: float, degree: int = DEFAULT_DEGREE, sample_radius=None):
        sr = sample_radius if sample_radius is not None else max(1.0, 1.5 * radius)
        return cls(taylor_coefficients(func, degree, sr), radius)

    @classmethod
    def constant(cls, matrix, radius: float, degree: int = DEFAULT_DEGREE):
        c = np.zeros((2, 2, degree + 1))
        c[..., 0] = matrix
        return cls(c, radius)

    @classmethod
    def from_entries(cls, a, b, c, d, radius: float):
        return cls(np.array([[a, b], [c, d]], dtype=float), radius)

    @property
    def degree(self) -> int:
        return self.coeffs.shape[-1] - 1

    def entry(self, i: int, j: int) -> TaylorSeries:
        return TaylorSeries(self.coeffs[i, j], self.radius)

    def __call__(self, x):
        x = np.asarray(x)
        k = np.arange(self.coeffs.shape[-1])
        powers = x[..., None] ** k
        return np.einsum("ijk,...k->...ij", self.coeffs, powers)

    def norm(self) -> float:
        k = np.arange(self.coeffs.shape[-1])
        return float(np.sum(np.abs(self.coeffs) * self.radius**k))

    def scaled(self, factor: float) -> "MatrixSeries":
        return MatrixSeries(self.coeffs * factor, self.radius)

    def __matmul__(self, other: "MatrixSeries") -> "MatrixSeries":
        _check_radius(self, other)
        n = self.coeffs.shape[-1]
        out = np.zeros_like(self.coeffs)
        for i in range(2):
            for j in range(2):
                out[i, j] = _cauchy(self.coeffs[i, 0], other.coeffs[0, j]) + _cauchy(self.coeffs[i, 1], other.coeffs[1, j])
        return MatrixSeries(out[..., :n], self.radius)

    def __sub__(self, other: "MatrixSeries") -> "MatrixSeries":
        return MatrixSeries(self.coeffs - other.coeffs, self.radius)

    def __add__(self, other: "MatrixSeries") -> "MatrixSeries":
        return MatrixSeries(self.coeffs + other.coeffs, self.radius)

    def dagger(self) -> "MatrixSeries":
        c = self.coeffs
        return MatrixSeries(np.array([[c[1, 1], -c[0, 1]], [-c[1, 0], c[0, 0]]]), self.radius)

    def conjugate_by(self, L) -> "MatrixSeries":
        """L^{-1} M L with a constant matrix L."""
        L = np.asarray(L, dtype=float)
        Linv = np.linalg.inv(L)
        return MatrixSeries(np.einsum("ij,jkn,kl->iln", Linv, self.coeffs, L), self.radius)

    def affine_compose(self, scale: float, shift: float, out_radius: float) -> "MatrixSeries":
        check_affine_domain(self.radius, scale, shift, out_radius)
        return MatrixSeries(_poly_affine(self.coeffs, scale, shift), out_radius)

    def tail_fraction(self) -> float:
        k = np.arange(self.coeffs.shape[-1])
        w = np.abs(self.coeffs) * self.radius**k
        total = w.sum()
        return float(w[..., len(k) // 2 + 1:].sum() / total) if total > 0 else 0.0

    def reversibility_defect(self) -> float:
        c = self.coeffs
        k = np.arange(c.shape[-1])
        odd = k % 2 == 1
        w = self.radius**k
        sgn = (-1.0) ** k
        d = np.sum(np.abs(c[0, 0, odd]) * w[odd]) + np.sum(np.abs(c[1, 1, odd]) * w[odd])
        d += np.sum(np.abs(c[0, 1] + sgn * c[1, 0]) * w)
        return float(d)

    def with_radius(self, radius: float) -> "MatrixSeries":
        return MatrixSeries(self.coeffs, radius)

    def to_json(self) -> dict:
        return {"radius": self.radius, "coeffs": self.coeffs.tolist()}

    @classmethod
    def from_json(cls, obj) -> "MatrixSeries":
        return cls(np.array(obj["coeffs"], dtype=float), float(obj["radius"]))


def reversible_project(M: MatrixSeries) -> MatrixSeries:
    """Nearest reversible element: a, d even and b(x) = -c(-x)."""
    c = M.coeffs.copy()
    k = np.arange(c.shape[-1])
    sgn = (-1.0) ** k
    c[0, 0, k % 2 == 1] = 0.0
    c[1, 1, k % 2 == 1] = 0.0
    b, cc = c[0, 1].copy(), c[1, 0].copy()
    c[0, 1] = 0.5 * (b - sgn * cc)
    c[1, 0] = 0.5 * (cc - sgn * b)
    return MatrixSeries(c, M.radius)


def check_radii(r_b: float, r_a: float):
    """Strict domain conditions that keep every argument map inside the disks."""
    a3 = ALPHA**3
    ok = (
        r_b > ALPHA / 2
        and r_a > 0.5
        and a3 * r_a + ALPHA**2 / 2 < r_b < r_a / a3 - 1 / (2 * ALPHA)
    )
    if not ok:
        raise DomainError(f"radii ({r_b}, {r_a}) violate the renormalization domain condition")


@dataclass(frozen=True)
class PairH:
    B: MatrixSeries
    A: MatrixSeries

    def __post_init__(self):
        check_radii(self.B.radius, self.A.radius)

    def norm(self) -> float:
        return self.B.norm() + self.A.norm()

    def __sub__(self, other: "PairH") -> "PairH":
        return PairH(self.B - other.B, self.A - other.A)

    def distance(self, other: "PairH") -> float:
        return (self.B - other.B).norm() + (self.A - other.A).norm()

    def to_json(self) -> dict:
        return {"B": self.B.to_json(), "A": self.A.to_json()}

    @classmethod
    def from_json(cls, obj) -> "PairH":
        return cls(MatrixSeries.from_json(obj["B"]), MatrixSeries.from_json(obj["A"]))
