"""Renormalization of pairs (F, G) = ((1, B), (alpha, A)) of skew products.

All matrix functions here are symmetric factors. One composition step C3
maps (F, G) to (G F^dagger G, G^dagger F G^dagger F G^dagger); after the
argument rescaling x -> alpha^3 x the new symmetric factors are

    B~(x) = A(a3 x - h) B(a3 x)^dagger A(a3 x + h)
    A~(x) = A(a3 x + 2h)^dagger B(a3 x + h) A(a3 x)^dagger B(a3 x - h) A(a3 x - 2h)^dagger

with a3 = alpha^3 and h = (1 - alpha)/2 = alpha^2/2. R_3n applies this n
times and then conjugates once by a constant matrix L (powers of S, and
optionally e^{sigma S}). Constant conjugations commute with C3 and with
the argument scaling, so this equals n compositions followed by a single
rescaling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .analytic import DEFAULT_DEGREE, DEFAULT_RADII, MatrixSeries, PairH, TaylorSeries, ts_affine_compose
from .cocycle import S_MATRIX, ConstantMatrix, SkewProduct, log_abs_det, quasi_inverse, symmetric_product
from .golden import ALPHA, fib_q, fibonacci

A3 = ALPHA**3
H = ALPHA**2 / 2
X0 = -ALPHA / 2


class SigmaError(RuntimeError):
    pass


@dataclass(frozen=True)
class RgOptions:
    n: int = 1
    L_choice: str = "S"  # "identity", "S", "S-sigma"
    normalization: str = "norm"  # "none", "norm", "trace"
    target_b0: Optional[float] = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.L_choice not in ("identity", "S", "S-sigma"):
            raise ValueError(f"unknown L choice {self.L_choice!r}")
        if self.normalization not in ("none", "norm", "trace"):
            raise ValueError(f"unknown normalization {self.normalization!r}")
        if self.normalization == "trace" and not self.target_b0:
            raise ValueError("trace normalization needs a nonzero target_b0")


def exp_sigma_s(sigma: float) -> np.ndarray:
    return math.cosh(sigma) * np.eye(2) + math.sinh(sigma) * S_MATRIX


# ---------------------------------------------------------------- symbolic maps


@dataclass(frozen=True)
class SymbolicMap:
    """(frequency, symmetric factor) with the factor as a plain callable."""

    frequency: float
    factor: Callable

    def __call__(self, x):
        return self.factor(x)


def compose(outer: SymbolicMap, inner: SymbolicMap) -> SymbolicMap:
    """outer after inner: C(x) = B(x + alpha/2) A(x - beta/2)."""
    a, b = inner.frequency, outer.frequency
    return SymbolicMap(a + b, lambda x: outer.factor(np.asarray(x) + a / 2) @ inner.factor(np.asarray(x) - b / 2))


def dagger(G: SymbolicMap) -> SymbolicMap:
    return SymbolicMap(-G.frequency, lambda x: quasi_inverse(G.factor(x)))


def c3(F: SymbolicMap, G: SymbolicMap) -> tuple[SymbolicMap, SymbolicMap]:
    """(G F^dagger G, G^dagger F G^dagger F G^dagger) by literal composition."""
    Gd = dagger(G)
    Ft = compose(G, compose(dagger(F), G))
    Gt = compose(Gd, compose(F, compose(Gd, compose(F, Gd))))
    return Ft, Gt


def rescale(M: SymbolicMap, factor: float) -> SymbolicMap:
    return SymbolicMap(M.frequency / factor, lambda x: M.factor(factor * np.asarray(x)))


def scalar_map(frequency: float, func: Callable) -> SymbolicMap:
    """Embed a scalar function as a 1x1-like map (stored as diagonal 2x2)."""

    def f(x):
        v = np.asarray(func(np.asarray(x)))
        out = np.zeros(v.shape + (2, 2), dtype=v.dtype)
        out[..., 0, 0] = v
        out[..., 1, 1] = v
        return out

    return SymbolicMap(frequency, f)


# ---------------------------------------------------------------- series path


def r3_step(P: PairH) -> PairH:
    """One composition step with argument rescaling; L = identity, no normalization."""
    B, A = P.B, P.A
    rb, ra = B.radius, A.radius
    Bt = A.affine_compose(A3, -H, rb) @ B.affine_compose(A3, 0.0, rb).dagger() @ A.affine_compose(A3, H, rb)
    At = (
        A.affine_compose(A3, 2 * H, ra).dagger()
        @ B.affine_compose(A3, H, ra)
        @ A.affine_compose(A3, 0.0, ra).dagger()
        @ B.affine_compose(A3, -H, ra)
        @ A.affine_compose(A3, -2 * H, ra).dagger()
    )
    return PairH(Bt, At)


def sigma_residual(M, sigma: float) -> float:
    """c-entry of e^{-sigma S} M e^{sigma S}."""
    (a, b), (c, d) = np.asarray(M)
    ch, sh = math.cosh(2 * sigma), math.sinh(2 * sigma)
    return 0.5 * ((c + b) + (c - b) * ch + (d - a) * sh)


def _sigma_derivative(M, sigma: float) -> float:
    (a, b), (c, d) = np.asarray(M)
    return (c - b) * math.sinh(2 * sigma) + (d - a) * math.cosh(2 * sigma)


def sigma_solve(P, tol: float = 1e-14, bound: float = 1.0) -> float:
    """sigma in [-bound, bound] making the c-entry of the conjugated A(x0) vanish.

    Safeguarded Newton: Newton steps that leave the current bracket are
    replaced by bisection.
    """
    M = P.A(X0) if isinstance(P, PairH) else np.asarray(P)
    f0 = sigma_residual(M, 0.0)
    if f0 == 0.0:
        return 0.0
    lo, hi = -bound, bound
    flo, fhi = sigma_residual(M, lo), sigma_residual(M, hi)
    if flo * fhi > 0:
        raise SigmaError("sigma normalization failed")
    if flo > 0:
        lo, hi = hi, lo
    s = 0.0
    scale = max(abs(M[0, 0]), abs(M[1, 1]), abs(M[0, 1]), abs(M[1, 0]), 1e-300)
    for _ in range(200):
        fs = sigma_residual(M, s)
        if abs(fs) <= tol * scale:
            return s
        if fs < 0:
            lo = s
        else:
            hi = s
        ds = _sigma_derivative(M, s)
        step_ok = ds != 0.0
        if step_ok:
            s_new = s - fs / ds
            step_ok = min(lo, hi) < s_new < max(lo, hi)
        if not step_ok:
            s_new = 0.5 * (lo + hi)
        if abs(s_new - s) < 1e-16:
            return s_new
        s = s_new
    return s


def normalize(P: PairH, opts: RgOptions) -> tuple[PairH, tuple[float, float]]:
    """Apply the selected normalization; returns the pair and the multipliers (M_B, M_A)."""
    if opts.normalization == "none":
        return P, (1.0, 1.0)
    if opts.normalization == "norm":
        nb, na = P.B.norm(), P.A.norm()
        if nb == 0 or na == 0:
            raise ZeroDivisionError("cannot normalize a zero component")
        return PairH(P.B.scaled(1 / nb), P.A.scaled(1 / na)), (1 / nb, 1 / na)
    tr = float(np.trace(P.B(0.0)))
    if tr == 0:
        raise ZeroDivisionError("trace of B at 0 vanishes")
    m = opts.target_b0 / tr
    return PairH(P.B.scaled(m), P.A), (m, 1.0)


@dataclass
class StepInfo:
    sigma: float = 0.0
    scales: tuple = (1.0, 1.0)
    substep_scales: list = field(default_factory=list)


def renormalize(P: PairH, opts: RgOptions) -> tuple[PairH, StepInfo]:
    info = StepInfo()
    Q = P
    for i in range(opts.n):
        Q = r3_step(Q)
        # norm mode is projective, so rescaling between substeps only prevents under/overflow
        if opts.normalization == "norm" and i < opts.n - 1:
            Q, sc = normalize(Q, opts)
            info.substep_scales.append(sc)
        else:
            info.substep_scales.append((1.0, 1.0))
    if opts.L_choice != "identity" and opts.n % 2 == 1:
        Q = PairH(Q.B.conjugate_by(S_MATRIX), Q.A.conjugate_by(S_MATRIX))
    if opts.L_choice == "S-sigma":
        sigma = sigma_solve(Q)
        if sigma != 0.0:
            E = exp_sigma_s(sigma)
            Q = PairH(Q.B.conjugate_by(E), Q.A.conjugate_by(E))
        info.sigma = sigma
    Q, info.scales = normalize(Q, opts)
    return Q, info


def r3n_series(P: PairH, opts: RgOptions) -> PairH:
    return renormalize(P, opts)[0]


# ---------------------------------------------------------------- families


def cos_series(degree: int = DEFAULT_DEGREE) -> np.ndarray:
    """Taylor coefficients of -2 cos(2 pi x)."""
    c = np.zeros(degree + 1)
    for m in range(0, degree // 2 + 1):
        c[2 * m] = -2.0 * (-1) ** m * (2 * np.pi) ** (2 * m) / math.factorial(2 * m)
    return c


def scaled_am_pair(delta: float, eps: float, radii=DEFAULT_RADII, degree: int = DEFAULT_DEGREE) -> PairH:
    """B = identity, A(x) = [[-eps - 2cos(2 pi x), -delta], [delta, 0]]."""
    rb, ra = radii
    a = cos_series(degree)
    a[0] -= eps
    z = np.zeros(degree + 1)
    off = z.copy()
    off[0] = delta
    A = MatrixSeries.from_entries(a, -off, off, z, ra)
    return PairH(MatrixSeries.constant(np.eye(2), rb, degree), A)


def rank1_pair(b_coeffs, a_coeffs, radii=DEFAULT_RADII) -> PairH:
    """B = b(x) * K^dagger, A = a(x) * K with K = diag(1, 0)."""
    b_coeffs = np.asarray(b_coeffs, dtype=float)
    a_coeffs = np.asarray(a_coeffs, dtype=float)
    z = np.zeros_like(b_coeffs)
    B = MatrixSeries.from_entries(z, z, z, b_coeffs, radii[0])
    A = MatrixSeries.from_entries(a_coeffs, z, z, np.zeros_like(a_coeffs), radii[1])
    return PairH(B, A)


# ---------------------------------------------------------------- iteration


def _det_series(M: MatrixSeries) -> TaylorSeries:
    return M.entry(0, 0) * M.entry(1, 1) + (M.entry(0, 1) * M.entry(1, 0)) * -1.0


def _unit(f: TaylorSeries) -> tuple[TaylorSeries, float]:
    nrm = f.norm()
    if nrm == 0.0:
        return f, -math.inf
    return f * (1.0 / nrm), math.log(nrm)


@dataclass
class DetTrack:
    """det B_o and det A_o stored as exp(log) times a unit-norm series.

    Determinants of renormalized factors shrink like delta^(2 q), far below
    double precision, so they are propagated separately: det(M^dagger) = det M,
    constant conjugation leaves det unchanged and a multiplier m scales it by m^2.
    """

    B: TaylorSeries
    logB: float
    A: TaylorSeries
    logA: float

    @classmethod
    def from_pair(cls, P: PairH) -> "DetTrack":
        b, lb = _unit(_det_series(P.B))
        a, la = _unit(_det_series(P.A))
        return cls(b, lb, a, la)

    def step(self) -> "DetTrack":
        rb, ra = self.B.radius, self.A.radius

        def chain(parts, radius):
            total, acc = 0.0, None
            for f, lg, shift in parts:
                g, lg2 = _unit(ts_affine_compose(f, A3, shift, radius))
                total += lg + lg2
                acc = g if acc is None else acc * g
            acc, lg3 = _unit(acc)
            return acc, total + lg3

        A, B, la, lb = self.A, self.B, self.logA, self.logB
        nb, lnb = chain([(A, la, -H), (B, lb, 0.0), (A, la, H)], rb)
        na, lna = chain([(A, la, 2 * H), (B, lb, H), (A, la, 0.0), (B, lb, -H), (A, la, -2 * H)], ra)
        return DetTrack(nb, lnb, na, lna)

    def rescaled(self, scales) -> "DetTrack":
        return DetTrack(self.B, self.logB + 2 * math.log(abs(scales[0])), self.A, self.logA + 2 * math.log(abs(scales[1])))

    def log_abs_A(self, x):
        with np.errstate(divide="ignore"):
            return np.log(np.abs(self.A(np.asarray(x)))) + self.logA


def log_singular_ratio(M, log_det):
    """log(s_min / s_max) = log|det| - 2 log s_max for 2x2 matrices."""
    smax = np.linalg.norm(np.asarray(M), ord=2, axis=(-2, -1))
    return np.asarray(log_det) - 2 * np.log(smax)


def ratio_window(A: MatrixSeries, half_width: float = 0.2, samples: int = 101):
    xs = X0 + np.linspace(-half_width, half_width, samples)
    vals = A(xs)
    return xs, vals[:, 1, 0] / vals[:, 0, 0]


@dataclass
class Trajectory:
    pairs: list = field(default_factory=list)
    records: list = field(default_factory=list)


def diagnostics(P: PairH, dets: DetTrack, prev: Optional[PairH] = None) -> dict:
    xs = X0 + np.linspace(-0.2, 0.2, 101)
    log_det = dets.log_abs_A(xs)
    _, ratio = ratio_window(P.A)
    rec = {
        "pair_norm": P.norm(),
        "log_max_det_A": float(log_det.max()),
        "log_singular_ratio_A": float(log_singular_ratio(P.A(xs), log_det).max()),
        "ratio_variance": float(np.var(ratio)),
        "tail_B": P.B.tail_fraction(),
        "tail_A": P.A.tail_fraction(),
        "reversibility_defect": P.B.reversibility_defect() + P.A.reversibility_defect(),
    }
    if prev is not None:
        rec["step_distance"] = P.distance(prev)
    return rec


def iterate(P0: PairH, steps: int, opts: RgOptions, tol: float = 1e-10) -> Trajectory:
    """R_3n iterates of P0 with per-step diagnostics (window |x - x0| <= 0.2, 101 samples)."""
    dets = DetTrack.from_pair(P0)
    traj = Trajectory([P0], [dict(step=0, **diagnostics(P0, dets))])
    P = P0
    for k in range(1, steps + 1):
        Q, info = renormalize(P, opts)
        for sc in info.substep_scales:
            dets = dets.step().rescaled(sc)
        dets = dets.rescaled(info.scales)
        rec = dict(step=k, sigma=info.sigma, scale_B=info.scales[0], scale_A=info.scales[1], **diagnostics(Q, dets, P))
        rec["converged"] = bool(rec["step_distance"] < tol)
        traj.pairs.append(Q)
        traj.records.append(rec)
        P = Q
    return traj


# ---------------------------------------------------------------- direct path


def word_exponents(steps: int) -> tuple[tuple[int, int], tuple[int, int]]:
    """Exponents (m, j) with F_k ~ F^m G^j and G_k ~ F^m G^j after `steps` C3 steps.

    Valid for commuting pairs, where only the exponents matter.
    """
    F, G = (1, 0), (0, 1)
    for _ in range(steps):
        F, G = (2 * G[0] - F[0], 2 * G[1] - F[1]), (2 * F[0] - 3 * G[0], 2 * F[1] - 3 * G[1])
    return F, G


def _check_translation(F: Optional[SkewProduct]):
    if F is None:
        return
    fac = F.factor
    ok = abs(F.alpha - 1.0) < 1e-15 and isinstance(fac, ConstantMatrix) and np.allclose(fac.matrix, np.eye(2))
    if not ok:
        raise ValueError("direct evaluation needs F = (1, identity) commuting with G")


def _direct_word(n: int, k: int, component: str):
    F_exp, G_exp = word_exponents(n * k)
    return F_exp if component == "B" else G_exp


def _direct_L(n: int, k: int, L_choice: str, sigma: float) -> np.ndarray:
    L = np.eye(2)
    if L_choice != "identity" and (n * k) % 2 == 1:
        L = S_MATRIX.copy()
    if sigma:
        L = L @ exp_sigma_s(sigma)
    return L


def direct_factor(G: SkewProduct, F: Optional[SkewProduct], n: int, k: int, x, component: str = "A",
                  L_choice: str = "S", sigma: float = 0.0):
    """Symmetric factor of the k-times renormalized pair, by explicit products.

    F is the trivial unit translation and A has period 1, so F^m G^j has
    matrix part A^{*j} and symmetric factor A^{*j}_o(x - m/2); for j < 0 the
    quasi-inverse product is used, as in the composition rule. The argument
    is scaled by alpha^{3nk}; sigma is the accumulated e^{sigma S} conjugation.
    Returns (unit-norm matrix, log scale).
    """
    _check_translation(F)
    m, j = _direct_word(n, k, component)
    x = np.asarray(x)
    y = (ALPHA ** (3 * n * k)) * x - 0.5 * (m % 2)
    if j == 0:
        mat = np.broadcast_to(np.eye(2) / math.sqrt(2), x.shape + (2, 2)).copy()
        logs = np.full(x.shape, 0.5 * math.log(2)) if x.ndim else 0.5 * math.log(2)
    else:
        mat, logs = symmetric_product(G, j, y, quasi=True)
    L = _direct_L(n, k, L_choice, sigma)
    if not np.allclose(L, np.eye(2)):
        mat = np.linalg.inv(L) @ mat @ L
    return mat, logs


def direct_log_singular_ratio(G: SkewProduct, F: Optional[SkewProduct], n: int, k: int, x, component: str = "A",
                              L_choice: str = "S", sigma: float = 0.0):
    """log(s_min/s_max) of the renormalized factor, with det summed factor by factor."""
    mat, logs = direct_factor(G, F, n, k, x, component, L_choice, sigma)
    m, j = _direct_word(n, k, component)
    y = (ALPHA ** (3 * n * k)) * np.asarray(x) - 0.5 * (m % 2)
    log_det = log_abs_det(G, j, y, symmetric=True)
    # det is invariant under the conjugation; mat carries unit norm, so rescale
    return log_singular_ratio(mat, log_det - 2 * np.asarray(logs))


def direct_lengths(n: int, k: int) -> tuple[int, int]:
    """(p_{3nk}, q_{3nk}): product lengths of the B and A components."""
    return fibonacci(3 * n * k), fib_q(3 * n * k)


# ---------------------------------------------------------------- unstable direction


def a_entry_at(P: PairH, rho: float) -> float:
    return float(P.A(rho)[0, 0])


def unstable_eigenvalue(family: Callable[[float], PairH], opts: RgOptions, rho: float, eps0: float = 0.0,
                        h: float = 1e-6, k: int = 2) -> float:
    """Expansion rate of the stable-manifold residual a_A(rho) across one R_3n step.

    Central differences in the family parameter at steps k and k+1.
    """
    derivs = []
    plus, minus = family(eps0 + h), family(eps0 - h)
    for step in range(k + 1):
        plus, minus = r3n_series(plus, opts), r3n_series(minus, opts)
        if step >= k - 1:
            derivs.append((a_entry_at(plus, rho) - a_entry_at(minus, rho)) / (2 * h))
    if derivs[0] == 0.0:
        raise ValueError("family is not transversal to the stable manifold")
    return derivs[1] / derivs[0]
