import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from goldrg.analytic import MatrixSeries, PairH
from goldrg.cocycle import ConstantMatrix, S_MATRIX, ScaledSchrodinger, SkewProduct, golden_skew
from goldrg.golden import ALPHA, GoldenNumber
from goldrg.rg import (
    A3,
    X0,
    DetTrack,
    RgOptions,
    SigmaError,
    SymbolicMap,
    c3,
    direct_factor,
    direct_lengths,
    direct_log_singular_ratio,
    exp_sigma_s,
    iterate,
    normalize,
    r3_step,
    r3n_series,
    rank1_pair,
    renormalize,
    rescale,
    scaled_am_pair,
    sigma_residual,
    sigma_solve,
    unstable_eigenvalue,
    word_exponents,
)

XS = np.linspace(-0.3, 0.3, 7)
UNIT = golden_skew(ConstantMatrix(np.eye(2)))
TRANSLATION = SkewProduct(GoldenNumber(1), ConstantMatrix(np.eye(2)))


def unit_rows(m):
    return m / np.linalg.norm(m, axis=(-2, -1))[..., None, None]


def test_c3_oracle_matches_series_step():
    P = scaled_am_pair(0.2, 0.1)
    F = SymbolicMap(1.0, lambda x: np.broadcast_to(np.eye(2), np.shape(x) + (2, 2)))
    G = SymbolicMap(ALPHA, P.A)
    Ft, Gt = c3(F, G)
    Ft, Gt = rescale(Ft, A3), rescale(Gt, A3)
    R = r3_step(P)
    assert np.max(np.abs(Ft(XS) - R.B(XS))) < 1e-12
    assert np.max(np.abs(Gt(XS) - R.A(XS))) < 1e-12


def test_frequency_bookkeeping():
    F = SymbolicMap(1.0, lambda x: np.eye(2))
    G = SymbolicMap(ALPHA, lambda x: np.eye(2))
    Ft, Gt = c3(F, G)
    # 2 alpha - 1 = alpha^3 and 2 - 3 alpha = alpha^4
    assert math.isclose(Ft.frequency, ALPHA**3, rel_tol=1e-14)
    assert math.isclose(Gt.frequency, ALPHA**4, rel_tol=1e-14)
    Ft, Gt = rescale(Ft, A3), rescale(Gt, A3)
    assert math.isclose(Ft.frequency, 1.0, rel_tol=1e-14)
    assert math.isclose(Gt.frequency, ALPHA, rel_tol=1e-14)


@pytest.mark.parametrize("steps,F,G", [(0, (1, 0), (0, 1)), (1, (-1, 2), (2, -3)), (2, (5, -8), (-8, 13))])
def test_word_exponents(steps, F, G):
    assert word_exponents(steps) == (F, G)


def test_word_exponents_track_lengths():
    for s in range(1, 6):
        (_, jb), (_, ja) = word_exponents(s)
        pb, qa = direct_lengths(1, s)
        assert abs(jb) == pb and abs(ja) == qa


def test_reversibility_preserved():
    P = scaled_am_pair(0.3, 0.2)
    opts = RgOptions(n=1, L_choice="S", normalization="norm")
    for _ in range(3):
        P = r3n_series(P, opts)
        assert P.B.reversibility_defect() + P.A.reversibility_defect() < 1e-10


def test_smoothing():
    rng = np.random.default_rng(7)
    deg = 64
    c = rng.normal(size=(2, 2, deg + 1)) * 0.9 ** np.arange(deg + 1)
    c[0, 0, 0] += 5
    c[1, 1, 0] += 5
    B = MatrixSeries(c, 0.4)
    A = MatrixSeries(c.copy(), 0.6)
    P = PairH(B, A)
    Q = r3_step(P)
    assert Q.A.tail_fraction() < 1e-3 * A.tail_fraction()


@pytest.mark.parametrize("k", [1, 2, 3])
def test_direct_matches_series(k):
    G = golden_skew(ScaledSchrodinger(0.2, 0.1))
    opts = RgOptions(n=1, L_choice="S", normalization="none")
    P = scaled_am_pair(0.2, 0.1)
    for _ in range(k):
        P = r3n_series(P, opts)
    for comp, S in (("A", P.A), ("B", P.B)):
        mat, _ = direct_factor(G, TRANSLATION, 1, k, XS, comp)
        assert np.max(np.abs(mat - unit_rows(S(XS)))) < 1e-9


def test_direct_rejects_nontrivial_translation():
    G = golden_skew(ScaledSchrodinger(0.2, 0.1))
    with pytest.raises(ValueError):
        direct_factor(G, UNIT, 1, 1, XS)


def test_det_track_matches_direct():
    delta, eps = 0.2, 0.0
    G = golden_skew(ScaledSchrodinger(delta, eps))
    opts = RgOptions(n=1, L_choice="S", normalization="norm")
    traj = iterate(scaled_am_pair(delta, eps), 3, opts)
    xs = X0 + np.linspace(-0.2, 0.2, 101)
    for k in (1, 2, 3):
        series = traj.records[k]["log_singular_ratio_A"]
        direct = float(direct_log_singular_ratio(G, None, 1, k, xs).max())
        assert abs(series - direct) < 1e-9 * abs(direct)


def test_det_track_consistent_with_pair():
    P = scaled_am_pair(0.4, 0.3)
    opts = RgOptions(n=1, L_choice="S", normalization="none")
    Q = r3n_series(P, opts)
    d = DetTrack.from_pair(P).step()
    x = 0.1
    assert math.isclose(float(d.log_abs_A(x)), math.log(abs(np.linalg.det(Q.A(x)))), rel_tol=1e-9)


def test_sigma_solve_examples():
    M = np.array([[1.0, 0.7], [0.3, 2.0]])
    s = sigma_solve(M)
    E = exp_sigma_s(s)
    C = np.linalg.inv(E) @ M @ E
    assert abs(C[1, 0]) < 1e-12
    assert abs(sigma_residual(M, s)) < 1e-12
    assert sigma_solve(np.array([[1.0, 0.5], [0.0, 2.0]])) == 0.0
    with pytest.raises(SigmaError):
        sigma_solve(np.array([[1.0, 0.0], [1.0, 1.0]]))


@settings(max_examples=30, deadline=None)
@given(st.floats(-0.9, 0.9), st.floats(0.5, 3), st.floats(-1, 1))
def test_sigma_recovers_conjugation(sigma, a, b):
    # an upper-triangular matrix conjugated by e^{sigma S} is brought back
    M = np.array([[a, b], [0.0, a + 1.0]])
    E = exp_sigma_s(sigma)
    N = E @ M @ np.linalg.inv(E)
    s = sigma_solve(N)
    assert abs(sigma_residual(N, s)) < 1e-10 * max(1.0, np.abs(N).max())


def test_normalize_projective_invariance():
    P = r3_step(scaled_am_pair(0.2, 0.1))
    opts = RgOptions(n=1, normalization="norm")
    Q1, _ = normalize(P, opts)
    Q2, (mb, ma) = normalize(PairH(P.B.scaled(3.5), P.A.scaled(0.01)), opts)
    assert Q1.distance(Q2) < 1e-12
    assert math.isclose(Q2.B.norm(), 1.0) and math.isclose(Q2.A.norm(), 1.0)


def test_trace_normalization_needs_target():
    with pytest.raises(ValueError):
        RgOptions(normalization="trace")
    P = r3_step(scaled_am_pair(0.2, 0.1))
    Q, _ = normalize(P, RgOptions(normalization="trace", target_b0=2.0))
    assert math.isclose(float(np.trace(Q.B(0.0))), 2.0)


def test_odd_n_conjugates_by_s():
    P = scaled_am_pair(0.2, 0.1)
    Q_id, _ = renormalize(P, RgOptions(n=1, L_choice="identity", normalization="none"))
    Q_s, _ = renormalize(P, RgOptions(n=1, L_choice="S", normalization="none"))
    assert np.allclose(S_MATRIX @ Q_id.A(0.1) @ S_MATRIX, Q_s.A(0.1))
    # even n: L = S contributes S^n = identity
    R_id, _ = renormalize(P, RgOptions(n=2, L_choice="identity", normalization="none"))
    R_s, _ = renormalize(P, RgOptions(n=2, L_choice="S", normalization="none"))
    assert R_id.distance(R_s) == 0.0


def test_rank1_shape_kept():
    b = np.zeros(65)
    a = np.zeros(65)
    b[0], b[2] = 2.0, -1.0
    a[0], a[2] = 1.0, -3.0
    P = rank1_pair(b, a)
    Q, info = renormalize(P, RgOptions(n=1, L_choice="S", normalization="norm"))
    # B stays a multiple of diag(0, 1) and A a multiple of diag(1, 0)
    for x in (-0.2, 0.0, 0.3):
        B, A = Q.B(x), Q.A(x)
        assert abs(B[0, 0]) + abs(B[0, 1]) + abs(B[1, 0]) < 1e-12
        assert abs(A[1, 1]) + abs(A[0, 1]) + abs(A[1, 0]) < 1e-12
    assert sigma_solve(Q) == 0.0


def test_iterate_records():
    traj = iterate(scaled_am_pair(0.2, 0.0), 2, RgOptions(n=1))
    assert [r["step"] for r in traj.records] == [0, 1, 2]
    assert "step_distance" in traj.records[1] and "converged" in traj.records[2]
    assert len(traj.pairs) == 3


def test_unstable_eigenvalue_nontransversal():
    flat = lambda e: scaled_am_pair(0.2, 0.0)
    with pytest.raises(ValueError):
        unstable_eigenvalue(flat, RgOptions(n=1), 0.25, k=1)
