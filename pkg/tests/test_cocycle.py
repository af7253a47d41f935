import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from goldrg.cocycle import (
    ConstantMatrix,
    Rank1Scalar,
    S_MATRIX,
    ScaledSchrodinger,
    Schrodinger,
    det2,
    golden_skew,
    half_steps,
    is_reversible,
    log_abs_det,
    lyapunov,
    product,
    quasi_inverse,
    rotation_lift,
    rotation_sign_count,
    symmetric_product,
)
from goldrg.golden import ALPHA, GoldenNumber, fibonacci


def naive_product(fac, q, x, alpha=ALPHA):
    M = np.eye(2)
    for j in range(q):
        M = fac(x + j * alpha) @ M
    return M


def unscale(pair):
    M, log = pair
    return M * math.exp(log)


@pytest.mark.parametrize("q", [1, 2, 5, 13])
def test_product_matches_loop(q):
    fac = Schrodinger(1.3, 0.4)
    G = golden_skew(fac)
    for x in (0.0, 0.17, -0.41):
        assert np.allclose(unscale(product(G, q, x)), naive_product(fac, q, x), rtol=1e-11, atol=1e-11)


def test_generic_factor_path():
    fac = Rank1Scalar(lambda x: 1.5 + np.sin(2 * np.pi * x), matrix=[[1.0, 0.3], [0.2, 0.7]])
    G = golden_skew(fac)
    assert np.allclose(unscale(product(G, 7, 0.3)), naive_product(fac, 7, 0.3), rtol=1e-11)


def test_negative_product_inverts():
    G = golden_skew(Schrodinger(2.0, 0.5))
    x = 0.23
    fwd = unscale(product(G, 5, x - 5 * ALPHA))
    back = unscale(product(G, -5, x))
    assert np.allclose(back @ fwd, np.eye(2), atol=1e-9)


def test_vectorized_product():
    G = golden_skew(Schrodinger(1.0, 0.0))
    xs = np.linspace(-0.5, 0.5, 7)
    mats, logs = product(G, 8, xs)
    for i, x in enumerate(xs):
        assert np.allclose(mats[i] * math.exp(logs[i]), naive_product(G.factor, 8, x), rtol=1e-10)


def test_symmetric_product_shift():
    G = golden_skew(Schrodinger(1.0, 0.2))
    x = 0.1
    lhs = unscale(symmetric_product(G, 6, x))
    rhs = naive_product(G.factor, 6, x - 3 * ALPHA)
    assert np.allclose(lhs, rhs, rtol=1e-10)


@settings(max_examples=25)
@given(st.integers(min_value=1, max_value=2**25), st.integers(min_value=-100, max_value=100))
def test_half_steps_exact(m, sign):
    m = m if sign >= 0 else -m
    got = half_steps(GoldenNumber(0, 1), np.array([m]))[0]
    with mpmath.workprec(200):
        exact = m * (mpmath.sqrt(5) - 1) / 4
        exact -= mpmath.nint(exact)
    assert abs(got - float(exact)) < 1e-15 or abs(abs(got - float(exact)) - 1) < 1e-15


def test_quasi_inverse_identity():
    rng = np.random.default_rng(1)
    m = rng.normal(size=(10, 2, 2))
    assert np.allclose(quasi_inverse(m) @ m, det2(m)[:, None, None] * np.eye(2))
    assert np.allclose(quasi_inverse(quasi_inverse(m)), m)


def test_log_abs_det():
    fac = Rank1Scalar(lambda x: 1.5 + np.sin(2 * np.pi * x), matrix=[[1.0, 0.3], [0.2, 0.7]])
    G = golden_skew(fac)
    expected = math.log(abs(np.linalg.det(naive_product(fac, 9, 0.2))))
    assert math.isclose(log_abs_det(G, 9, 0.2), expected, rel_tol=1e-10)
    H = golden_skew(ScaledSchrodinger(0.3, 0.1))
    assert math.isclose(log_abs_det(H, 9, 0.2), 18 * math.log(0.3))


def test_lyapunov_herman_bound():
    # supercritical almost Mathieu: L = log(lam) on the spectrum, >= log(lam) always
    for lam in (2.0, 4.0):
        G = golden_skew(Schrodinger(lam, 0.0))
        L = lyapunov(G, fibonacci(22))
        assert abs(L - math.log(lam)) < 0.03


def test_lyapunov_constant_factor():
    M = np.array([[2.0, 1.0], [0.0, 0.5]])
    G = golden_skew(ConstantMatrix(M))
    assert abs(lyapunov(G, 2000) - math.log(2.0)) < 1e-3


def test_rotation_sign_count_vs_lift():
    for lam, E in ((3.0, 0.0), (0.5, 1.0), (1.0, -0.7)):
        G = golden_skew(Schrodinger(lam, E))
        N = fibonacci(20)
        rs = float(rotation_sign_count(G, N))
        rl = rotation_lift(G, N)
        assert abs(rs - rl) <= 1.0 / N


def test_rotation_free_laplacian():
    # lam = 0: rotation number arccos(-E/2)/(2 pi)
    for E in (-1.0, 0.0, 1.2):
        G = golden_skew(Schrodinger(0.0, E))
        rot = float(rotation_sign_count(G, 5000))
        assert abs(rot - math.acos(-E / 2) / (2 * math.pi)) < 1e-3


def test_rotation_monotone_in_energy():
    N = fibonacci(18)
    vals = [float(rotation_sign_count(golden_skew(Schrodinger(2.0, E)), N)) for E in np.linspace(-4, 4, 9)]
    assert all(b >= a for a, b in zip(vals, vals[1:]))


def test_rank1_annihilated_vector():
    G = golden_skew(Rank1Scalar(lambda x: np.cos(x)))
    with pytest.raises(ValueError):
        rotation_sign_count(G, 10, y0=(0.0, 1.0))


def test_reversibility():
    assert is_reversible(golden_skew(Schrodinger(2.0, 0.3)))
    assert is_reversible(golden_skew(ScaledSchrodinger(0.2, 0.1)))
    # a factor with no reflection symmetry
    odd = Rank1Scalar(lambda x: 1 + 0.5 * np.sin(2 * np.pi * x), matrix=[[1.0, 0.3], [0.2, 0.7]])
    assert not is_reversible(golden_skew(odd))
    assert np.allclose(S_MATRIX @ S_MATRIX, np.eye(2))
