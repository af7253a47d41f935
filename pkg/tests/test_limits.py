import json
import math
from functools import lru_cache

import numpy as np
import pytest
from scipy.special import polygamma

from goldrg.golden import GoldenNumber, parse_golden
from goldrg.limits import (
    DENSITY_A,
    DENSITY_B,
    FixedPointPair,
    LimitProduct,
    build_limit,
    constant_shift_matrix,
    evaluate,
    fixed_point,
    tail_estimate,
)
from goldrg.rg import RgOptions, r3n_series
from goldrg.zeros import limit_zero_sets

RHO = parse_golden("1/4")
XS = np.linspace(-0.5, 0.5, 101)


@lru_cache(maxsize=None)
def limit_pair(cutoff=300.0):
    return fixed_point(RHO, 2, cutoff)


def half_integers(count):
    return [parse_golden(f"{2 * j + 1}/2") for j in range(count)]


@pytest.mark.parametrize("C", [50, 500])
def test_cosine_product(C):
    # cos(pi x) = prod (1 - x^2/(j + 1/2)^2), one zero per unit length
    zs = half_integers(C)
    bare = LimitProduct(zs, C)
    corrected = LimitProduct(zs, C, tail=tail_estimate(C, C, 1.0))
    xs = np.linspace(-2, 2, 17)
    err_bare = np.abs(bare(xs) - np.cos(np.pi * xs)).max()
    err = np.abs(corrected(xs) - np.cos(np.pi * xs)).max()
    assert err < 1e-3 * err_bare
    assert err < 5.0 / C**3


def test_tail_estimate_against_trigamma():
    for C in (20, 200, 2000):
        exact = float(polygamma(1, C + 0.5))
        assert abs(tail_estimate(C, C, 1.0) - exact) < 1e-3 * exact


def test_tail_bound_holds():
    f = LimitProduct(half_integers(40), 40)
    for x in (0.3, 1.3, 5.0):
        actual = abs(math.log(abs(f(x) / math.cos(math.pi * x))))
        assert actual <= f.tail_bound(x)
    assert f.tail_bound(40.0) == math.inf


def test_evaluate_zeros_and_symmetry():
    f = LimitProduct(half_integers(10), 10, log_prefactor=0.7, sign=-1)
    assert f(0.5) == 0.0 and f(-1.5) == 0.0
    xs = np.linspace(0, 3, 13)
    assert np.allclose(f(xs), f(-xs))
    assert math.isclose(float(f(0.0)), -math.exp(0.7))
    z = xs + 0j
    assert np.allclose(evaluate(f, z).real, f(xs), atol=1e-12)
    assert np.allclose(np.log(np.abs(f(xs + 0.01))), f.log_abs(xs + 0.01))


def test_limit_product_validation():
    with pytest.raises(ValueError):
        LimitProduct([parse_golden("-1/2")], 1.0)
    with pytest.raises(ValueError):
        LimitProduct([parse_golden("1/2"), parse_golden("1/2")], 1.0)
    with pytest.raises(ValueError):
        LimitProduct([], 1.0, sign=0)


def test_cutoff_beyond_window():
    zs = limit_zero_sets(RHO, 2, window_radius=GoldenNumber(20))
    with pytest.raises(ValueError):
        build_limit(zs, 30.0)


def test_constant_shift_matrix():
    for n in (1, 2, 3):
        U = np.array([[0, 1], [1, 1]])
        assert np.array_equal(constant_shift_matrix(n), np.linalg.matrix_power(U, 3 * n))


def test_fixed_point_residual():
    fp = limit_pair()
    rb, ra = fp.residual(XS)
    assert max(rb, ra) < 1e-6
    assert fp.b(0.0) > 0 > fp.a(0.0)


def test_fixed_point_convergence_in_cutoff():
    coarse = fixed_point(RHO, 2, 100.0).residual(XS)
    fine = limit_pair().residual(XS)
    assert max(fine) < max(coarse)


def test_zeros_of_a_near_origin():
    fp = limit_pair()
    assert fp.a.smallest_zero() == RHO
    assert fp.a(0.25) == 0.0 and fp.a(-0.25) == 0.0
    assert np.all(fp.a(np.linspace(-0.24, 0.24, 49)) < 0)
    assert np.all(fp.b(XS) > 0)


def test_zero_densities():
    fp = limit_pair()
    C = fp.a.cutoff
    assert abs(len(fp.a.zeros) / C - DENSITY_A) < 0.02
    assert abs(len(fp.b.zeros) / C - DENSITY_B) < 0.02


def test_matrix_fixed_point():
    fp = limit_pair()
    P = fp.to_pair()
    Q = r3n_series(P, RgOptions(n=2, L_choice="S", normalization="none"))
    assert P.distance(Q) < 1e-7 * P.norm()


def test_sign_convention_enforced():
    fp = limit_pair()
    with pytest.raises(ValueError):
        FixedPointPair(fp.a, fp.b, 2)


def test_json_roundtrip():
    fp = limit_pair()
    back = FixedPointPair.from_json(json.dumps(fp.to_json()))
    assert back.b.zeros == fp.b.zeros
    assert np.array_equal(back.a(XS), fp.a(XS))
