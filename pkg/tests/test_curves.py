from fractions import Fraction
from functools import lru_cache

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from goldrg.cocycle import ALPHA, Rank1Scalar, golden_skew, rotation_sign_count
from goldrg.curves import (
    CurveError,
    critical_curve,
    ids_limit,
    limit_epsilon,
    limit_rotation,
    measured_rotation,
    rotation_bracket,
    stable_manifold_residual,
)
from goldrg.golden import fibonacci, parse_golden

RHO = parse_golden("1/4")


@lru_cache(maxsize=None)
def point(delta, rho="1/4"):
    return critical_curve(parse_golden(rho), delta)


@settings(max_examples=30)
@given(st.floats(-1.99, 1.99))
def test_ids_closed_form_vs_generic(eps):
    generic = ids_limit(eps, potential=lambda x: -2.0 * np.cos(2 * np.pi * x))
    assert abs(generic - ids_limit(eps)) < 1e-9


def test_ids_generic_potential():
    # v(x) = x - 1/2 on [0, 1): measure of {v <= eps} is eps + 1/2
    v = lambda x: np.asarray(x) - 0.5
    for eps in (-0.3, 0.0, 0.25):
        assert abs(ids_limit(eps, potential=v) - (eps + 0.5)) < 1e-9
    assert ids_limit(-3.0) == 0.0 and ids_limit(3.0) == 1.0


@settings(max_examples=20)
@given(st.floats(0.01, 0.49))
def test_limit_rotation_inverse(rho):
    assert abs(limit_rotation(limit_epsilon(rho)) - rho) < 1e-12


def test_limit_rotation_domain():
    with pytest.raises(ValueError):
        limit_rotation(2.5)


@pytest.mark.parametrize("rho", [0.1, 0.25, 0.4])
def test_ids_is_twice_rotation(rho):
    N = fibonacci(20)
    eps = limit_epsilon(rho)
    fac = Rank1Scalar(lambda x: -eps - 2 * np.cos(2 * np.pi * (x + ALPHA / 2)))
    rot = float(rotation_sign_count(golden_skew(fac), N))
    assert abs(ids_limit(eps) - 2 * rot) < 2.0 / N


@pytest.mark.parametrize("delta", [0.1, 0.2, 0.3])
def test_sandwich_bound(delta):
    # the off-diagonal part moves the eps at fixed rotation number by at most 2 delta
    p = point(delta)
    eps0 = limit_epsilon(0.25)
    assert eps0 - 2 * delta <= p.epsilon <= eps0 + 2 * delta


@pytest.mark.parametrize("delta", [0.1, 0.2, 0.3])
def test_quarter_is_at_zero(delta):
    p = point(delta)
    assert abs(p.epsilon) < 1e-6
    assert p.method.startswith("stable-manifold")
    assert p.bracket[0] <= p.epsilon <= p.bracket[1]


def test_residual_changes_sign_across_bracket():
    p = point(0.2)
    lo, hi = p.bracket
    for k in (1, 2):
        g_lo = stable_manifold_residual(0.2, lo, RHO, k)
        g_hi = stable_manifold_residual(0.2, hi, RHO, k)
        assert g_lo * g_hi < 0


def test_brackets_consistent_across_orbit_lengths():
    p = point(0.2)
    (a, b), (c, d) = p.bracket, p.check_bracket
    assert abs(0.5 * (a + b) - 0.5 * (c + d)) < 1e-3
    assert abs(p.epsilon - 0.5 * (c + d)) < 1e-3


def test_rotation_at_critical_point():
    p = point(0.2)
    N = fibonacci(26)
    # within one sign count of 1/4
    assert abs(measured_rotation(0.2, p.epsilon, N) - Fraction(1, 4)) <= Fraction(1, 2 * N)
    assert p.residual <= 1.0 / (2 * N)


def test_rotation_monotone_in_eps():
    N = fibonacci(18)
    vals = [measured_rotation(0.3, e, N) for e in np.linspace(-1.5, 1.5, 13)]
    # monotone up to a single sign count
    assert all(b >= a - Fraction(1, 2 * N) for a, b in zip(vals, vals[1:]))
    assert vals[-1] - vals[0] > 0.2


def test_no_crossing():
    with pytest.raises(CurveError):
        rotation_bracket(0.2, Fraction(1, 4), fibonacci(16), 0.5, 1.0, 1e-6)


def test_delta_zero_and_range():
    p = critical_curve(RHO, 0.0)
    assert p.epsilon == pytest.approx(limit_epsilon(0.25), abs=1e-15)
    with pytest.raises(ValueError):
        critical_curve(RHO, 0.6)


def test_non_quadratic_near_delta_zero():
    # rho = 1/5 has n = 20 > n_max, so the plateau midpoint is used
    p0 = critical_curve(parse_golden("1/5"), 0.0)
    p = point(0.05, "1/5")
    assert p.method.startswith("plateau-midpoint")
    assert abs(p.epsilon - p0.epsilon) < 10 * 0.05**2


def test_other_periodic_rotation():
    p = point(0.1, "3/8")
    assert p.method.startswith("stable-manifold")
    assert p.bracket[0] <= p.epsilon <= p.bracket[1]
    assert stable_manifold_residual(0.1, p.epsilon, parse_golden("3/8"), 2) == pytest.approx(0.0, abs=1e-10)
