"""Quantitative acceptance checks, one test per check, with thresholds asserted here.

Each result line ([PASS]/[FAIL] ...) is collected and printed in the pytest
terminal summary; `python3 tests/test_acceptance.py` prints them directly.
"""

import math

import pytest

from goldrg import acceptance as acc
from goldrg.golden import ALPHA

RESULTS: list = []


def record(check):
    res = check()
    RESULTS.append(res)
    print(res.line())
    return res


def test_fibonacci_identity():
    res = record(acc.check_identity)
    assert res.measured["failures"] == 0
    assert res.passed


def test_lyapunov_exponent():
    res = record(acc.check_lyapunov)
    assert abs(res.measured["L"] - math.log(3)) < 0.02
    assert res.passed


def test_rotation_number():
    res = record(acc.check_rotation)
    assert abs(res.measured["sign_count"] - 0.25) < 1e-3
    assert res.measured["diff_times_N"] <= 1.0
    assert res.passed


def test_limit_family_rotation_and_ids():
    res = record(acc.check_limit_family)
    assert res.measured["max_rot_error"] < 1e-3
    assert res.measured["max_ids_error"] < res.measured["2/N"]
    assert res.passed


def test_zero_dynamics():
    res = record(acc.check_zero_dynamics)
    m = res.measured
    assert m["n"] == 2 and m["at_most_one"] and m["gaps_ok"] and m["congruences"] and m["rho0_control"]
    assert res.passed


def test_fixed_point_residual():
    res = record(acc.check_fixed_point)
    assert max(res.measured["residual_b"], res.measured["residual_a"]) < 1e-6
    assert res.passed


def test_zeros_of_limit_a():
    res = record(acc.check_zero_locations)
    assert res.measured["zeros"] == ["1/4"] and res.measured["sign_changes"] == 2
    assert res.passed


def test_critical_curve_quarter():
    res = record(acc.check_critical_curve)
    assert res.measured["max_abs_eps"] < 1e-6
    assert res.passed


def test_supercritical_collapse():
    res = record(acc.check_collapse)
    logs = res.measured["log_ratio"]
    assert all(b < a for a, b in zip(logs, logs[1:]))
    assert logs[0] - logs[-1] >= math.log(10)
    assert res.measured["direct_rel_dev"] < 1e-6
    target = ALPHA**12
    assert all(abs(r / target - 1) < 0.25 for r in res.measured["variance_rates"])
    assert res.passed


def test_unstable_eigenvalue():
    res = record(acc.check_unstable)
    assert abs(res.measured["estimate"] / ALPHA**-6 - 1) < 0.05
    assert res.passed


@pytest.mark.slow
def test_scaling_limit():
    res = record(acc.check_scaling_limit)
    e = res.measured["errors"]
    assert len(e) >= 3 and all(b < a for a, b in zip(e, e[1:]))
    assert abs(res.measured["slope_M"] / -res.measured["L"] - 1) < 0.1
    assert res.passed


if __name__ == "__main__":
    for chk in acc.CHECKS:
        print(chk().line(), flush=True)
