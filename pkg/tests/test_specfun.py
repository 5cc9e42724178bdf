import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wghelmholtz.specfun import (SERIES_MAX_X, SeriesControl, SeriesConvergenceError,
                                 bessel_j0, bessel_j1, bessel_j_nu, gamma_fn)

mpmath.mp.dps = 30


def mp_j(nu, x):
    return float(mpmath.besselj(nu, x))


def bisect(f, a, b, tol=1e-15):
    fa = f(a)
    for _ in range(200):
        m = 0.5 * (a + b)
        fm = f(m)
        if fa * fm <= 0:
            b = m
        else:
            a, fa = m, fm
        if b - a < tol:
            break
    return 0.5 * (a + b)


def test_j0_j1_values_at_zero():
    assert bessel_j0(0.0) == 1.0
    assert bessel_j1(0.0) == 0.0
    assert bessel_j_nu(1.0, 0.0) == 0.0
    assert bessel_j_nu(0.0, 0.0) == 1.0
    assert bessel_j_nu(2 / 3, 0.0) == 0.0


def test_first_zeros_against_bisection_oracle():
    # oracle: bisection on the high-precision mpmath series
    z0 = bisect(lambda x: mp_j(0, x), 2.0, 3.0)
    z1 = bisect(lambda x: mp_j(1, x), 3.5, 4.0)
    assert abs(z0 - 2.404825557695773) < 1e-12
    assert abs(z1 - 3.831705970207512) < 1e-12
    assert abs(bessel_j0(2.404825557695773)) < 1e-10
    assert abs(bessel_j1(3.831705970207512)) < 1e-10


@pytest.mark.parametrize("x", np.concatenate([np.linspace(0, 30, 61), [50, 99.5, 150, 240, 300]]))
def test_j0_j1_against_mpmath(x):
    for fn, n in ((bessel_j0, 0), (bessel_j1, 1)):
        ref = mp_j(n, x)
        assert abs(fn(x) - ref) <= 1e-12 * max(1.0, abs(ref))


def test_parity():
    x = np.linspace(-100, 100, 100)
    np.testing.assert_array_equal(bessel_j0(-x), bessel_j0(x))
    np.testing.assert_array_equal(bessel_j1(-x), -bessel_j1(x))


@pytest.mark.parametrize("x", [0.5, 5.0, 50.0])
def test_derivative_identity(x):
    h = 1e-5
    fd = (bessel_j0(x + h) - bessel_j0(x - h)) / (2 * h)
    assert abs(fd + bessel_j1(x)) < 1e-6


def test_half_integer_closed_form_example():
    x = 2.0
    ref = math.sqrt(2 / (math.pi * x)) * (math.sin(x) / x - math.cos(x))
    assert abs(bessel_j_nu(1.5, x) - ref) < 1e-11


def test_half_integer_closed_form_grid():
    x = np.linspace(0.05, 10, 200)
    ref = np.sqrt(2 / (np.pi * x)) * (np.sin(x) / x - np.cos(x))
    np.testing.assert_allclose(bessel_j_nu(1.5, x), ref, rtol=0, atol=1e-11)


@pytest.mark.parametrize("nu", [2 / 3, 1.0, 1.5])
@pytest.mark.parametrize("x", [0.5, 1.0, 2.0, 3.0, 4.0])
def test_recurrence(nu, x):
    lhs = bessel_j_nu(nu - 1, x) + bessel_j_nu(nu + 1, x) if nu >= 1 else \
        mp_j(nu - 1, x) + bessel_j_nu(nu + 1, x)
    assert abs(lhs - 2 * nu / x * bessel_j_nu(nu, x)) <= 1e-10


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 5), st.floats(0, 50))
def test_j_nu_against_mpmath(nu, x):
    ref = mp_j(nu, x)
    val = bessel_j_nu(nu, x)
    assert abs(val - ref) <= 1e-11 * max(abs(ref), 1e-3) + 1e-14


def test_j_nu_vectorized_across_switch():
    x = np.array([0.1, SERIES_MAX_X, SERIES_MAX_X + 1e-9, 20.0])
    vals = bessel_j_nu(2 / 3, x)
    ref = [mp_j(2 / 3, v) for v in x]
    np.testing.assert_allclose(vals, ref, rtol=1e-12, atol=1e-15)


def test_series_nonconvergence_reported():
    with pytest.raises(SeriesConvergenceError):
        bessel_j_nu(0.5, 7.5, SeriesControl(rel_tol=1e-14, max_terms=10))
    with pytest.raises(ValueError):
        SeriesControl(rel_tol=0)
    with pytest.raises(ValueError):
        bessel_j_nu(-1.0, 1.0)


def test_gamma():
    assert gamma_fn(1.0) == 1.0
    assert abs(gamma_fn(0.5) - math.sqrt(math.pi)) < 1e-12 * math.sqrt(math.pi)
    x = 2 / 3
    assert abs(gamma_fn(x + 1) - x * gamma_fn(x)) < 1e-12
    xs = np.linspace(0.1, 49.0, 97)
    ref = np.array([float(mpmath.gamma(v)) for v in xs])
    np.testing.assert_allclose(gamma_fn(xs), ref, rtol=1e-12)
