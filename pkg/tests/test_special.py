"""Gamma and Bessel routines against mpmath values (frozen, 30 digits)."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as hst

from stabletorsion import special as sp

# [DERIVED] mpmath.gamma / loggamma / besselj / besseljzero at 30 digits, then frozen
GAMMA_0_3 = 2.99156898768759074464216067520
LOGGAMMA_50_5 = 146.519255490720627221891301049
J0_1 = 0.765197686557966551449717526103
J15_25 = 0.525080264664003145948604934574
J3_7 = -0.167555587995334236031511112634
J01_ZERO = 2.40482555769577276862163187933
J15_ZERO = 4.49340945790906417530788092728
J4_ZERO = 7.58834243450380438506963000799


def test_gamma_golden():
    assert sp.gamma_fn(0.3) == pytest.approx(GAMMA_0_3, rel=1e-13)
    assert sp.gammaln(50.5) == pytest.approx(LOGGAMMA_50_5, rel=1e-14)
    assert sp.gamma_fn(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-14)
    assert sp.gamma_fn(5.0) == pytest.approx(24.0, rel=1e-14)


@settings(max_examples=200, deadline=None)
@given(hst.floats(0.01, 150.0))
def test_gamma_matches_stdlib(x):
    assert sp.gammaln(x) == pytest.approx(math.lgamma(x), rel=1e-12, abs=1e-13)


@settings(max_examples=100, deadline=None)
@given(hst.floats(0.05, 20.0), hst.floats(0.0, 1.0))
def test_gamma_ratio_matches_lgamma(a, b):
    want = math.exp(math.lgamma(a) - math.lgamma(b + 0.5))
    assert sp.gamma_ratio(a, b + 0.5) == pytest.approx(want, rel=1e-11)


def test_bessel_values():
    assert sp.bessel_j(0, 1.0) == pytest.approx(J0_1, rel=1e-12)
    assert sp.bessel_j(1.5, 2.5) == pytest.approx(J15_25, rel=1e-12)
    assert sp.bessel_j(3, 7.0) == pytest.approx(J3_7, rel=1e-11)


def test_bessel_half_order_closed_form():
    # J_{-1/2}(x) = sqrt(2/(pi x)) cos x
    for x in (0.3, 1.0, 2.0, 5.0):
        want = math.sqrt(2 / (math.pi * x)) * math.cos(x)
        assert sp.bessel_j(-0.5, x) == pytest.approx(want, rel=1e-11, abs=1e-14)


def test_bessel_first_zeros():
    assert sp.bessel_first_zero(0.0) == pytest.approx(J01_ZERO, rel=1e-13)
    assert sp.bessel_first_zero(1.5) == pytest.approx(J15_ZERO, rel=1e-13)
    assert sp.bessel_first_zero(4.0) == pytest.approx(J4_ZERO, rel=1e-13)
    assert sp.bessel_first_zero(-0.5) == pytest.approx(math.pi / 2, rel=1e-13)
    assert sp.bessel_first_zero(0.5) == pytest.approx(math.pi, rel=1e-13)


def test_bessel_zero_agrees_with_scipy():
    from scipy.special import jn_zeros

    for n in range(0, 12):
        assert sp.bessel_first_zero(float(n)) == pytest.approx(jn_zeros(n, 1)[0], rel=1e-12)
