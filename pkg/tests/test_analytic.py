"""Closed forms: renewal function, Vogt constant, ball torsion, bound sets."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as hst

from stabletorsion import analytic as an
from stabletorsion.errors import DomainError

ALPHAS = (0.5, 1.0, 1.5, 2.0)

# [DERIVED] mpmath at 30 digits, then frozen
VOGT = {1: 1.73051806206028712261153551051, 2: 2.10633185562753150132587718217,
        3: 2.42378804838906186969785845615, 4: 2.71103612412057424522307102102,
        10: 4.16481624048169626782311531378}
U0 = {(0.5, 1): 1.12837916709551257389615890312, (1.5, 3): 0.300901111225470019705642374166,
      (1.0, 5): 0.375}
V_03_HALF = 0.816505717081119464305967852041  # V(0.3) at alpha = 0.5


def test_vogt_constant():
    for d, want in VOGT.items():
        assert an.vogt_bound(d) == pytest.approx(want, rel=1e-13)


def test_vogt_leading_term():
    # [PAPER] leading behaviour d/8
    assert an.vogt_bound(10**8) / 10**8 == pytest.approx(1 / 8, rel=1e-3)


def test_renewal_golden():
    # [PAPER] V(1; alpha=1) = 2/sqrt(pi), V(x; alpha=2) = x
    assert an.renewal_stable(1.0, 1.0) == pytest.approx(2 / math.sqrt(math.pi), rel=1e-13)
    assert an.renewal_stable(2.0, 3.7) == pytest.approx(3.7, rel=1e-14)
    assert an.renewal_stable(0.5, 0.3) == pytest.approx(V_03_HALF, rel=1e-13)
    assert an.renewal_stable(1.0, 0.0) == 0.0
    assert an.renewal_stable(1.0, math.inf) == math.inf


@pytest.mark.parametrize("alpha", ALPHAS)
def test_renewal_function_shape(alpha):
    R = an.RenewalFunction.stable(alpha)
    assert R.check(np.linspace(0, 5, 60))


@pytest.mark.parametrize("alpha", (0.5, 1.0, 1.5, 1.9))
@pytest.mark.parametrize("lam", (0.1, 1.0, 10.0, 100.0))
def test_laplace_link(alpha, lam):
    assert an.laplace_link_check(alpha, lam) < 1e-6


@pytest.mark.parametrize("alpha", (0.5, 1.0, 1.5, 2.0))
@pytest.mark.parametrize("x", (0.01, 1.0, 7.5))
def test_renewal_is_integral_of_density(alpha, x):
    assert an.renewal_integral_check(alpha, x) < 1e-8


def test_laplace_exponent_levy_form_matches_closed_form():
    for rho in (0.25, 0.5, 0.75):
        spec = an.SubordinatorSpec.stable_levy(rho)
        for lam in (0.5, 2.0, 10.0):
            assert an.laplace_exponent(spec, lam) == pytest.approx(lam**rho, rel=1e-7)


def test_conjugate_exponent_and_killing():
    spec = an.SubordinatorSpec(killing_rate=0.5, drift=2.0)
    assert an.laplace_exponent(spec, 3.0) == pytest.approx(6.5)
    assert an.conjugate_exponent(an.SubordinatorSpec.stable(0.5), 4.0) == pytest.approx(2.0)
    with pytest.raises(DomainError):
        an.SubordinatorSpec(levy_density=lambda t: t**-2.5)


def test_ball_torsion_golden():
    # [PAPER] sup torsion 1 for (alpha=1, d=1) and 2/pi for (alpha=1, d=2)
    assert an.ball_torsion_sup(an.StableParams(1.0, 1)) == pytest.approx(1.0, rel=1e-13)
    assert an.ball_torsion_sup(an.StableParams(1.0, 2)) == pytest.approx(2 / math.pi, rel=1e-13)
    for (a, d), want in U0.items():
        assert an.ball_torsion_sup(an.StableParams(a, d)) == pytest.approx(want, rel=1e-12)
    # Brownian case is (1 - r^2) / (2 d)
    assert an.ball_torsion_profile(an.StableParams(2.0, 3), 0.5) == pytest.approx(0.75 / 6)


def test_ball_eigenvalue_golden():
    assert an.lambda_ball_brownian(1) == pytest.approx(math.pi**2 / 4, rel=1e-13)
    assert an.lambda_ball_brownian(2) == pytest.approx(5.783185962946784521, rel=1e-13)
    assert an.lambda_ball_brownian(3) == pytest.approx(math.pi**2, rel=1e-13)


def test_interval_product():
    # [PAPER] m_1 = c_1 = C_1 = M_1 = pi^2/8
    p = an.lambda_ball_brownian(1) * an.ball_torsion_sup(an.StableParams(2.0, 1))
    assert p == pytest.approx(math.pi**2 / 8, rel=1e-13)


def test_theorem1_prefactor():
    assert an.theorem1_prefactor(2.0) == pytest.approx(2.0, rel=1e-14)
    assert an.theorem1_prefactor(1.0) == pytest.approx(4 / math.sqrt(math.pi), rel=1e-13)


@pytest.mark.parametrize("alpha", ALPHAS)
@pytest.mark.parametrize("d", (1, 2, 3, 5, 20))
def test_ball_torsion_within_its_bounds(alpha, d):
    p = an.StableParams(alpha, d)
    b = an.torsion_ball_bounds(p)
    u = an.ball_torsion_sup(p)
    assert b.lower * (1 - 1e-12) <= u <= b.upper * (1 + 1e-12)


@settings(max_examples=60, deadline=None)
@given(hst.floats(0.05, 2.0), hst.integers(1, 40))
def test_theorem2_on_balls(alpha, d):
    # the ball satisfies its own Theorem-2 sandwich exactly
    p = an.StableParams(alpha, d)
    b = an.theorem2_bounds(an.lambda_ball_brownian(d) ** (alpha / 2),
                           an.renewal_stable(alpha, 1 / (2 * d)))
    assert an.ball_torsion_sup(p) in b


@settings(max_examples=100, deadline=None)
@given(hst.floats(0.01, 100.0), hst.floats(0.01, 0.99))
def test_wendel(x, a):
    b = an.wendel_bounds(x, a)
    assert b.lower - 1e-12 <= an.wendel_ratio(x, a) <= b.upper + 1e-12


def test_bound_set_invariants():
    with pytest.raises(DomainError):
        an.BoundSet(2.0, 1.0)
    inf = an.theorem2_bounds(0.0, math.inf)
    assert inf.lower == inf.upper == math.inf
    assert an.theorem1_bounds(an.StableParams(1.0, 2), 0.0).upper == math.inf


def test_chen_song_window_and_bessel_constant():
    w = an.chen_song_window(an.lambda_ball_brownian(2), 1.0)
    assert w.upper == pytest.approx(math.sqrt(5.783185962946784521))
    assert w.lower == pytest.approx(w.upper / 2)
    C = an.bessel_constant()
    for d in (1, 5, 50, 200):
        assert an.lambda_ball_brownian(d) - d * d / 4 <= C * d ** (4 / 3) * (1 + 1e-12)


@pytest.mark.parametrize("bad", (0.0, -1.0, 2.5, float("nan")))
def test_alpha_domain(bad):
    with pytest.raises(DomainError):
        an.StableParams(bad, 1)
    with pytest.raises(DomainError):
        an.renewal_stable(bad, 1.0)
