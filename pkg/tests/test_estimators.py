import math

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from stabletorsion import estimators as est
from stabletorsion.errors import DomainError, InsufficientTailError
from stabletorsion.geometry import Ball, Box, Interval, Slab

from conftest import zscore


def test_decay_rate_on_exponential_sample():
    # [DERIVED] exact oracle: Exp(rate) survival has slope -rate everywhere
    tau = np.random.default_rng(0).exponential(1 / 3.0, 200_000)
    fit = est.fit_decay_rate(tau)
    assert abs(fit.lambda_hat - 3.0) < 4 * fit.stderr
    assert fit.stderr >= fit.ols_stderr and fit.stderr >= fit.count_stderr
    assert fit.window[0] < fit.window[1]


def test_decay_rate_needs_tail():
    with pytest.raises(InsufficientTailError):
        est.fit_decay_rate(np.random.default_rng(1).exponential(1.0, 1000))
    with pytest.raises(ValueError):
        est.fit_decay_rate(np.ones(10_000), window=(0.5, 0.1))


def test_torsion_brownian_interval():
    m = est.mc_torsion(Interval(1.0), [0.4], "W", n=20_000, h=1e-4, seed=1)
    assert zscore(m, (1 - 0.16) / 2) < 4
    lo, hi = m.ci95
    assert lo < m.mean < hi


def test_torsion_stable_interval():
    # [PAPER] alpha = 1, d = 1 ball torsion at the centre equals 1
    m = est.mc_torsion(Interval(1.0), [0.0], "Y", 1.0, 20_000, 1e-4, seed=2)
    assert zscore(m, 1.0) < 4


def test_torsion_z_below_y():
    y = est.mc_torsion(Ball(2), [0.0, 0.0], "Y", 1.0, 5000, 1e-3, seed=3)
    z = est.mc_torsion(Ball(2), [0.0, 0.0], "Z", 1.0, 5000, 1e-3, seed=3)
    assert z.mean < y.mean


def test_sup_torsion_box_uses_grid():
    sup, all_ = est.mc_sup_torsion(Box([1.0, 0.5]), None, "W", 2.0, 2000, 1e-3, seed=4,
                                   per_axis=3, return_all=True)
    assert len(all_) == 9 and sup.params["grid_size"] == 9
    assert sup.mean == max(e.mean for e in all_)


def test_eigenvalue_brownian_interval():
    f = est.mc_eigenvalue(Interval(1.0), "W", 2.0, 100_000, 1e-3, seed=5)
    assert abs(f.lambda_hat - math.pi**2 / 4) < 4 * f.stderr
    with pytest.raises(DomainError):
        est.mc_eigenvalue(Slab(2), "W", 2.0, 1000)


def test_resurrection_tail_bound():
    t = est.mc_resurrection_tail(Slab(2), [0.0, 0.0], 1.0, 5000, 1e-3, seed=6)
    assert [r.k for r in t.rows] == list(range(1, 7))
    for r in t.rows:
        assert r.p <= r.bound + 4 * r.stderr
    ps = [r.p for r in t.rows]
    assert ps == sorted(ps, reverse=True)
    assert t.mean_N.mean >= 1.0


def test_jensen_identity_interval():
    lhs, rhs = est.jensen_identity_check(Interval(1.0), [0.0], 1.0, 20_000, 1e-3, seed=7)
    assert abs(lhs.mean - rhs.mean) <= 2 * (lhs.stderr + rhs.stderr)


@pytest.mark.parametrize("alpha", (0.5, 1.5))
def test_char_function(alpha):
    c = est.empirical_char_function(alpha, 2, [0.6, 0.8], 100_000, seed=8)
    assert abs(c.real.mean - c.target) < 4 * c.real.stderr
    assert abs(c.imag.mean) < 4 * c.imag.stderr


def test_mc_estimate_serialization():
    m = est.McEstimate.from_sample(np.arange(100.0), {"h": 1e-3})
    d = m.to_dict()
    assert d["n"] == 100 and d["mean"] == pytest.approx(49.5)


def test_point_stream_is_stable():
    assert est.point_stream([0.1, 0.2]) == est.point_stream(np.array([0.1, 0.2]))
    assert est.point_stream([0.1, 0.2]) != est.point_stream([0.2, 0.1])


# ------------------------------------------------------------------ sklearn API


def test_decay_estimator_api():
    tau = np.random.default_rng(9).exponential(0.5, 100_000)
    m = est.DecayRateEstimator()
    with pytest.raises(NotFittedError):
        m.predict([0.1])
    m.fit(tau)
    assert abs(m.lambda_ - 2.0) < 4 * m.stderr_
    p = m.predict([0.0, 1.0, 2.0])
    assert p.shape == (3,) and np.all(np.diff(p) < 0) and p[0] <= 1.0
    c = clone(m)
    assert c.get_params() == m.get_params() and not hasattr(c, "lambda_")
    m.set_params(n_grid=20).fit(tau)
    assert m.fit_.t.shape[0] <= 20


def test_torsion_estimator_api():
    m = est.TorsionEstimator(domain=Interval(1.0), process="W", alpha=2.0, n=2000, h=1e-3,
                             seed=10)
    assert set(m.get_params()) == {"domain", "process", "alpha", "n", "h", "h_s", "seed",
                                   "n_jobs"}
    with pytest.raises(NotFittedError):
        m.predict([[0.0]])
    X = np.array([[0.0], [0.5]])
    m.fit(X)
    y = m.predict(X)
    assert y.shape == (2,) and y[0] > y[1]
    # order-independent: each point has its own stream
    assert np.array_equal(m.predict(X[::-1]), y[::-1])
    assert np.array_equal(m.argmax_, [0.0])
    with pytest.raises(DomainError):
        m.predict([[0.0, 0.0]])
