"""Samplers against closed forms and independently written oracles."""

import math

import numpy as np
import pytest
from scipy import stats

from stabletorsion import stochastic as st
from stabletorsion.errors import DomainError, StepBudgetExceeded
from stabletorsion.geometry import Ball, Halfspace, Interval, Slab

from conftest import ks_two_sample


# ------------------------------------------------------------------ subordinator


def test_half_stable_increment_is_levy():
    # rho = 1/2: S_t has the Levy law with scale t^2 / 2
    for t in (0.3, 1.0):
        s = st.sample_stable_subordinator_increment(st.RngStream(1, 0), 0.5, t, size=100_000)
        assert stats.kstest(s, stats.levy(scale=t * t / 2).cdf).pvalue > 1e-3


@pytest.mark.parametrize("rho", (0.25, 0.5, 0.75))
@pytest.mark.parametrize("lam", (0.5, 2.0))
def test_increment_laplace_transform(rho, lam):
    s = st.sample_stable_subordinator_increment(st.RngStream(2, 0), rho, 1.0, size=200_000)
    y = np.exp(-lam * s)
    se = y.std() / math.sqrt(y.size)
    assert abs(y.mean() - math.exp(-lam**rho)) < 4 * se


def test_increment_self_similarity():
    # S_t =d t^(1/rho) S_1
    rho = 0.35
    a = st.sample_stable_subordinator_increment(st.RngStream(3, 0), rho, 2.0, size=20_000)
    b = st.sample_stable_subordinator_increment(st.RngStream(3, 1), rho, 1.0, size=20_000)
    assert ks_two_sample(a, 2.0 ** (1 / rho) * b) > 1e-3


def test_passage_exact_matches_walk():
    rho, level, hs = 0.5, 1.0, 0.02
    ex = [st.subordinator_first_passage(st.RngStream(4, k), rho, level, hs).sigma
          for k in range(3000)]
    wk = [st.subordinator_first_passage(st.RngStream(5, k), rho, level, hs, "walk").sigma
          for k in range(3000)]
    grid = np.round(np.array(ex) / hs)
    assert np.allclose(grid * hs, ex)
    assert ks_two_sample(ex, wk) > 1e-3


def test_passage_continuous_law():
    # rho = 1/2: P(sigma_l > t) = P(S_t < l) = erfc(t / (2 sqrt l))
    level = 0.7
    s = [st.subordinator_first_passage(st.RngStream(6, k), 0.5, level, 0.0).sigma
         for k in range(5000)]
    cdf = lambda t: 1.0 - np.vectorize(math.erfc)(np.asarray(t) / (2 * math.sqrt(level)))
    assert stats.kstest(s, cdf).pvalue > 1e-3


def test_passage_overshoot_positive():
    for k in range(200):
        fp = st.subordinator_first_passage(st.RngStream(7, k), 0.6, 0.5, 1e-3)
        assert fp.overshoot > 0 and fp.sigma > 0


# ------------------------------------------------------------------ Brownian exit


def _naive_euler_exit(w, n, h, seed):
    """Plain Euler on (-w, w) with no bridge correction; the reference oracle."""
    rng = np.random.default_rng(seed)
    x = np.zeros(n)
    tau = np.full(n, np.nan)
    alive = np.ones(n, dtype=bool)
    k = 0
    while alive.any():
        k += 1
        idx = np.flatnonzero(alive)
        x[idx] += math.sqrt(2 * h) * rng.standard_normal(idx.size)
        out = idx[np.abs(x[idx]) >= w]
        tau[out] = k * h
        alive[out] = False
    return tau


def test_bridge_correction_against_fine_euler():
    # the corrected coarse walk must match a 100x finer uncorrected walk
    w, h = 0.3, 1e-3
    D = Interval(w)
    fine = _naive_euler_exit(w, 4000, h / 100, seed=8)
    s = st.simulate_exit_times(D, [0.0], "W", 2.0, 4000, h, seed=9)
    assert ks_two_sample(s.tau, fine) > 1e-3
    # both near E tau = w^2 / 2
    se = s.tau.std() / math.sqrt(s.tau.size)
    assert abs(s.tau.mean() - w * w / 2) < 4 * se
    # the uncorrected coarse walk is visibly biased
    coarse = _naive_euler_exit(w, 4000, h, seed=10)
    assert coarse.mean() - w * w / 2 > 6 * se


def test_brownian_exit_ball_mean():
    # E tau = (1 - |x|^2) / (2 d)
    s = st.simulate_exit_times(Ball(2), [0.5, 0.0], "W", 2.0, 20_000, 1e-4, seed=11)
    se = s.tau.std() / math.sqrt(s.tau.size)
    assert abs(s.tau.mean() - 0.75 / 4) < 4 * se


def test_brownian_exit_single_and_budget():
    e = st.brownian_exit(st.RngStream(12), Ball(2), [0.0, 0.0], 1e-3)
    assert e.tau_W > 0 and abs(np.linalg.norm(e.exit_point) - 1.0) < 0.2
    with pytest.raises(StepBudgetExceeded) as info:
        st.brownian_exit(st.RngStream(12), Halfspace(2, offset=50.0), [0.0, 0.0], 1e-2,
                         max_time=1.0)
    assert info.value.partial_time == pytest.approx(1.0, abs=0.02)
    with pytest.raises(DomainError):
        st.brownian_exit(st.RngStream(12), Ball(2), [1.5, 0.0], 1e-3)


# ------------------------------------------------------------------ resurrection


def test_resurrection_matches_walk_oracle():
    # tau_Y from the resurrection engine against the grid-observed walk W(S_{k h_s})
    D, hs = Interval(1.0), 1e-3
    a = st.simulate_exit_times(D, [0.3], "Y", 1.0, 3000, 1e-4, hs, seed=13).tau
    rng = st.RngStream(14)
    b = np.array([st.subordinate_walk_exits(rng, D, [0.3], [np.inf], 0.5, hs)[0]
                  for _ in range(3000)])
    assert ks_two_sample(a, b) > 1e-3


def test_resurrection_record_invariants():
    for k in range(200):
        rec = st.resurrection_run(st.RngStream(15, k), Slab(2, 1.0), [0.2, 0.0], 0.5, 1e-3, 1e-3)
        assert rec.check() and rec.N >= 1 and rec.tau_Z <= rec.tau_Y
        assert rec.tau_seq[0] == rec.sigma_seq[0] == 0.0
        assert all(np.diff(rec.sigma_seq) > 0)


def test_killed_exit_is_first_resurrection_round():
    D, x = Ball(2), [0.1, 0.2]
    for k in range(50):
        z = st.subordinate_killed_exit(st.RngStream(16, k), D, x, 0.5, 1e-3, 1e-3)
        rec = st.resurrection_run(st.RngStream(16, k), D, x, 0.5, 1e-3, 1e-3)
        assert z == rec.tau_Z


@pytest.mark.parametrize("alpha", (1.0, 2.0))
def test_exit_time_scaling(alpha):
    # tau on B(0, r) =d r^alpha tau on B(0, 1)
    r = 2.0
    p = "W" if alpha == 2.0 else "Y"
    a = st.simulate_exit_times(Ball(1, r), [0.0], p, alpha, 3000, 1e-3, seed=17).tau
    b = st.simulate_exit_times(Ball(1), [0.0], p, alpha, 3000, 1e-3 / r**2, seed=18).tau
    assert ks_two_sample(a / r**alpha, b) > 1e-3


def test_stay_probability_halfspace_is_half():
    # from the boundary of a halfspace, W at an independent later time stays with prob 1/2
    rng = st.RngStream(19)
    pts = np.zeros((40_000, 2))
    inside = st.stay_probability_from_boundary(rng, Halfspace(2), pts, 0.5, 0.3)
    assert abs(inside.mean() - 0.5) < 4 * 0.5 / math.sqrt(inside.size)


def test_coupled_nested_monotone():
    D = Slab(2, 1.0)
    radii = [1.0, 2.0, 4.0, np.inf]
    for k in range(100):
        tw, tz = st.coupled_nested_exits(st.RngStream(20, k), D, [0.1, 0.0], radii, 0.5,
                                         1e-3, 1e-3)
        assert np.all(np.diff(tw) >= 0) and np.all(np.diff(tz) >= 0)
        walk = st.subordinate_walk_exits(st.RngStream(21, k), D, [0.1, 0.0], radii, 0.5, 1e-3)
        assert np.all(np.diff(walk) >= 0)


# ------------------------------------------------------------------ reproducibility


def test_determinism_and_worker_independence():
    D = Interval(1.0)
    kw = dict(seed=22, h=1e-3)
    a = st.simulate_exit_times(D, [0.0], "Y", 1.0, 45_000, n_jobs=1, **kw)
    b = st.simulate_exit_times(D, [0.0], "Y", 1.0, 45_000, n_jobs=2, **kw)
    assert np.array_equal(a.tau, b.tau) and np.array_equal(a.N, b.N)
    c = st.simulate_exit_times(D, [0.0], "Y", 1.0, 45_000, n_jobs=1, seed=23, h=1e-3)
    assert not np.array_equal(a.tau, c.tau)


def test_stream_requires_seed():
    with pytest.raises(ValueError):
        st.RngStream(None)


def test_process_validation():
    with pytest.raises(ValueError):
        st.simulate_exit_times(Ball(1), [0.0], "Q", 1.0, 100, 1e-3)
