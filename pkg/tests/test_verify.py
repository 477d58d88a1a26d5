import math

import numpy as np
import pytest
from scipy import sparse
from scipy.sparse.linalg import spsolve

from stabletorsion import verify as vf
from stabletorsion.errors import ConfigError, DomainError
from stabletorsion.geometry import Ball, Box, Halfspace, Interval, Slab


def _fd_torsion_center(a, b, m=161):
    """Five-point finite differences for Laplace u = -1 on (-a, a) x (-b, b)."""
    hx, hy = 2 * a / (m + 1), 2 * b / (m + 1)
    e = np.ones(m)
    T = lambda h: sparse.diags([e[:-1], -2 * e, e[:-1]], [-1, 0, 1]) / h**2
    L = sparse.kron(T(hx), sparse.eye(m)) + sparse.kron(sparse.eye(m), T(hy))
    u = spsolve(L.tocsc(), -np.ones(m * m))
    return u[(m // 2) * m + m // 2]


def test_rectangle_series_against_finite_differences():
    for a, b in ((1.0, 1.0), (0.5, 1.0)):
        assert vf.rectangle_torsion_center(a, b) == pytest.approx(_fd_torsion_center(a, b),
                                                                  rel=2e-4)
    # long rectangle tends to the strip value a^2 / 2
    assert vf.rectangle_torsion_center(1.0, 50.0) == pytest.approx(0.5, rel=1e-12)


def test_judge():
    assert vf.judge(0, 1, 0.5, 0.01)[0] == vf.PASS
    assert vf.judge(0, 1, 1.5, 0.01)[0] == vf.FAIL
    assert vf.judge(0, 1, 0.99, 0.01)[0] == vf.INCONCLUSIVE
    assert vf.judge(0, 1, 1.0 + 1e-14)[0] == vf.PASS
    assert vf.judge(0, 1, 1.0 + 1e-6)[0] == vf.FAIL
    assert vf.judge(math.inf, math.inf, math.inf)[0] == vf.PASS


def test_brownian_closed_forms():
    assert vf.brownian_eigenvalue(Box([1.0, 0.5])) == pytest.approx(math.pi**2 / 4 * 5)
    assert vf.brownian_eigenvalue(Ball(2, 2.0)) == pytest.approx(5.783185962946784 / 4)
    assert vf.brownian_sup_torsion(Slab(3, 0.5)) == pytest.approx(0.125)
    assert vf.brownian_eigenvalue(Halfspace(2)) == 0.0
    assert vf.brownian_sup_torsion(Halfspace(2)) == math.inf


@pytest.mark.parametrize("D", [Interval(1.0), Ball(2), Ball(3), Box([1.0, 0.5]), Slab(2)],
                         ids=["interval", "ball2", "ball3", "box2", "slab2"])
def test_alpha_two_exact_sandwiches(D):
    r1 = vf.verify_theorem1(D, 2.0)
    r2 = vf.verify_theorem2(D, 2.0)
    assert r1.verdict == vf.PASS and r1.details["source"] == "closed_form"
    assert r2.verdict == vf.PASS and r2.stderr == 0.0


def test_halfspace_degenerates():
    r = vf.verify_theorem2(Halfspace(2), 1.0)
    assert r.verdict == vf.INCONCLUSIVE and r.lower == math.inf
    d = r.to_dict()
    assert d["lower"] == "+inf" and d["upper"] == "+inf"


def test_theorem2_stable_ball():
    r = vf.verify_theorem2(Ball(2), 1.0, n=4000, h=1e-3, seed=1)
    assert r.verdict == vf.PASS and r.details["source"] == "monte_carlo"


def test_chen_song_requires_ball():
    with pytest.raises(DomainError):
        vf.verify_chen_song(Box([1.0, 1.0]), 1.0)


def test_geometric_domination_small():
    r = vf.verify_geometric_domination(Ball(2), [0.0, 0.0], 1.0, 4000, 1e-3, seed=2)
    assert r.verdict == vf.PASS and len(r.details["rows"]) == 6


def test_comparison_lemma_inputs():
    with pytest.raises(ConfigError):
        vf.verify_comparison_lemma(1.0, (4, 8, 16))
    r = vf.verify_comparison_lemma(0.5)
    assert all(r.details["lemma_lower_ok"])
    assert r.details["slope_lower_edge"] == pytest.approx(r.details["slope_upper_edge"])


def test_loglog_slope_exact():
    d = [4, 8, 16, 32, 64, 128]
    assert vf.loglog_slope(d, [3 * x**0.7 for x in d]) == pytest.approx(0.7)


def test_torsion_analogue_rows():
    rows = vf.experiment_torsion_analogue(1.0, (1, 2, 3))
    assert [r["d"] for r in rows] == [1, 2, 3]
    assert all(r["ratio"] > 0 for r in rows)
