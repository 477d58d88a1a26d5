import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as hst

from stabletorsion.errors import ConstructionError, DomainError
from stabletorsion.geometry import (Ball, Box, ConvexDomain, Halfspace, Interval, Polytope,
                                    Slab, interior_lattice, localize)


def test_contains_and_distance():
    B = Ball(3, 2.0)
    assert B.contains([0, 0, 1.9]) and not B.contains([0, 0, 2.0])
    assert B.boundary_distance([0.5, 0, 0]) == pytest.approx(1.5)
    S = Slab(2, 0.5)
    assert S.contains([0.4, 100.0]) and not S.contains([0.6, 0])
    assert S.boundary_distance([0.1, -7]) == pytest.approx(0.4)
    X = Box([1.0, 0.5])
    assert X.boundary_distance([0.2, 0.1]) == pytest.approx(0.4)
    with pytest.raises(DomainError):
        X.boundary_distance([2.0, 0.0])


def test_boundedness():
    assert Ball(2).bounded and Box([1, 2]).bounded and Interval().bounded
    assert not Slab(2).bounded and not Halfspace(3).bounded
    assert Slab(1).bounded
    tri = Polytope([[0, -1], [-1, 0], [1 / math.sqrt(2), 1 / math.sqrt(2)]], [0, 0, 1],
                   [0.2, 0.2])
    assert tri.bounded


def test_vectorized_contains():
    pts = np.array([[0.0, 0.0], [0.99, 0.0], [1.0, 0.0], [0.8, 0.8]])
    assert Ball(2).contains(pts).tolist() == [True, True, False, False]


def test_supporting_halfspace():
    B = Ball(2)
    p = np.array([0.6, 0.8])
    H = B.supporting_halfspace(p)
    assert np.allclose(H.normal, p) and H.offset == pytest.approx(1.0)
    rng = np.random.default_rng(0)
    for q in rng.uniform(-1, 1, (200, 2)):
        if B.contains(q):
            assert H.contains(q)
    with pytest.raises(DomainError):
        B.supporting_halfspace([0.1, 0.1])


def test_construction_errors():
    with pytest.raises(DomainError):
        Ball(2, 0.0)
    with pytest.raises(DomainError):
        Slab(2, 1.0, normal=[1.0, 1.0])
    with pytest.raises(DomainError):
        ConvexDomain(1, [[1.0], [-1.0]], [0.0, 0.0])  # empty interior
    with pytest.raises(ConstructionError):
        Halfspace(2, offset=-5.0).intersect_ball(1.0)


def test_localize():
    S = Slab(2, 1.0)
    L = localize(S, 3)
    assert L.bounded and L.variant == "slab_localized"
    assert L.contains([0.5, 2.5]) and not L.contains([0.5, 3.1])
    assert localize(Ball(2), 2) is not None
    with pytest.raises(ConstructionError):
        localize(Halfspace(2, offset=-5.0), 2)


@settings(max_examples=50, deadline=None)
@given(hst.integers(1, 6), hst.floats(1.0, 10.0), hst.floats(0.0, 5.0))
def test_localization_is_monotone(d, n, dn):
    # D cap B_n subset of D cap B_{n+dn} subset of D
    S = Slab(d, 0.7)
    small, big = localize(S, n), localize(S, n + dn)
    pts = np.random.default_rng(d).uniform(-n - dn - 1, n + dn + 1, (300, d))
    a, b, c = small.contains(pts), big.contains(pts), S.contains(pts)
    assert np.all(~a | b) and np.all(~b | c)


def test_interior_lattice():
    g = interior_lattice(Box([1.0, 0.5]), 5)
    assert g.shape == (25, 2) and Box([1.0, 0.5]).contains(g).all()
    assert interior_lattice(Ball(3)).shape == (1, 3)
    assert interior_lattice(Slab(2), 7).shape == (7, 2)


def test_describe():
    assert Slab(2, 0.5, shift=0.25).describe()["shift"] == 0.25
    assert Ball(2).describe()["variant"] == "ball"
