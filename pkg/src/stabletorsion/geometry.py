"""Convex domains as finite intersections of open halfspaces and open balls.

Every variant (ball, slab, box, polytope and their localizations D cap B_n)
reduces to the same constraint arrays, which is what the simulation kernels
consume. All domains are open sets.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .errors import ConstructionError, DomainError

BOUNDARY_TOL = 1e-9


@dataclass(frozen=True)
class SupportingHalfspace:
    """The halfspace {x : normal . x <= offset}, which contains the domain."""

    normal: np.ndarray
    offset: float

    def contains(self, x, tol=1e-12):
        return float(np.dot(self.normal, x)) <= self.offset + tol


class ConvexDomain:
    """Intersection of open halfspaces ``A x < b`` and open balls ``|x - c| < r``.

    Subclasses only build the constraint arrays; all queries live here.
    """

    variant = "polytope"

    def __init__(self, dim, normals=(), offsets=(), centers=(), radii=(), interior_point=None):
        self.dim = int(dim)
        A = np.asarray(normals, dtype=float).reshape(-1, self.dim)
        b = np.asarray(offsets, dtype=float).reshape(-1)
        C = np.asarray(centers, dtype=float).reshape(-1, self.dim)
        R = np.asarray(radii, dtype=float).reshape(-1)
        if A.shape[0] != b.shape[0] or C.shape[0] != R.shape[0]:
            raise DomainError("constraint arrays have inconsistent lengths")
        if A.shape[0]:
            norms = np.linalg.norm(A, axis=1)
            if np.any(np.abs(norms - 1.0) > 1e-9):
                raise DomainError("halfspace normals must be unit vectors")
        if np.any(R <= 0):
            raise DomainError("ball radii must be positive")
        self.A, self.b, self.C, self.R = A, b, C, R
        self.interior_point = (np.zeros(self.dim) if interior_point is None
                               else np.asarray(interior_point, dtype=float))
        if not self._gap(self.interior_point) > 0:
            raise DomainError("interior point is not inside the domain; interior may be empty")

    # -- helpers
    @property
    def arrays(self):
        return self.A, self.b, self.C, self.R

    def _point(self, x):
        x = np.asarray(x, dtype=float).reshape(-1)
        if x.shape[0] != self.dim:
            raise DomainError(f"point has dimension {x.shape[0]}, domain has {self.dim}")
        return x

    def _gap(self, x):
        return K.min_gap(x, self.A, self.b, self.C, self.R)

    @property
    def bounded(self):
        if self.R.shape[0]:
            return True
        if self.A.shape[0] <= self.dim:
            return False
        # bounded iff no nonzero direction u has A u <= 0
        from scipy.optimize import linprog

        for sign in (1.0, -1.0):
            for k in range(self.dim):
                c = np.zeros(self.dim)
                c[k] = -sign
                res = linprog(c, A_ub=self.A, b_ub=np.zeros(len(self.b)),
                              bounds=[(-1, 1)] * self.dim, method="highs")
                if res.status == 0 and -res.fun > 1e-9:
                    return False
        return True

    # -- queries
    def contains(self, x):
        """True iff x lies in the open domain. Accepts one point or an (m, d) array."""
        x = np.asarray(x, dtype=float)
        if x.ndim == 2:
            if x.shape[1] != self.dim:
                raise DomainError("point dimension mismatch")
            return K.min_gap_many(np.ascontiguousarray(x), *self.arrays) > 0.0
        return bool(self._gap(self._point(x)) > 0.0)

    def boundary_distance(self, x):
        """Euclidean distance from an interior point to the boundary."""
        x = self._point(x)
        g = self._gap(x)
        if not g > 0:
            raise DomainError("boundary_distance needs a point inside the domain")
        return float(g)

    def supporting_halfspace(self, p):
        """Supporting halfspace whose hyperplane passes through boundary point p."""
        p = self._point(p)
        best, best_gap = None, math.inf
        for a, off in zip(self.A, self.b):
            g = off - a @ p
            if g < -BOUNDARY_TOL:
                raise DomainError("point lies outside the domain")
            if g < best_gap:
                best_gap, best = g, (a.copy(), float(off))
        for c, r in zip(self.C, self.R):
            dist = np.linalg.norm(p - c)
            g = r - dist
            if g < -BOUNDARY_TOL:
                raise DomainError("point lies outside the domain")
            if g < best_gap:
                n = (p - c) / dist
                best_gap, best = g, (n, float(n @ c + r))
        if best is None or best_gap > BOUNDARY_TOL:
            raise DomainError("point is not on the boundary")
        return SupportingHalfspace(*best)

    def intersect_ball(self, radius, center=None, interior_point=None):
        center = np.zeros(self.dim) if center is None else np.asarray(center, dtype=float)
        p = center if interior_point is None else interior_point
        if not self._gap(np.asarray(p, dtype=float)) > 0:
            p = self.interior_point
        try:
            return ConvexDomain(self.dim, self.A, self.b,
                                np.vstack([self.C, center[None, :]]),
                                np.append(self.R, radius), interior_point=p)
        except DomainError as exc:
            raise ConstructionError(str(exc)) from None

    def describe(self):
        return {"variant": self.variant, "dim": self.dim}

    def __repr__(self):
        return (f"{type(self).__name__}(dim={self.dim}, halfspaces={len(self.b)}, "
                f"balls={len(self.R)})")


class Ball(ConvexDomain):
    variant = "ball"

    def __init__(self, dim, radius=1.0, center=None):
        center = np.zeros(dim) if center is None else np.asarray(center, dtype=float)
        if not radius > 0:
            raise DomainError("radius must be positive")
        super().__init__(dim, centers=[center], radii=[radius], interior_point=center)
        self.radius = float(radius)
        self.center = center

    def describe(self):
        return {"variant": "ball", "dim": self.dim, "radius": self.radius,
                "center": self.center.tolist()}


def Interval(half_width=1.0, center=0.0):
    """The interval (center - w, center + w) as a one-dimensional ball."""
    return Ball(1, half_width, [center])


class Slab(ConvexDomain):
    """{x : |n . x - shift| < half_width} for a unit normal n."""

    variant = "slab"

    def __init__(self, dim, half_width=1.0, normal=None, shift=0.0):
        n = np.eye(dim)[0] if normal is None else np.asarray(normal, dtype=float)
        if not half_width > 0:
            raise DomainError("half-width must be positive")
        if abs(np.linalg.norm(n) - 1.0) > 1e-9:
            raise DomainError("slab normal must be a unit vector")
        super().__init__(dim, [n, -n], [half_width + shift, half_width - shift],
                         interior_point=shift * n)
        self.normal = n
        self.half_width = float(half_width)
        self.shift = float(shift)

    def describe(self):
        return {"variant": "slab", "dim": self.dim, "half_width": self.half_width,
                "normal": self.normal.tolist(), "shift": self.shift}


class Box(ConvexDomain):
    """Axis-aligned box prod (c_i - w_i, c_i + w_i)."""

    variant = "box"

    def __init__(self, half_widths, center=None):
        w = np.asarray(half_widths, dtype=float).reshape(-1)
        dim = w.shape[0]
        if np.any(w <= 0):
            raise DomainError("half-widths must be positive")
        c = np.zeros(dim) if center is None else np.asarray(center, dtype=float)
        eye = np.eye(dim)
        super().__init__(dim, np.vstack([eye, -eye]), np.concatenate([w + c, w - c]),
                         interior_point=c)
        self.half_widths = w
        self.center = c

    def describe(self):
        return {"variant": "box", "dim": self.dim, "half_widths": self.half_widths.tolist()}


class Polytope(ConvexDomain):
    """Intersection of halfspaces {x : n_i . x < c_i}; may be unbounded."""

    variant = "polytope"

    def __init__(self, normals, offsets, interior_point):
        normals = np.atleast_2d(np.asarray(normals, dtype=float))
        super().__init__(normals.shape[1], normals, offsets, interior_point=interior_point)


def Halfspace(dim, normal=None, offset=0.0):
    n = np.eye(dim)[0] if normal is None else np.asarray(normal, dtype=float)
    return Polytope([n], [offset], interior_point=(offset - 1.0) * n)


def localize(D, n):
    """D cap B(0, n); the pieces used to exhaust an unbounded domain."""
    if n < 1:
        raise DomainError("localization radius must be >= 1")
    if isinstance(D, Ball) and np.linalg.norm(D.center) + D.radius <= n:
        return D
    p = _interior_point_within(D, n)
    if p is None:
        raise ConstructionError(f"D cap B_{n} has empty interior")
    out = D.intersect_ball(float(n), interior_point=p)
    out.variant = f"{D.variant}_localized"
    return out


def _interior_point_within(D, n):
    for p in (np.zeros(D.dim), D.interior_point):
        if D._gap(p) > 0 and np.linalg.norm(p) < n:
            return p.copy()
    return None


def interior_lattice(D, per_axis=9):
    """Points of a per-axis lattice that lie inside D (used for sup estimates)."""
    if isinstance(D, Ball):
        return D.center[None, :].copy()
    if isinstance(D, Box):
        axes = [c + w * np.linspace(-1, 1, per_axis + 2)[1:-1]
                for c, w in zip(D.center, D.half_widths)]
    elif isinstance(D, Slab):
        t = D.half_width * np.linspace(-1, 1, per_axis + 2)[1:-1]
        return (D.shift + t)[:, None] * D.normal[None, :]
    else:
        lo, hi = _bounding_box(D)
        axes = [np.linspace(a, b_, per_axis + 2)[1:-1] for a, b_ in zip(lo, hi)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, D.dim)
    return grid[D.contains(grid)]


def _bounding_box(D):
    from scipy.optimize import linprog

    lo, hi = np.empty(D.dim), np.empty(D.dim)
    A = D.A
    b = D.b
    box = []
    for c, r in zip(D.C, D.R):
        box.append((c - r, c + r))
    for k in range(D.dim):
        bounds = [(None, None)] * D.dim
        if box:
            bounds = [(max(bb[0][j] for bb in box), min(bb[1][j] for bb in box))
                      for j in range(D.dim)]
        c = np.zeros(D.dim)
        c[k] = 1.0
        r1 = linprog(c, A_ub=A if len(b) else None, b_ub=b if len(b) else None,
                     bounds=bounds, method="highs")
        r2 = linprog(-c, A_ub=A if len(b) else None, b_ub=b if len(b) else None,
                     bounds=bounds, method="highs")
        if r1.status != 0 or r2.status != 0:
            raise DomainError("domain is unbounded; no lattice available")
        lo[k], hi[k] = r1.fun, -r2.fun
    return lo, hi
