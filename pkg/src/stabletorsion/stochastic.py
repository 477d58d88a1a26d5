"""Samplers: Brownian exits, stable subordinator passages and the repeated
resurrection construction of the exit time of the subordinate process."""

import math
import os
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from .errors import (DomainError, InvariantViolation, ResurrectionCapExceeded,
                     StepBudgetExceeded)

DEFAULT_CAP = 64
DEFAULT_MAX_TIME = 1000.0
CHUNK_SIZE = 20_000
PROCESSES = ("W", "Y", "Z")


def default_step(d):
    """Default Euler step: 1e-4 up to dimension 3, 1e-3 above."""
    return 1e-4 if d <= 3 else 1e-3


class RngStream:
    """Reproducible random stream identified by ``(seed, stream)``.

    Two independent Philox generators are derived from it: one drives the
    Brownian motion, the other the subordinator, so that runs on nested
    domains can share either source of randomness.
    """

    def __init__(self, seed, stream=0):
        if seed is None:
            raise ValueError("a seed is required")
        self.seed = int(seed)
        self.stream = int(stream)
        self.brownian = self._make(0)
        self.subordinator = self._make(1)

    def _make(self, sub):
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream, sub))
        return np.random.Generator(np.random.Philox(ss))

    @property
    def counter(self):
        return self.brownian.bit_generator.state["state"]["counter"].copy()

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream={self.stream})"


def _as_stream(rng):
    return rng if isinstance(rng, RngStream) else RngStream(rng)


@dataclass(frozen=True)
class BrownianExit:
    tau_W: float
    exit_point: np.ndarray
    steps: int


@dataclass(frozen=True)
class FirstPassage:
    sigma: float
    S_sigma: float
    level: float

    @property
    def overshoot(self):
        return self.S_sigma - self.level


@dataclass
class ResurrectionRecord:
    """One realization of the resurrection construction.

    ``tau_seq``, ``sigma_seq`` and ``S_seq`` start at index 0 with
    tau_0 = sigma_0 = S_{sigma_0} = 0, so ``tau_Y == sigma_seq[N]``.
    """

    tau_seq: list
    sigma_seq: list
    S_seq: list
    N: int

    @property
    def tau_Y(self):
        return self.sigma_seq[self.N]

    @property
    def tau_Z(self):
        return self.sigma_seq[1] if self.N >= 1 else 0.0

    def check(self):
        """Interlacing tau_n <= S_{sigma_n} <= tau_{n+1} and tau_Z <= tau_Y."""
        for n in range(self.N):
            if not self.tau_seq[n] <= self.S_seq[n] <= self.tau_seq[n + 1]:
                raise InvariantViolation(f"interlacing fails at n={n}: {self}")
        if not self.tau_Z <= self.tau_Y:
            raise InvariantViolation("tau_Z > tau_Y")
        return True


# ------------------------------------------------------------------ elementary


def sample_gaussian_vector(rng, d, variance, size=None):
    """``d`` independent centred Gaussians with the given variance."""
    if not variance > 0:
        raise DomainError("variance must be positive")
    g = _as_stream(rng).brownian
    shape = (d,) if size is None else (size, d)
    return math.sqrt(variance) * g.standard_normal(shape)


def sample_stable_subordinator_increment(rng, rho, dt, size=None):
    """Increment over time ``dt`` of the subordinator with Laplace exponent lam^rho.

    Uses Kanter's representation; rho = 1 is the unit drift.
    """
    if not 0.0 < rho <= 1.0:
        raise DomainError("rho must lie in (0, 1]")
    if not dt > 0:
        raise DomainError("dt must be positive")
    n = 1 if size is None else int(size)
    if rho == 1.0:
        out = np.full(n, float(dt))
    else:
        out = np.empty(n)
        K.stable_fill(_as_stream(rng).subordinator, rho, out)
        out *= dt ** (1.0 / rho)
    return float(out[0]) if size is None else out


def _check_point(D, x):
    x = np.ascontiguousarray(np.asarray(x, dtype=float).reshape(-1))
    if x.shape[0] != D.dim:
        raise DomainError(f"point has dimension {x.shape[0]}, domain has {D.dim}")
    return x


def brownian_exit(rng, D, x, h, max_time=DEFAULT_MAX_TIME):
    """Exit of speed-2 Brownian motion from D, started at x inside D."""
    x = _check_point(D, x)
    if not D.contains(x):
        raise DomainError("start point must lie inside the domain")
    if not h > 0:
        raise DomainError("step size must be positive")
    point = np.empty(D.dim)
    t, st = K.brownian_exit_one(_as_stream(rng).brownian, x, *D.arrays, h,
                                int(max_time / h), point)
    if st != K.OK:
        raise StepBudgetExceeded(f"no exit within time {max_time}", partial_time=t)
    return BrownianExit(t, point, int(round((t - 0.5 * h) / h)) + 1)


def subordinator_first_passage(rng, rho, level, h_s, method="exact"):
    """First passage of the rho-stable subordinator over ``level``.

    ``method="exact"`` draws the continuous passage exactly and rounds it up
    to the grid of step ``h_s`` (``h_s = 0`` keeps continuous time);
    ``method="walk"`` adds grid increments one at a time. Both return the
    grid-observed passage, so sigma overestimates the true time by < h_s.
    """
    if level < 0:
        raise DomainError("level must be >= 0")
    if not 0.0 < rho <= 1.0:
        raise DomainError("rho must lie in (0, 1]")
    if level == 0:
        return FirstPassage(0.0, 0.0, 0.0)
    g = _as_stream(rng).subordinator
    if method == "exact":
        sigma, jump = K.passage(g, rho, float(level), float(h_s))
    elif method == "walk":
        if not h_s > 0:
            raise DomainError("the grid walk needs h_s > 0")
        sigma, jump = K.passage_walk(g, rho, float(level), float(h_s), 10**9)
    else:
        raise ValueError(f"unknown method {method!r}")
    return FirstPassage(float(sigma), float(jump), float(level))


def resurrection_run(rng, D, x, rho, h, h_s, cap=DEFAULT_CAP, max_time=DEFAULT_MAX_TIME):
    """One run of the resurrection construction; returns the full record."""
    x = _check_point(D, x)
    rng = _as_stream(rng)
    out = _run_y(rng, D, x, rho, h, h_s, 1, cap, max_time, record=True)
    if out["status"][0] == K.BUDGET:
        raise StepBudgetExceeded(f"no Brownian exit within time {max_time}",
                                 partial_time=float(out["tau_y"][0]))
    if out["status"][0] == K.CAP:
        raise ResurrectionCapExceeded(f"more than {cap} resurrections")
    n = int(out["N"][0])
    rec = ResurrectionRecord(out["rec_tau"][0, : n + 1].tolist(),
                             out["rec_sigma"][0, : n + 1].tolist(),
                             out["rec_s"][0, : n + 1].tolist(), n)
    rec.check()
    return rec


def subordinate_killed_exit(rng, D, x, rho, h, h_s, max_time=DEFAULT_MAX_TIME):
    """tau_Z = sigma_1, the exit time of the subordinate killed Brownian motion."""
    x = _check_point(D, x)
    if not D.contains(x):
        raise DomainError("start point must lie inside the domain")
    out = _run_z(_as_stream(rng), D, x, rho, h, h_s, 1, max_time)
    if out["status"][0] != K.OK:
        raise StepBudgetExceeded(f"no exit within time {max_time}",
                                 partial_time=float(out["tau_w"][0]))
    return float(out["tau_z"][0])


# ------------------------------------------------------------------ batches


def _run_y(rng, D, x, rho, h, h_s, n, cap, max_time, record=False):
    tau_y, tau_z, tau_w = np.empty(n), np.empty(n), np.empty(n)
    N = np.empty(n, dtype=np.int64)
    status = np.empty(n, dtype=np.int64)
    m = n if record else 0
    rec = [np.empty((m, cap + 1)) for _ in range(3)]
    bad = K.resurrection_batch(rng.brownian, rng.subordinator, x, *D.arrays, float(rho),
                               float(h), float(h_s), int(cap), int(max_time / h),
                               tau_y, tau_z, tau_w, N, status, *rec)
    if bad:
        raise InvariantViolation(f"{bad} resurrection records broke interlacing or tau_Z <= tau_Y")
    return dict(tau_y=tau_y, tau_z=tau_z, tau_w=tau_w, N=N, status=status,
                rec_tau=rec[0], rec_sigma=rec[1], rec_s=rec[2])


def _run_z(rng, D, x, rho, h, h_s, n, max_time):
    tau_w, tau_z = np.empty(n), np.empty(n)
    status = np.empty(n, dtype=np.int64)
    K.killed_batch(rng.brownian, rng.subordinator, x, *D.arrays, float(rho), float(h),
                   float(h_s), int(max_time / h), tau_w, tau_z, status)
    return dict(tau_w=tau_w, tau_z=tau_z, status=status)


def _run_w(rng, D, x, h, n, max_time):
    tau = np.empty(n)
    pts = np.empty((n, D.dim))
    status = np.empty(n, dtype=np.int64)
    K.brownian_exit_batch(rng.brownian, x, *D.arrays, float(h), int(max_time / h),
                          tau, pts, status)
    return dict(tau_w=tau, exit_points=pts, status=status)


@dataclass
class ExitSample:
    """Exit times of ``n`` independent paths from one start point.

    ``tau`` holds the selected process's exit times; the other arrays are
    filled when the process produces them (Y fills all of them).
    """

    process: str
    tau: np.ndarray
    tau_w: np.ndarray
    tau_z: np.ndarray = None
    N: np.ndarray = None
    censored: np.ndarray = None
    params: dict = field(default_factory=dict)

    @property
    def n(self):
        return self.tau.shape[0]


def chunk_sizes(n, chunk=CHUNK_SIZE):
    full, rest = divmod(int(n), chunk)
    return [chunk] * full + ([rest] if rest else [])


def default_workers():
    return int(os.environ.get("STABLETORSION_WORKERS", "1"))


def _simulate_chunk(D, x, process, rho, h, h_s, n, seed, stream, cap, max_time):
    rng = RngStream(seed, stream)
    if process == "W":
        return _run_w(rng, D, x, h, n, max_time)
    if process == "Z":
        return _run_z(rng, D, x, rho, h, h_s, n, max_time)
    out = _run_y(rng, D, x, rho, h, h_s, n, cap, max_time)
    if np.any(out["status"] == K.CAP):
        raise ResurrectionCapExceeded(f"a run needed more than {cap} resurrections")
    return out


def simulate_exit_times(D, x, process, alpha, n, h, h_s=None, seed=0, stream=0,
                        cap=DEFAULT_CAP, max_time=DEFAULT_MAX_TIME, n_jobs=None):
    """Simulate ``n`` exit times of W, Y(alpha) or Z(alpha) from D started at x.

    Paths are split into fixed chunks; chunk ``k`` uses stream ``stream + k``,
    so the result depends on (seed, stream, n) only and not on ``n_jobs``.
    """
    if process not in PROCESSES:
        raise ValueError(f"process must be one of {PROCESSES}")
    x = _check_point(D, x)
    rho = alpha / 2.0
    h_s = h if h_s is None else h_s
    sizes = chunk_sizes(n)
    args = [(D, x, process, rho, h, h_s, m, seed, stream + k, cap, max_time)
            for k, m in enumerate(sizes)]
    n_jobs = default_workers() if n_jobs is None else n_jobs
    if n_jobs > 1 and len(args) > 1:
        from joblib import Parallel, delayed

        parts = Parallel(n_jobs=n_jobs)(delayed(_simulate_chunk)(*a) for a in args)
    else:
        parts = [_simulate_chunk(*a) for a in args]

    def cat(key):
        return np.concatenate([p[key] for p in parts]) if key in parts[0] else None

    status = cat("status")
    tau_w = cat("tau_w")
    tau = {"W": tau_w, "Z": cat("tau_z"), "Y": cat("tau_y")}[process]
    return ExitSample(process, tau, tau_w, cat("tau_z"), cat("N"), status != K.OK,
                      dict(alpha=alpha, n=int(n), h=h, h_s=h_s, seed=seed, stream=stream))


def stay_probability_from_boundary(rng, D, points, rho, levels, h_s=0.0):
    """Whether W at S_{sigma_1} lies in D when W sits at boundary points at
    time tau_1 and the subordinator passes the given levels."""
    pts = np.ascontiguousarray(np.atleast_2d(np.asarray(points, dtype=float)))
    levels = np.ascontiguousarray(np.broadcast_to(np.asarray(levels, dtype=float),
                                                  (pts.shape[0],)))
    for p in pts[: min(len(pts), 16)]:
        D.supporting_halfspace(p)  # raises unless p is on the boundary
    rng = _as_stream(rng)
    inside = np.empty(pts.shape[0], dtype=np.bool_)
    K.stay_from_boundary(rng.brownian, rng.subordinator, pts, *D.arrays, float(rho),
                         levels, float(h_s), inside)
    return inside


def coupled_nested_exits(rng, D, x, radii, rho, h, h_s, max_time=DEFAULT_MAX_TIME):
    """tau_W and tau_Z on D cap B(0, r) for each radius, from a single Brownian
    path and a single set of subordinator draws (``inf`` stands for D)."""
    x = _check_point(D, x)
    radii = np.asarray(radii, dtype=float)
    rng = _as_stream(rng)
    tw, tz = np.empty(len(radii)), np.empty(len(radii))
    K.nested_exits(rng.brownian, rng.subordinator, x, *D.arrays, radii, float(rho),
                   float(h), float(h_s), int(max_time / h), tw, tz)
    return tw, tz


def subordinate_walk_exits(rng, D, x, radii, rho, h_s, max_steps=10**8):
    """Exit times of the grid-observed subordinate walk Y_{k h_s} = W(S_{k h_s})
    from D cap B(0, r) for each radius, all from one path."""
    x = _check_point(D, x)
    radii = np.asarray(radii, dtype=float)
    out = np.empty(len(radii))
    K.walk_exit_nested(_as_stream(rng).brownian, x, *D.arrays, radii, float(rho),
                       float(h_s), int(max_steps), out)
    return out
