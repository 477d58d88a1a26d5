"""Monte Carlo estimators with uncertainty.

Functions return plain records (:class:`McEstimate`, :class:`EigenFit`).
Two scikit-learn style estimators wrap the same machinery:
:class:`DecayRateEstimator` fits an exponential tail rate to a sample of exit
times and :class:`TorsionEstimator` maps start points to mean exit times.
"""

import math
import zlib
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from . import stochastic as st
from .analytic import renewal_stable
from .errors import DomainError, InsufficientTailError
from .geometry import interior_lattice

MIN_SURVIVORS = 50
DEFAULT_WINDOW = (1e-3, 1e-1)


@dataclass(frozen=True)
class McEstimate:
    """Sample mean with standard error ``std / sqrt(n)``.

    ``params`` holds the sampler settings (h, h_s, seed, n, ...) and
    ``flags`` any diagnostics raised while sampling.
    """

    mean: float
    stderr: float
    n: int
    params: dict = field(default_factory=dict)
    flags: tuple = ()

    @property
    def ci95(self):
        return (self.mean - 1.96 * self.stderr, self.mean + 1.96 * self.stderr)

    @classmethod
    def from_sample(cls, x, params=None, flags=()):
        x = np.asarray(x, dtype=float)
        n = x.shape[0]
        if n < 2:
            raise ValueError("need at least two samples")
        return cls(float(x.mean()), float(x.std(ddof=1) / math.sqrt(n)), int(n),
                   dict(params or {}), tuple(flags))

    def to_dict(self):
        return {"mean": self.mean, "stderr": self.stderr, "n": self.n,
                "ci95": list(self.ci95), "params": self.params, "flags": list(self.flags)}


@dataclass(frozen=True)
class EigenFit:
    """Least-squares fit of ``log P(tau > t) = c - lambda t`` over a window."""

    lambda_hat: float
    window: tuple
    t: np.ndarray
    survival: np.ndarray
    stderr: float
    ols_stderr: float
    count_stderr: float
    intercept: float
    residuals: np.ndarray
    params: dict = field(default_factory=dict)

    def to_dict(self):
        return {"lambda_hat": self.lambda_hat, "stderr": self.stderr,
                "ols_stderr": self.ols_stderr, "count_stderr": self.count_stderr,
                "window": list(self.window), "intercept": self.intercept,
                "max_abs_residual": float(np.max(np.abs(self.residuals))),
                "params": self.params}


@dataclass(frozen=True)
class TailRow:
    k: int
    p: float
    stderr: float

    @property
    def bound(self):
        return 2.0 ** (-self.k)


@dataclass(frozen=True)
class ResurrectionTail:
    rows: tuple
    mean_N: McEstimate
    censored: int
    params: dict = field(default_factory=dict)


# ------------------------------------------------------------------ helpers


def _exit_sample(D, x, process, alpha, n, h, h_s, seed, stream=0, n_jobs=None,
                 max_time=st.DEFAULT_MAX_TIME):
    if process not in st.PROCESSES:
        raise ValueError(f"process must be one of {st.PROCESSES}")
    if not D.contains(x):
        raise DomainError("start point must lie inside the domain")
    h = st.default_step(D.dim) if h is None else h
    return st.simulate_exit_times(D, x, process, alpha, n, h, h_s, seed=seed,
                                  stream=stream, max_time=max_time, n_jobs=n_jobs)


def _flags(sample):
    flags = []
    if sample.censored.any():
        flags.append(f"censored={int(sample.censored.sum())}")
    tau = sample.tau
    total = tau.sum()
    # a single path carrying a large share of the total hints at E tau = inf
    if sample.censored.any() or (total > 0 and tau.max() > 0.1 * total):
        flags.append("unbounded_mean_suspected")
    return tuple(flags)


def point_stream(x, base=0):
    """Stream id derived from the coordinates of a start point."""
    return base + zlib.crc32(np.asarray(x, dtype=float).tobytes())


# ------------------------------------------------------------------ estimators


def mc_torsion(D, x, process, alpha=2.0, n=10_000, h=None, h_s=None, seed=0,
               stream=0, n_jobs=None, max_time=st.DEFAULT_MAX_TIME):
    """Mean exit time of W, Y(alpha) or Z(alpha) from D started at x."""
    if n < 100:
        raise ValueError("n must be at least 100")
    x = np.asarray(x, dtype=float).reshape(-1)
    s = _exit_sample(D, x, process, alpha, n, h, h_s, seed, stream, n_jobs, max_time)
    params = dict(s.params, process=process, x=x.tolist())
    return McEstimate.from_sample(s.tau, params, _flags(s))


def mc_sup_torsion(D, grid=None, process="Y", alpha=1.0, n=10_000, h=None, h_s=None,
                   seed=0, n_jobs=None, per_axis=9, return_all=False):
    """Largest estimated torsion over a grid of interior points.

    The default grid is the center for balls and an interior lattice with
    ``per_axis`` points per axis otherwise. Each point gets its own stream.
    """
    grid = interior_lattice(D, per_axis) if grid is None else np.atleast_2d(grid)
    if grid.shape[0] == 0:
        raise DomainError("empty grid")
    ests = [mc_torsion(D, p, process, alpha, n, h, h_s, seed, point_stream(p), n_jobs)
            for p in grid]
    k = int(np.argmax([e.mean for e in ests]))
    best = ests[k]
    out = McEstimate(best.mean, best.stderr, best.n,
                     dict(best.params, grid_size=int(grid.shape[0])), best.flags)
    return (out, ests) if return_all else out


def fit_decay_rate(tau, window=DEFAULT_WINDOW, t_grid=None, min_survivors=MIN_SURVIVORS):
    """Fit the exponential decay rate of the empirical survival of ``tau``.

    The window is where the empirical survival lies in ``window``; ``t_grid``
    defaults to 40 equally spaced times spanning it. The reported stderr is
    the larger of the OLS slope error and the counting error
    sqrt(1/m1 + 1/m2) / (t2 - t1) from the survivor counts at the ends.
    """
    tau = np.sort(np.asarray(tau, dtype=float))
    n = tau.shape[0]
    lo, hi = window
    if not 0 < lo < hi < 1:
        raise ValueError("window must satisfy 0 < lo < hi < 1")
    m2_needed = max(min_survivors, 1)
    if lo * n < m2_needed:
        raise InsufficientTailError(
            f"only {int(lo * n)} expected survivors at the window end; need {m2_needed}")
    # survival(t) = #{tau > t} / n
    t1 = tau[n - 1 - int(math.floor(hi * n))]
    t2 = tau[n - 1 - int(math.ceil(lo * n))]
    if t_grid is None:
        t_grid = np.linspace(t1, t2, 40)
    t_grid = np.asarray(t_grid, dtype=float)
    surv = (n - np.searchsorted(tau, t_grid, side="right")) / n
    keep = (surv >= lo) & (surv <= hi) & (surv > 0)
    t, s = t_grid[keep], surv[keep]
    if t.shape[0] < 4:
        raise InsufficientTailError("fewer than 4 grid points inside the fit window")
    m_end = int(round(s[-1] * n))
    if m_end < min_survivors:
        raise InsufficientTailError(f"{m_end} survivors at t2; need {min_survivors}")
    X = np.column_stack([np.ones_like(t), t])
    y = np.log(s)
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - X @ coef
    dof = max(t.shape[0] - 2, 1)
    sigma2 = float(resid @ resid) / dof
    cov = sigma2 * np.linalg.inv(X.T @ X)
    ols = math.sqrt(cov[1, 1])
    m1 = s[0] * n
    count = math.sqrt(1.0 / m1 + 1.0 / m_end) / (t[-1] - t[0])
    lam = -float(coef[1])
    if not lam > 0:
        raise InsufficientTailError("fitted decay rate is not positive")
    return EigenFit(lam, (float(t[0]), float(t[-1])), t, s, max(ols, count), ols, count,
                    float(coef[0]), resid)


def mc_eigenvalue(D, process="W", alpha=2.0, n=100_000, h=None, h_s=None, seed=0, x=None,
                  window=DEFAULT_WINDOW, t_grid=None, n_jobs=None):
    """Principal eigenvalue from the exponential decay of P(tau > t)."""
    if not D.bounded:
        raise DomainError("eigenvalue regression needs a bounded domain")
    x = D.interior_point if x is None else np.asarray(x, dtype=float)
    s = _exit_sample(D, x, process, alpha, n, h, h_s, seed, 0, n_jobs)
    fit = fit_decay_rate(s.tau, window, t_grid)
    return EigenFit(**{**fit.__dict__, "params": dict(s.params, process=process)})


def mc_resurrection_tail(D, x, alpha, n=10_000, h=None, h_s=None, seed=0, k_max=6,
                         max_time=st.DEFAULT_MAX_TIME, n_jobs=None):
    """Empirical P(N > k), k = 1..k_max, of the resurrection count.

    Runs censored by the step budget are counted as N > k for every k not
    already decided, which can only overstate the tail.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    s = _exit_sample(D, x, "Y", alpha, n, h, h_s, seed, 0, n_jobs, max_time)
    N = s.N.astype(float)
    cens = s.censored
    rows = []
    for k in range(1, k_max + 1):
        ind = (N > k) | cens
        p = float(ind.mean())
        rows.append(TailRow(k, p, math.sqrt(max(p * (1 - p), 0.0) / s.n)))
    mean_N = McEstimate.from_sample(N, dict(s.params), _flags(s))
    return ResurrectionTail(tuple(rows), mean_N, int(cens.sum()), dict(s.params))


def jensen_identity_check(D, x, alpha, n=10_000, h=None, h_s=None, seed=0, n_jobs=None):
    """E[tau_Z] against E[V(tau_W)] from the same Brownian exits."""
    if not D.bounded:
        raise DomainError("the identity check needs a bounded domain")
    x = np.asarray(x, dtype=float).reshape(-1)
    s = _exit_sample(D, x, "Z", alpha, n, h, h_s, seed, 0, n_jobs)
    # V(t) = V(1) t^(alpha/2)
    v = renewal_stable(alpha, 1.0) * s.tau_w ** (alpha / 2.0)
    return (McEstimate.from_sample(s.tau_z, s.params, _flags(s)),
            McEstimate.from_sample(v, s.params))


@dataclass(frozen=True)
class CharEstimate:
    real: McEstimate
    imag: McEstimate
    target: float


def empirical_char_function(alpha, d, xi, n=100_000, seed=0, stream=0):
    """Mean of exp(i xi . Y_1) with Y_1 = sqrt(2 S_1) G, G standard normal in R^d."""
    if n < 10_000:
        raise ValueError("n must be at least 1e4")
    xi = np.asarray(xi, dtype=float).reshape(-1)
    if xi.shape[0] != d:
        raise DomainError("xi must have dimension d")
    rng = st.RngStream(seed, stream)
    rho = alpha / 2.0
    if rho < 1.0:
        s1 = st.sample_stable_subordinator_increment(rng, rho, 1.0, size=n)
    else:
        s1 = np.ones(n)
    g = rng.brownian.standard_normal((n, d))
    phase = np.sqrt(2.0 * s1) * (g @ xi)
    params = dict(alpha=alpha, d=d, n=n, seed=seed)
    return CharEstimate(McEstimate.from_sample(np.cos(phase), params),
                        McEstimate.from_sample(np.sin(phase), params),
                        math.exp(-float(np.linalg.norm(xi)) ** alpha))


# ------------------------------------------------------------------ sklearn style


class DecayRateEstimator(BaseEstimator):
    """Exponential tail-rate estimator fitted to a sample of exit times.

    Parameters
    ----------
    window : tuple of float
        Survival levels ``(lo, hi)`` delimiting the regression window.
    n_grid : int
        Number of equally spaced fit times inside the window.
    min_survivors : int
        Minimum number of samples beyond the window end.

    Attributes
    ----------
    lambda_ : float
        Fitted decay rate.
    stderr_ : float
        Standard error of ``lambda_``.
    fit_ : EigenFit
        The full fit record.
    """

    def __init__(self, window=DEFAULT_WINDOW, n_grid=40, min_survivors=MIN_SURVIVORS):
        self.window = window
        self.n_grid = n_grid
        self.min_survivors = min_survivors

    def fit(self, X, y=None):
        tau = check_array(X, ensure_2d=False, dtype=float).reshape(-1)
        fit = fit_decay_rate(tau, self.window, None, self.min_survivors)
        if self.n_grid != 40:
            grid = np.linspace(fit.window[0], fit.window[1], self.n_grid)
            fit = fit_decay_rate(tau, self.window, grid, self.min_survivors)
        self.fit_ = fit
        self.lambda_ = fit.lambda_hat
        self.stderr_ = fit.stderr
        self.intercept_ = fit.intercept
        return self

    def predict(self, X):
        """Fitted survival probability at times ``X``."""
        check_is_fitted(self, "lambda_")
        t = check_array(X, ensure_2d=False, dtype=float).reshape(-1)
        return np.minimum(np.exp(self.intercept_ - self.lambda_ * t), 1.0)


class TorsionEstimator(BaseEstimator):
    """Mean exit time of W, Y(alpha) or Z(alpha) as a function of the start point.

    Each start point gets its own random stream derived from its coordinates,
    so ``predict`` is reproducible and independent of row order.

    Parameters
    ----------
    domain : ConvexDomain
    process : {"W", "Y", "Z"}
    alpha : float
    n : int
        Paths per start point.
    h, h_s : float or None
        Euler and subordinator grid steps; ``None`` selects the defaults.
    seed : int
    n_jobs : int or None

    Attributes
    ----------
    estimates_ : list of McEstimate
        One record per fitted start point.
    sup_ : McEstimate
        Largest fitted estimate.
    argmax_ : ndarray
        Start point attaining ``sup_``.
    """

    def __init__(self, domain=None, process="Y", alpha=1.0, n=10_000, h=None, h_s=None,
                 seed=0, n_jobs=None):
        self.domain = domain
        self.process = process
        self.alpha = alpha
        self.n = n
        self.h = h
        self.h_s = h_s
        self.seed = seed
        self.n_jobs = n_jobs

    def _estimate(self, x):
        return mc_torsion(self.domain, x, self.process, self.alpha, self.n, self.h,
                          self.h_s, self.seed, point_stream(x), self.n_jobs)

    def _points(self, X):
        if self.domain is None:
            raise ValueError("a domain is required")
        X = check_array(X, dtype=float)
        if X.shape[1] != self.domain.dim:
            raise DomainError("points must match the domain dimension")
        return X

    def fit(self, X=None, y=None):
        X = interior_lattice(self.domain) if X is None else self._points(X)
        self.points_ = X
        self.estimates_ = [self._estimate(x) for x in X]
        k = int(np.argmax([e.mean for e in self.estimates_]))
        self.sup_ = self.estimates_[k]
        self.argmax_ = X[k]
        return self

    def predict(self, X):
        check_is_fitted(self, "estimates_")
        X = self._points(X)
        return np.array([self._estimate(x).mean for x in X])


__all__ = [
    "McEstimate", "EigenFit", "TailRow", "ResurrectionTail", "CharEstimate",
    "mc_torsion", "mc_sup_torsion", "fit_decay_rate", "mc_eigenvalue",
    "mc_resurrection_tail", "jensen_identity_check", "empirical_char_function",
    "DecayRateEstimator", "TorsionEstimator",
]
