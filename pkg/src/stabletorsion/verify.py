"""Assemble closed-form bounds and Monte Carlo estimates into verdicts."""

import math
from dataclasses import dataclass, field

import numpy as np

from . import analytic as an
from . import estimators as est
from .errors import ConfigError, DomainError
from .geometry import Ball, Box, Interval, Polytope, Slab

Z_THRESHOLD = 4.0
PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"
_REL_TOL = 1e-12


def ext(x):
    """Extended-real serialization: finite floats stay floats, infinities become strings."""
    if isinstance(x, float) and math.isinf(x):
        return "+inf" if x > 0 else "-inf"
    return x


@dataclass(frozen=True)
class BoundReport:
    """Verdict for ``lower <= measured <= upper``.

    With a positive ``stderr`` the verdict is ``pass`` when the interval
    ``measured +- z stderr`` lies inside the bounds, ``fail`` when it lies
    entirely outside and ``inconclusive`` otherwise. ``slack`` is the distance
    to the nearest edge in stderr units (raw distance for exact values);
    negative slack means the point estimate is outside.
    """

    inequality: str
    lower: float
    upper: float
    measured: float
    stderr: float
    verdict: str
    slack: float
    details: dict = field(default_factory=dict)

    def to_dict(self):
        return {"inequality": self.inequality, "lower": ext(self.lower),
                "upper": ext(self.upper), "measured": ext(self.measured),
                "stderr": self.stderr, "verdict": self.verdict, "slack": ext(self.slack),
                "details": self.details}


def judge(lower, upper, measured, stderr=0.0, z=Z_THRESHOLD):
    """Return (verdict, slack) for ``lower <= measured <= upper``."""
    lo_gap = measured - lower
    hi_gap = upper - measured
    if stderr == 0.0:
        tol = _REL_TOL * max(abs(measured), 1.0) if math.isfinite(measured) else 0.0
        if math.isinf(measured) and measured == lower == upper:
            return PASS, 0.0
        ok = lo_gap >= -tol and hi_gap >= -tol
        return (PASS if ok else FAIL), min(lo_gap, hi_gap)
    slack = min(lo_gap, hi_gap) / stderr
    a, b = measured - z * stderr, measured + z * stderr
    if a >= lower and b <= upper:
        return PASS, slack
    if b < lower or a > upper:
        return FAIL, slack
    return INCONCLUSIVE, slack


def _report(label, bounds, measured, stderr, z, **details):
    verdict, slack = judge(bounds[0], bounds[1], measured, stderr, z)
    return BoundReport(label, float(bounds[0]), float(bounds[1]), float(measured),
                       float(stderr), verdict, float(slack), details)


# ------------------------------------------------------------------ Brownian closed forms


def rectangle_torsion_center(a, b, terms=200):
    """Torsion of speed-2 Brownian motion at the centre of (-a, a) x (-b, b)."""
    s = 0.0
    for j in range(terms):
        k = 2 * j + 1
        x = k * math.pi * b / (2.0 * a)
        sech = 2.0 * math.exp(-x) / (1.0 + math.exp(-2.0 * x))
        s += (-1) ** j * sech / k**3
    return a * a / 2.0 - 16.0 * a * a / math.pi**3 * s


def _is_halfspace(D):
    return isinstance(D, Polytope) and D.A.shape[0] == 1 and D.R.shape[0] == 0


def brownian_eigenvalue(D):
    """Closed-form principal eigenvalue of speed-2 Brownian motion, or None."""
    if isinstance(D, Ball):
        return an.lambda_ball_brownian(D.dim) / D.radius**2
    if isinstance(D, Slab):
        return math.pi**2 / (4.0 * D.half_width**2)
    if isinstance(D, Box):
        return float(np.sum(math.pi**2 / (4.0 * D.half_widths**2)))
    if _is_halfspace(D):
        return 0.0
    return None


def brownian_sup_torsion(D):
    """Closed-form ||u_D^W||_inf, or None."""
    if isinstance(D, Ball):
        return D.radius**2 / (2.0 * D.dim)
    if isinstance(D, Slab):
        return D.half_width**2 / 2.0
    if isinstance(D, Box):
        w = D.half_widths
        if D.dim == 1:
            return w[0] ** 2 / 2.0
        if D.dim == 2:
            a, b = sorted(w)
            return rectangle_torsion_center(a, b)
    if _is_halfspace(D):
        return math.inf
    return None


def _symmetric_center(D):
    """Centre of a Steiner-symmetric domain, where every torsion function peaks."""
    if isinstance(D, (Ball, Box)):
        return D.center[None, :]
    if isinstance(D, Slab):
        return (D.shift * D.normal)[None, :]
    return None


def _reduced_for_eigenvalue(D):
    """Bounded domain with the same stable eigenvalue (slab -> interval)."""
    if isinstance(D, Slab):
        return Interval(D.half_width), "slab reduced to its normal coordinate"
    if D.bounded:
        return D, None
    return None, "unbounded domain without a closed-form reduction"


def _mc_opts(h, h_s, seed, n_jobs):
    return dict(h=h, h_s=h_s, seed=seed, n_jobs=n_jobs)


# ------------------------------------------------------------------ checks


def verify_theorem1(D, alpha, n=10_000, n_eig=200_000, h=None, h_eig=1e-3, h_s=None,
                    seed=0, n_jobs=None, z=Z_THRESHOLD, grid=None, sup=None):
    """Check 1/lambda <= ||u_D^X|| <= 4 V_d^(alpha/2) / (alpha Gamma(alpha/2) lambda).

    For alpha = 2 only closed forms are used. Otherwise ||u|| is the MC sup of
    the Y torsion and lambda the MC decay rate; the bounds are widened by one
    regression stderr of lambda. A precomputed ``sup`` estimate may be passed.
    """
    params = an.StableParams(alpha, D.dim)
    if alpha == 2.0:
        lam, sup = brownian_eigenvalue(D), brownian_sup_torsion(D)
        if lam is None or sup is None:
            return _inconclusive("theorem1", "no closed form for this domain at alpha = 2")
        b = an.theorem1_bounds(params, lam)
        return _report("theorem1", (b.lower, b.upper), sup, 0.0, z, lambda_x=lam,
                       prefactor=an.theorem1_prefactor(alpha), source="closed_form")
    E, note = _reduced_for_eigenvalue(D)
    if E is None:
        return _inconclusive("theorem1", note)
    fit = est.mc_eigenvalue(E, "Y", alpha, n_eig, h_eig, None, seed, n_jobs=n_jobs)
    lam, se = fit.lambda_hat, fit.stderr
    grid = _symmetric_center(D) if grid is None else grid
    if sup is None:
        sup = est.mc_sup_torsion(D, grid, "Y", alpha, n, **_mc_opts(h, h_s, seed, n_jobs))
    hi = an.theorem1_bounds(params, max(lam - se, 0.0)).upper
    lo = an.theorem1_bounds(params, lam + se).lower
    return _report("theorem1", (lo, hi), sup.mean, sup.stderr, z, lambda_hat=lam,
                   lambda_stderr=se, reduction=note, sup_params=sup.params,
                   prefactor=an.theorem1_prefactor(alpha), source="monte_carlo")


def verify_theorem2(D, alpha, n=10_000, n_w=100_000, h=None, h_s=None, seed=0, n_jobs=None,
                    z=Z_THRESHOLD, grid=None, sup=None):
    """Check 1/Phi(lambda_W) <= ||u_D^Y|| <= 2 V(||u_D^W||).

    Brownian quantities come from closed forms when the variant admits them
    and from Monte Carlo otherwise (then widened by one stderr).
    """
    lam_w, u_w = brownian_eigenvalue(D), brownian_sup_torsion(D)
    src = {"lambda_W": "closed_form", "sup_u_W": "closed_form"}
    se_l = se_u = 0.0
    grid = _symmetric_center(D) if grid is None else grid
    if lam_w is None:
        if not D.bounded:
            return _inconclusive("theorem2", "lambda_W has no closed form on this unbounded domain")
        fit = est.mc_eigenvalue(D, "W", 2.0, n_w, 1e-3, None, seed, n_jobs=n_jobs)
        lam_w, se_l = fit.lambda_hat, fit.stderr
        src["lambda_W"] = "monte_carlo"
    if u_w is None:
        u = est.mc_sup_torsion(D, grid, "W", 2.0, n_w, **_mc_opts(h, h_s, seed, n_jobs))
        u_w, se_u = u.mean, u.stderr
        src["sup_u_W"] = "monte_carlo"
    b_lo = an.theorem2_bounds((lam_w + se_l) ** (alpha / 2.0), an.renewal_stable(alpha, u_w))
    b_hi = an.theorem2_bounds(max(lam_w - se_l, 0.0) ** (alpha / 2.0),
                              an.renewal_stable(alpha, u_w + se_u))
    bounds = (b_lo.lower, b_hi.upper)
    if alpha == 2.0 and src["sup_u_W"] == "closed_form":
        return _report("theorem2", bounds, u_w, 0.0, z, lambda_W=lam_w, sup_u_W=u_w,
                       sources=src, source="closed_form")
    if math.isinf(bounds[0]):
        return _inconclusive("theorem2", "degenerate bounds: lambda_W = 0", lower=math.inf,
                             upper=math.inf)
    if sup is None:
        sup = est.mc_sup_torsion(D, grid, "Y", alpha, n, **_mc_opts(h, h_s, seed, n_jobs))
    return _report("theorem2", bounds, sup.mean, sup.stderr, z, lambda_W=lam_w,
                   sup_u_W=u_w, sources=src, sup_params=sup.params, source="monte_carlo")


def verify_chen_song(D, alpha, n=1_000_000, h=1e-3, h_s=None, seed=0, n_jobs=None,
                     z=Z_THRESHOLD):
    """Check Phi(lambda_W)/2 <= lambda_Y <= Phi(lambda_W) on a ball.

    ``details["within_widened_window"]`` records whether the point estimate
    lies in the window widened by one regression stderr.
    """
    if not isinstance(D, Ball):
        raise DomainError("the Chen-Song check uses balls (exact lambda_W)")
    lam_w = brownian_eigenvalue(D)
    win = an.chen_song_window(lam_w, alpha)
    fit = est.mc_eigenvalue(D, "Y", alpha, n, h, h_s, seed, n_jobs=n_jobs)
    widened = win.lower - fit.stderr <= fit.lambda_hat <= win.upper + fit.stderr
    return _report("chen_song", (win.lower, win.upper), fit.lambda_hat, fit.stderr, z,
                   lambda_W=lam_w, within_widened_window=bool(widened),
                   fit=fit.to_dict())


def verify_geometric_domination(D, x, alpha, n=100_000, h=None, h_s=None, seed=0, k_max=6,
                                max_time=1000.0, n_jobs=None, z=Z_THRESHOLD):
    """Check P(N > k) <= 2^-k + z stderr for k = 1..k_max.

    The verdict is one-sided: pass unless some empirical tail exceeds its
    bound by more than z standard errors. The reported row is the k with the
    least slack.
    """
    tail = est.mc_resurrection_tail(D, x, alpha, n, h, h_s, seed, k_max, max_time, n_jobs)
    rows, worst, worst_slack = [], None, math.inf
    ok = True
    for r in tail.rows:
        excess = r.p - r.bound
        passed = excess <= z * r.stderr
        ok &= passed
        slack = (-excess / r.stderr) if r.stderr > 0 else (math.inf if excess <= 0 else -math.inf)
        rows.append({"k": r.k, "p": r.p, "stderr": r.stderr, "bound": r.bound,
                     "pass": bool(passed)})
        if slack < worst_slack:
            worst, worst_slack = r, slack
    return BoundReport("geometric_domination", 0.0, worst.bound, worst.p, worst.stderr,
                       PASS if ok else FAIL, float(worst_slack),
                       {"rows": rows, "mean_N": tail.mean_N.mean,
                        "mean_N_stderr": tail.mean_N.stderr, "censored": tail.censored,
                        "params": tail.params})


def product_window(alpha, d):
    """[Phi(lambda_B)/2, Phi(lambda_B)] * ||u_B^X||_inf for the unit ball."""
    phi = an.lambda_ball_brownian(d) ** (alpha / 2.0)
    u = an.ball_torsion_sup(an.StableParams(alpha, d))
    return 0.5 * phi * u, phi * u


def loglog_slope(d_list, values):
    x = np.log(np.asarray(d_list, dtype=float))
    y = np.log(np.asarray(values, dtype=float))
    return float(np.polyfit(x, y, 1)[0])


def verify_comparison_lemma(alpha, d_list=(4, 8, 16, 32, 64, 128), C1=0.0, C2=0.0,
                            slope_tol=0.1):
    """(a) lemma lower bound <= product window lower edge for every d;
    (b) log-log slopes of both window edges within alpha/2 +- slope_tol."""
    d_list = sorted(int(d) for d in d_list)
    if len(d_list) < 6 or d_list[-1] < 8 * d_list[0]:
        raise ConfigError("d_list needs at least 6 values spanning a factor of 8")
    lows, highs, lemma_ok = [], [], []
    for d in d_list:
        lo, hi = product_window(alpha, d)
        lows.append(lo)
        highs.append(hi)
        lb = an.comparison_lemma_bounds(an.StableParams(alpha, d), C1, C2).lower
        lemma_ok.append(bool(lb <= lo))
    s_lo, s_hi = loglog_slope(d_list, lows), loglog_slope(d_list, highs)
    target = (alpha / 2.0 - slope_tol, alpha / 2.0 + slope_tol)
    slopes_ok = all(target[0] <= s <= target[1] for s in (s_lo, s_hi))
    verdict = PASS if slopes_ok and all(lemma_ok) else FAIL
    worst = min(s_lo, s_hi, key=lambda s: min(s - target[0], target[1] - s))
    return BoundReport("comparison_lemma", target[0], target[1], worst, 0.0, verdict,
                       float(min(worst - target[0], target[1] - worst)),
                       {"d_list": d_list, "slope_lower_edge": s_lo, "slope_upper_edge": s_hi,
                        "lemma_lower_ok": lemma_ok, "window_lower": lows,
                        "window_upper": highs})


def _inconclusive(label, reason, lower=-math.inf, upper=math.inf):
    return BoundReport(label, lower, upper, math.nan, math.nan, INCONCLUSIVE, math.nan,
                       {"reason": reason})


# ------------------------------------------------------------------ experiments


def experiment_torsion_analogue(alpha, d_list=(1, 2, 3, 5, 10, 20, 50, 100)):
    """Rows (d, V(||u_B^W||), ||u_B^X||, ratio) for the unit ball; no verdict."""
    rows = []
    for d in d_list:
        vw = an.renewal_stable(alpha, 1.0 / (2.0 * d))
        ux = an.ball_torsion_sup(an.StableParams(alpha, d))
        rows.append({"d": int(d), "V_of_sup_u_W": vw, "sup_u_X": ux, "ratio": vw / ux})
    return rows


def experiment_sharpened_lower(alpha, n=1_000_000, h=1e-3, seed=0, n_jobs=None):
    """Estimated lambda_I^X times the exact ||u_I^X|| = ||u_I^X||(0) on (-1, 1).

    Reports the candidate sharpened constant; nothing is asserted.
    """
    fit = est.mc_eigenvalue(Interval(), "Y", alpha, n, h, None, seed, n_jobs=n_jobs)
    u = an.ball_torsion_sup(an.StableParams(alpha, 1))
    return {"alpha": alpha, "lambda_hat": fit.lambda_hat, "stderr": fit.stderr,
            "sup_u": u, "product": fit.lambda_hat * u, "product_stderr": fit.stderr * u}
