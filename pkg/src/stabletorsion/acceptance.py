"""The desk-scale acceptance grid.

Each ``criterion_k`` runs one acceptance criterion and returns a
:class:`CriterionResult` holding report rows and a pass flag. The ``table``
CLI command and the acceptance test-suite both call these functions.
``scale`` multiplies every Monte Carlo sample size (1.0 = full size).
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from . import analytic as an
from . import estimators as est
from . import stochastic as st
from . import verify as vf
from .geometry import Ball, Box, Halfspace, Interval, Slab
from .report import Row

SEED = 20240601

# high-precision evaluations (30 digits), frozen
VOGT_1 = 1.73051806206028712261153551051
TWO_OVER_SQRT_PI = 1.12837916709551257389615890312
TWO_OVER_PI = 0.63661977236758134307553505349
J01_SQUARED = 5.78318596294678452117599575846
PI2_OVER_8 = 1.23370055013616982735431137498


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    rows: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def line(self):
        return f"criterion {self.number:2d} [{'PASS' if self.passed else 'FAIL'}] {self.title}"


def _n(n, scale):
    return max(int(round(n * scale)), 1000)


def _rel_ok(value, target, tol):
    return abs(value - target) <= tol * abs(target)


def _exact_row(exp, qty, value, target, tol, alpha=None, dim=None):
    ok = _rel_ok(value, target, tol)
    return Row(exp, qty, value, alpha, dim, 0.0, target * (1 - tol), target * (1 + tol),
               "pass" if ok else "fail"), ok


def _report_row(exp, rep, alpha, dim, n=None, h=None, h_s=None, seed=None, qty=None):
    return Row(exp, qty or rep.inequality, rep.measured, alpha, dim, rep.stderr, rep.lower,
               rep.upper, rep.verdict, seed, n, h, h_s)


# ------------------------------------------------------------------ 1-3 closed forms


def criterion_1(**_):
    exp = "golden_values"
    checks = [
        ("vogt_d1", an.vogt_bound(1), VOGT_1, None, 1),
        ("renewal_alpha1_x1", an.renewal_stable(1.0, 1.0), TWO_OVER_SQRT_PI, 1.0, None),
        ("ball_torsion_sup_a1_d1", an.ball_torsion_sup(an.StableParams(1.0, 1)), 1.0, 1.0, 1),
        ("ball_torsion_sup_a1_d2", an.ball_torsion_sup(an.StableParams(1.0, 2)), TWO_OVER_PI,
         1.0, 2),
        ("lambda_ball_W_d1", an.lambda_ball_brownian(1), math.pi**2 / 4, None, 1),
        ("lambda_ball_W_d2", an.lambda_ball_brownian(2), J01_SQUARED, None, 2),
        ("lambda_ball_W_d3", an.lambda_ball_brownian(3), math.pi**2, None, 3),
        ("theorem1_prefactor_a2", an.theorem1_prefactor(2.0), 2.0, 2.0, None),
    ]
    rows, ok = [], True
    for qty, val, target, a, d in checks:
        r, good = _exact_row(exp, qty, val, target, 1e-9, a, d)
        rows.append(r)
        ok &= good
    return CriterionResult(1, "closed-form golden values (rel 1e-9)", ok, rows)


def criterion_2(**_):
    rows, ok = [], True
    for a in (0.5, 1.0, 1.5, 2.0):
        for lam in (0.5, 1.0, 2.0, 8.0):
            disc = an.laplace_link_check(a, lam)
            good = disc < 1e-6
            ok &= good
            rows.append(Row("laplace_link", f"discrepancy_lambda{lam:g}", disc, a, None, 0.0,
                            0.0, 1e-6, "pass" if good else "fail"))
        for x in (0.1, 1.0, 10.0):
            err = an.renewal_integral_check(a, x)
            good = err < 1e-8
            ok &= good
            rows.append(Row("renewal_integral", f"abs_error_x{x:g}", err, a, None, 0.0, 0.0,
                            1e-8, "pass" if good else "fail"))
    return CriterionResult(2, "Laplace link < 1e-6 and int v = V within 1e-8", ok, rows)


def criterion_3(**_):
    prod = an.lambda_ball_brownian(1) * an.ball_torsion_sup(an.StableParams(2.0, 1))
    r, ok = _exact_row("interval_product", "lambda_times_sup_u", prod, PI2_OVER_8, 1e-9, 2.0, 1)
    return CriterionResult(3, "interval product pi^2/8", ok, [r])


# ------------------------------------------------------------------ 4 samplers


def criterion_4(scale=1.0, seed=SEED, **_):
    rows, ok = [], True
    n = _n(1_000_000, scale)
    for k, rho in enumerate((0.25, 0.5, 0.75)):
        s = st.sample_stable_subordinator_increment(st.RngStream(seed, 100 + k), rho, 1.0, n)
        for lam in (0.5, 1.0, 2.0):
            e = np.exp(-lam * s)
            m, se = e.mean(), e.std(ddof=1) / math.sqrt(n)
            target = math.exp(-(lam**rho))
            good = abs(m - target) < 4 * se
            ok &= good
            rows.append(Row("stable_laplace", f"rho{rho:g}_lambda{lam:g}", float(m), 2 * rho,
                            None, float(se), target - 4 * se, target + 4 * se,
                            "pass" if good else "fail", seed, n))
    n_ks = _n(100_000, scale)
    dt = 0.7
    s = st.sample_stable_subordinator_increment(st.RngStream(seed, 110), 0.5, dt, n_ks)
    ks = stats.kstest(s, stats.levy(scale=dt * dt / 2.0).cdf)
    good = ks.pvalue > 1e-3
    ok &= good
    rows.append(Row("stable_half_ks", "ks_pvalue", float(ks.pvalue), 1.0, None, None, 1e-3,
                    1.0, "pass" if good else "fail", seed, n_ks))
    for a in (0.5, 1.0, 1.5):
        for d in (1, 2, 3):
            for r in (0.5, 1.0, 2.0):
                xi = np.full(d, r / math.sqrt(d))
                c = est.empirical_char_function(a, d, xi, n, seed, stream=int(1000 * a + 10 * d + r))
                good = (abs(c.real.mean - c.target) < 4 * c.real.stderr
                        and abs(c.imag.mean) < 4 * c.imag.stderr)
                ok &= good
                rows.append(Row("char_function", f"xi{r:g}", c.real.mean, a, d, c.real.stderr,
                                c.target - 4 * c.real.stderr, c.target + 4 * c.real.stderr,
                                "pass" if good else "fail", seed, n))
    return CriterionResult(4, "sampler fidelity (Laplace, KS, characteristic function)", ok, rows)


# ------------------------------------------------------------------ 5 resurrection engine


def criterion_5(scale=1.0, seed=SEED, n_jobs=None, **_):
    rows, ok, notes = [], True, []
    n = _n(100_000, scale)
    biases = []
    for h in (1e-4, 5e-5):
        e = est.mc_torsion(Interval(), [0.0], "Y", 1.0, n, h, h, seed, n_jobs=n_jobs)
        tol = max(3 * e.stderr, 2 * math.sqrt(h))
        bias = e.mean - 1.0
        biases.append(bias)
        good = abs(bias) <= tol
        ok &= good
        rows.append(Row("resurrection_interval", "mean_tau_Y", e.mean, 1.0, 1, e.stderr,
                        1.0 - tol, 1.0 + tol, "pass" if good else "fail", seed, n, h, h))
    # linear-in-h extrapolation from the two step sizes; reported, not judged
    ext = 1.0 + 2.0 * biases[1] - biases[0]
    rows.append(Row("resurrection_interval", "mean_tau_Y_extrapolated", ext, 1.0, 1, None,
                    None, None, "", seed, n, 0.0, 0.0))
    notes.append(f"bias at h=1e-4: {biases[0]:+.5f}; at h=5e-5: {biases[1]:+.5f}; "
                 f"extrapolated mean {ext:.5f}")
    return CriterionResult(5, "resurrection engine mean tau_Y on (-1, 1), alpha = 1", ok, rows,
                           notes)


# ------------------------------------------------------------------ 6 geometric domination


def criterion_6(scale=1.0, seed=SEED, n_jobs=None, **_):
    rows, ok, notes = [], True, []
    n = _n(100_000, scale)
    h = 1e-4
    for D, name in ((Slab(2), "slab_d2"), (Ball(3), "ball_d3")):
        for a in (0.5, 1.0):
            rep = vf.verify_geometric_domination(D, D.interior_point, a, n, h, h, seed,
                                                 n_jobs=n_jobs)
            ok &= rep.verdict == "pass"
            for r in rep.details["rows"]:
                rows.append(Row(f"geometric_domination_{name}", f"P(N>{r['k']})", r["p"], a,
                                D.dim, r["stderr"], 0.0, r["bound"],
                                "pass" if r["pass"] else "fail", seed, n, h, h))
    # halfspace: every landing is inside with probability exactly 1/2
    H = Halfspace(2)
    m = _n(100_000, scale)
    pts = np.zeros((m, 2))
    pts[:, 1] = np.linspace(-5, 5, m)
    levels = np.random.default_rng(seed).exponential(1.0, m)
    inside = st.stay_probability_from_boundary(st.RngStream(seed, 7), H, pts, 0.5, levels)
    p, se = inside.mean(), math.sqrt(0.25 / m)
    good = abs(p - 0.5) <= 4 * se
    ok &= good
    rows.append(Row("halfspace_stay", "P(inside after one step)", float(p), 1.0, 2, se,
                    0.5 - 4 * se, 0.5 + 4 * se, "pass" if good else "fail", seed, m))
    x = np.array([-0.1, 0.0])
    hh = 1e-3
    tail = est.mc_resurrection_tail(H, x, 1.0, m, hh, hh, seed, k_max=1, max_time=1000.0,
                                    n_jobs=n_jobs)
    r = tail.rows[0]
    good = abs(r.p - 0.5) <= 4 * r.stderr
    ok &= good
    rows.append(Row("halfspace_full_run", "P(N>1)", r.p, 1.0, 2, r.stderr, 0.5 - 4 * r.stderr,
                    0.5 + 4 * r.stderr, "pass" if good else "fail", seed, m, hh, hh))
    notes.append(f"halfspace full runs censored by the time budget: {tail.censored}")
    return CriterionResult(6, "geometric domination of the resurrection count", ok, rows, notes)


# ------------------------------------------------------------------ 7 Jensen identity


def criterion_7(scale=1.0, seed=SEED, n_jobs=None, **_):
    rows, ok = [], True
    n = _n(100_000, scale)
    h = 1e-4
    for D, name in ((Interval(), "interval"), (Ball(2), "ball_d2")):
        for a in (0.5, 1.0):
            lhs, rhs = est.jensen_identity_check(D, D.interior_point, a, n, h, h, seed,
                                                 n_jobs=n_jobs)
            comb = lhs.stderr + rhs.stderr
            good = abs(lhs.mean - rhs.mean) <= 2 * comb
            ok &= good
            rows.append(Row(f"jensen_{name}", "E[tau_Z] - E[V(tau_W)]", lhs.mean - rhs.mean, a,
                            D.dim, comb, -2 * comb, 2 * comb, "pass" if good else "fail",
                            seed, n, h, h))
    return CriterionResult(7, "Jensen identity E tau_Z = E V(tau_W)", ok, rows)


# ------------------------------------------------------------------ 8 Chen-Song window


def criterion_8(scale=1.0, seed=SEED, n_jobs=None, **_):
    rows, ok = [], True
    n = _n(1_000_000, scale)
    h = 1e-3
    for d in (1, 2, 3):
        for a in (0.5, 1.0, 1.5):
            rep = vf.verify_chen_song(Ball(d), a, n, h, None, seed, n_jobs)
            good = rep.details["within_widened_window"]
            ok &= good
            rows.append(Row("chen_song", "lambda_Y", rep.measured, a, d, rep.stderr,
                            rep.lower, rep.upper, "pass" if good else "fail", seed, n, h, h))
    return CriterionResult(8, "Chen-Song eigenvalue window on balls", ok, rows)


# ------------------------------------------------------------------ 9 Theorems 1 and 2


def theorem_domains():
    return [(Interval(), "interval"), (Ball(2), "ball_d2"), (Ball(3), "ball_d3"),
            (Box([1.0, 0.5]), "box_d2"), (Slab(2), "slab_d2")]


def criterion_9(scale=1.0, seed=SEED, n_jobs=None, **_):
    rows, ok = [], True
    n = _n(100_000, scale)
    n_eig = _n(200_000, scale)
    for D, name in theorem_domains():
        h = st.default_step(D.dim)
        for a in (0.5, 1.0, 1.5):
            sup = est.mc_sup_torsion(D, vf._symmetric_center(D), "Y", a, n, h, h, seed,
                                     n_jobs=n_jobs)
            r1 = vf.verify_theorem1(D, a, n, n_eig, h, 1e-3, h, seed, n_jobs, sup=sup)
            r2 = vf.verify_theorem2(D, a, n, h=h, h_s=h, seed=seed, n_jobs=n_jobs, sup=sup)
            for rep in (r1, r2):
                ok &= rep.verdict == "pass"
                rows.append(_report_row(f"{rep.inequality}_{name}", rep, a, D.dim, n, h, h,
                                        seed, "sup_u_Y"))
        for rep in (vf.verify_theorem1(D, 2.0), vf.verify_theorem2(D, 2.0)):
            ok &= rep.verdict == "pass"
            rows.append(_report_row(f"{rep.inequality}_{name}", rep, 2.0, D.dim,
                                    qty="sup_u_W_exact"))
    return CriterionResult(9, "Theorem 1 and Theorem 2 sandwiches", ok, rows)


# ------------------------------------------------------------------ 10 comparison lemma


def criterion_10(**_):
    rows, ok, notes = [], True, []
    for a in (0.5, 1.0, 1.5, 2.0):
        rep = vf.verify_comparison_lemma(a)
        det = rep.details
        for edge in ("slope_lower_edge", "slope_upper_edge"):
            s = det[edge]
            good = rep.lower <= s <= rep.upper
            ok &= good
            rows.append(Row("comparison_lemma", edge, s, a, None, 0.0, rep.lower, rep.upper,
                            "pass" if good else "fail"))
        lemma = all(det["lemma_lower_ok"])
        ok &= lemma
        rows.append(Row("comparison_lemma", "lemma_lower_le_window_lower", float(lemma), a,
                        None, 0.0, 1.0, 1.0, "pass" if lemma else "fail"))
        notes.append(f"alpha={a}: slope {det['slope_lower_edge']:.4f} vs target {a / 2:.2f}")
    return CriterionResult(10, "comparison lemma growth d^(alpha/2)", ok, rows, notes)


# ------------------------------------------------------------------ 11 pathwise invariants


def criterion_11(scale=1.0, seed=SEED, **_):
    rows, ok = [], True
    m = _n(2_000, scale)
    # full records, each checked for interlacing and tau_Z <= tau_Y
    checked = 0
    for k, (D, a) in enumerate(((Interval(), 1.0), (Ball(2), 0.5), (Slab(2), 1.5),
                                (Box([1.0, 0.5]), 1.0))):
        rng = st.RngStream(seed, 500 + k)
        for _ in range(m // 4):
            rec = st.resurrection_run(rng, D, D.interior_point, a / 2, 1e-3, 1e-3)
            rec.check()
            checked += 1
    rows.append(Row("invariants", "records_checked", float(checked), None, None, None, None,
                    None, "pass"))
    # localization monotonicity with shared randomness on a slab
    D = Slab(2)
    radii = np.array([1.0, 2.0, 4.0, 8.0, np.inf])
    viol = 0
    for i in range(m):
        rng = st.RngStream(seed, 10_000 + i)
        tw, tz = st.coupled_nested_exits(rng, D, [0.0, 0.0], radii, 0.5, 1e-3, 1e-3)
        ty = st.subordinate_walk_exits(rng, D, [0.0, 0.0], radii, 0.5, 1e-3)
        for t in (tw, tz, ty):
            viol += int(np.any(np.diff(t) < 0))
    good = viol == 0
    ok &= good
    rows.append(Row("invariants", "localization_violations", float(viol), 1.0, 2, None, 0.0,
                    0.0, "pass" if good else "fail", seed, m, 1e-3, 1e-3))
    return CriterionResult(11, "pathwise invariants (interlacing, tau_Z <= tau_Y, localization)",
                           ok, rows)


CRITERIA = {k: globals()[f"criterion_{k}"] for k in range(1, 12)}


def run(criteria=None, scale=1.0, seed=SEED, n_jobs=None, echo=None):
    out = []
    for k in criteria or sorted(CRITERIA):
        res = CRITERIA[k](scale=scale, seed=seed, n_jobs=n_jobs)
        if echo:
            echo(res.line())
        out.append(res)
    return out
