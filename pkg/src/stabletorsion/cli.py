"""Command-line entry point: ``stabletorsion {bounds,simulate,verify,table}``.

Exit codes: 0 success, 1 usage/config error, 2 numerical error, 3 verification failure.
"""

import argparse
import sys

import numpy as np

from . import acceptance
from . import analytic as an
from . import estimators as est
from . import verify as vf
from .config import load_config
from .errors import ConfigError, StableTorsionError
from .report import Row, to_csv, to_json, version_string, write

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL, EXIT_FAILED = 0, 1, 2, 3

ESTIMATORS = ("torsion", "sup_torsion", "eigenvalue", "resurrection_tail", "jensen",
              "char_function")
CHECKS = ("theorem1", "theorem2", "chen_song", "geometric_domination", "comparison_lemma",
          "torsion_analogue", "sharpened_lower")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common(p):
    p.add_argument("--config", help="INI file; flags override its values")
    p.add_argument("--section", help="section of the config file (default: first)")
    for key, typ in (("alpha", float), ("dim", int), ("domain", str), ("radius", float),
                     ("half-width", float), ("half-widths", str), ("normals", str),
                     ("offsets", str), ("interior", str), ("x", str), ("process", str),
                     ("n", int), ("n-eig", int), ("h", float), ("h-s", float),
                     ("seed", lambda s: int(s, 0)), ("workers", int), ("output", str),
                     ("format", str), ("d-list", str), ("scale", float)):
        p.add_argument(f"--{key}", type=typ, dest=key.replace("-", "_"), default=None)


def build_parser():
    parser = _Parser(prog="stabletorsion", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    b = sub.add_parser("bounds", help="closed-form quantities for (alpha, d)")
    _common(b)
    s = sub.add_parser("simulate", help="run one estimator")
    _common(s)
    s.add_argument("--estimator", choices=ESTIMATORS, dest="experiment", default=None)
    v = sub.add_parser("verify", help="run one inequality check")
    _common(v)
    v.add_argument("--check", choices=CHECKS, dest="experiment", default=None)
    t = sub.add_parser("table", help="reproduce the acceptance grid as one CSV")
    _common(t)
    t.add_argument("--criteria", default=None, help="comma-separated criterion numbers")
    return parser


# ------------------------------------------------------------------ commands


def cmd_bounds(cfg):
    a, d = cfg.alpha, cfg.dim
    p = an.StableParams(a, d)
    lam_w = an.lambda_ball_brownian(d)
    u_x = an.ball_torsion_sup(p)
    u_w = 1.0 / (2.0 * d)
    cs = an.chen_song_window(lam_w, a)
    t1 = an.theorem1_bounds(p, 1.0)
    t2 = an.theorem2_bounds(lam_w ** (a / 2.0), an.renewal_stable(a, u_w))
    tb = an.torsion_ball_bounds(p)
    cl = an.comparison_lemma_bounds(p, 0.0, 0.0)
    C = an.bessel_constant()
    lb = an.lambda_ball_stable_bounds(p, C)
    E = "bounds"
    rows = [
        Row(E, "vogt_bound", an.vogt_bound(d), a, d),
        Row(E, "renewal_V_at_1", an.renewal_stable(a, 1.0), a, d),
        Row(E, "renewal_V_at_sup_u_W", an.renewal_stable(a, u_w), a, d),
        Row(E, "ball_torsion_sup", u_x, a, d, lower=tb.lower, upper=tb.upper),
        Row(E, "ball_lambda_W", lam_w, a, d),
        Row(E, "ball_sup_u_W", u_w, a, d),
        Row(E, "ball_lambda_window_chen_song", None, a, d, lower=cs.lower, upper=cs.upper),
        Row(E, "ball_lambda_bessel_window", None, a, d, lower=lb.lower, upper=lb.upper),
        Row(E, "bessel_constant_C", C, a, d),
        Row(E, "theorem1_prefactor", an.theorem1_prefactor(a), a, d),
        Row(E, "theorem1_product_bounds", None, a, d, lower=t1.lower, upper=t1.upper),
        Row(E, "theorem2_ball_bounds", u_x, a, d, lower=t2.lower, upper=t2.upper,
            verdict="pass" if t2.lower <= u_x <= t2.upper else "fail"),
        Row(E, "comparison_lemma_lower", cl.lower, a, d),
        Row(E, "vogt_over_d", an.vogt_bound(d) / d, a, d),
    ]
    return rows, EXIT_OK, None


def _mc_row(cfg, qty, m, n=None):
    return Row(cfg.experiment, qty, m.mean, cfg.alpha, cfg.dim, m.stderr, m.ci95[0],
               m.ci95[1], "", cfg.seed, n or m.n, m.params.get("h"), m.params.get("h_s"))


def cmd_simulate(cfg):
    D = cfg.build_domain()
    x = cfg.start_point(D)
    opts = dict(h=cfg.step, h_s=cfg.sub_step, seed=cfg.seed, n_jobs=cfg.workers or None)
    kind = cfg.experiment or "torsion"
    if kind == "torsion":
        m = est.mc_torsion(D, x, cfg.process, cfg.alpha, cfg.n, **opts)
        return [_mc_row(cfg, f"torsion_{cfg.process}", m)], EXIT_OK, m.to_dict()
    if kind == "sup_torsion":
        m = est.mc_sup_torsion(D, None, cfg.process, cfg.alpha, cfg.n, **opts)
        return [_mc_row(cfg, f"sup_torsion_{cfg.process}", m)], EXIT_OK, m.to_dict()
    if kind == "eigenvalue":
        f = est.mc_eigenvalue(D, cfg.process, cfg.alpha, cfg.n, x=x, **opts)
        row = Row(kind, f"lambda_{cfg.process}", f.lambda_hat, cfg.alpha, cfg.dim, f.stderr,
                  f.window[0], f.window[1], "", cfg.seed, cfg.n, f.params.get("h"),
                  f.params.get("h_s"))
        return [row], EXIT_OK, f.to_dict()
    if kind == "resurrection_tail":
        t = est.mc_resurrection_tail(D, x, cfg.alpha, cfg.n, cfg.step, cfg.sub_step, cfg.seed,
                                     n_jobs=cfg.workers or None)
        rows = [Row(kind, f"P(N>{r.k})", r.p, cfg.alpha, cfg.dim, r.stderr, 0.0, r.bound,
                    "", cfg.seed, cfg.n, t.params["h"], t.params["h_s"]) for r in t.rows]
        rows.append(_mc_row(cfg, "mean_N", t.mean_N))
        return rows, EXIT_OK, {"censored": t.censored}
    if kind == "jensen":
        lhs, rhs = est.jensen_identity_check(D, x, cfg.alpha, cfg.n, **opts)
        return [_mc_row(cfg, "E_tau_Z", lhs), _mc_row(cfg, "E_V_tau_W", rhs)], EXIT_OK, None
    if kind == "char_function":
        xi = x if cfg.x else np.full(cfg.dim, 1.0 / np.sqrt(cfg.dim))
        c = est.empirical_char_function(cfg.alpha, cfg.dim, xi, cfg.n, cfg.seed)
        rows = [_mc_row(cfg, "re_char_function", c.real), _mc_row(cfg, "im_char_function", c.imag),
                Row(kind, "target", c.target, cfg.alpha, cfg.dim)]
        return rows, EXIT_OK, None
    raise ConfigError(f"field 'experiment': unknown estimator {kind!r}")


def cmd_verify(cfg):
    kind = cfg.experiment or "theorem1"
    opts = dict(seed=cfg.seed, n_jobs=cfg.workers or None)
    if kind == "comparison_lemma":
        d_list = [int(t) for t in cfg.d_list.split(",") if t.strip()]
        rep = vf.verify_comparison_lemma(cfg.alpha, d_list)
    elif kind == "torsion_analogue":
        d_list = [int(t) for t in cfg.d_list.split(",") if t.strip()]
        rows = [Row(kind, f"ratio_d{r['d']}", r["ratio"], cfg.alpha, r["d"],
                    lower=r["V_of_sup_u_W"], upper=r["sup_u_X"])
                for r in vf.experiment_torsion_analogue(cfg.alpha, d_list)]
        return rows, EXIT_OK, None
    elif kind == "sharpened_lower":
        r = vf.experiment_sharpened_lower(cfg.alpha, cfg.n_eig, cfg.step or 1e-3, **opts)
        rows = [Row(kind, "lambda_I_hat", r["lambda_hat"], cfg.alpha, 1, r["stderr"],
                    seed=cfg.seed, n=cfg.n_eig, h=cfg.step or 1e-3),
                Row(kind, "lambda_I_hat_times_sup_u", r["product"], cfg.alpha, 1,
                    r["product_stderr"], seed=cfg.seed, n=cfg.n_eig, h=cfg.step or 1e-3)]
        return rows, EXIT_OK, r
    else:
        D = cfg.build_domain()
        if kind == "theorem1":
            rep = vf.verify_theorem1(D, cfg.alpha, cfg.n, cfg.n_eig, cfg.step, h_s=cfg.sub_step,
                                     **opts)
        elif kind == "theorem2":
            rep = vf.verify_theorem2(D, cfg.alpha, cfg.n, h=cfg.step, h_s=cfg.sub_step, **opts)
        elif kind == "chen_song":
            rep = vf.verify_chen_song(D, cfg.alpha, cfg.n, cfg.step or 1e-3, cfg.sub_step, **opts)
        elif kind == "geometric_domination":
            rep = vf.verify_geometric_domination(D, cfg.start_point(D), cfg.alpha, cfg.n,
                                                 cfg.step, cfg.sub_step, **opts)
        else:
            raise ConfigError(f"field 'experiment': unknown check {kind!r}")
    row = Row(kind, rep.inequality, rep.measured, cfg.alpha, cfg.dim, rep.stderr, rep.lower,
              rep.upper, rep.verdict, cfg.seed, cfg.n, cfg.step, cfg.sub_step)
    code = EXIT_FAILED if rep.verdict == "fail" else EXIT_OK
    return [row], code, rep.to_dict()


def cmd_table(cfg):
    crit = [int(t) for t in cfg.criteria.split(",") if t.strip()] or None
    results = acceptance.run(crit, cfg.scale, cfg.seed, cfg.workers or None,
                             echo=lambda s: print(s, file=sys.stderr))
    rows = []
    for res in results:
        for r in res.rows:
            r.experiment = f"c{res.number}:{r.experiment}"
            rows.append(r)
        rows.append(Row(f"c{res.number}:summary", "criterion_passed", float(res.passed),
                        verdict="pass" if res.passed else "fail"))
    code = EXIT_OK if all(r.passed for r in results) else EXIT_FAILED
    return rows, code, {f"criterion_{r.number}": r.notes for r in results}


COMMANDS = {"bounds": cmd_bounds, "simulate": cmd_simulate, "verify": cmd_verify,
            "table": cmd_table}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    overrides = {k: v for k, v in vars(args).items()
                 if k not in ("config", "section") and v is not None}
    if args.command == "table" and overrides.get("seed") is None and not args.config:
        overrides["seed"] = acceptance.SEED
    try:
        cfg = load_config(args.config, args.section, overrides)
    except ConfigError as exc:
        print(f"stabletorsion: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        rows, code, extra = COMMANDS[cfg.command](cfg)
    except ConfigError as exc:
        print(f"stabletorsion: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (StableTorsionError, ArithmeticError) as exc:
        print(f"stabletorsion: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    resolved = cfg.resolved()
    version = version_string()
    text = (to_json(rows, resolved, version, extra) if cfg.format == "json"
            else to_csv(rows, resolved, version))
    write(text, cfg.output or None)
    return code


if __name__ == "__main__":
    sys.exit(main())
