"""Closed-form quantities: Laplace exponents, renewal functions and the
spectral/torsion bounds for symmetric stable processes and balls."""

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import integrate

from .errors import DomainError, IntegrationError
from .special import bessel_first_zero, gamma_fn, gammaln

INF = math.inf

_QUAD_EPSABS = 1e-10
_QUAD_EPSREL = 1e-8


@dataclass(frozen=True)
class StableParams:
    """Index ``alpha`` in (0, 2] and dimension ``d`` of a symmetric stable process."""

    alpha: float
    d: int

    def __post_init__(self):
        if not 0.0 < self.alpha <= 2.0:
            raise DomainError(f"alpha must lie in (0, 2], got {self.alpha!r}")
        if int(self.d) != self.d or self.d < 1:
            raise DomainError(f"d must be a positive integer, got {self.d!r}")

    @property
    def rho(self):
        """Index of the subordinator realizing the process (alpha / 2)."""
        return self.alpha / 2.0


@dataclass(frozen=True)
class SubordinatorSpec:
    """Laplace exponent data of a subordinator.

    Either ``stable_index`` is set (closed form ``lam ** stable_index``) or the
    exponent is assembled from ``killing_rate``, ``drift`` and ``levy_density``.
    """

    killing_rate: float = 0.0
    drift: float = 0.0
    levy_density: Optional[Callable[[float], float]] = None
    stable_index: Optional[float] = None

    def __post_init__(self):
        if self.killing_rate < 0 or self.drift < 0:
            raise DomainError("killing rate and drift must be nonnegative")
        if self.stable_index is not None and not 0.0 < self.stable_index <= 1.0:
            raise DomainError(f"stable index must lie in (0, 1], got {self.stable_index!r}")
        if self.levy_density is not None:
            try:
                with warnings.catch_warnings():
                    warnings.simplefilter("error", integrate.IntegrationWarning)
                    mass = _quad(lambda t: t * self.levy_density(t), 0.0, 1.0)
                    mass += _quad(self.levy_density, 1.0, INF)
            except (integrate.IntegrationWarning, IntegrationError):
                mass = INF
            if not math.isfinite(mass):
                raise DomainError("Levy density violates int (1 ^ t) Pi(dt) < inf")

    @classmethod
    def stable(cls, rho):
        return cls(stable_index=rho)

    @classmethod
    def stable_levy(cls, rho):
        """The rho-stable subordinator written through its Levy density."""
        if not 0.0 < rho < 1.0:
            raise DomainError("stable Levy density requires 0 < rho < 1")
        c = rho / gamma_fn(1.0 - rho)
        return cls(levy_density=lambda t: c * t ** (-1.0 - rho))


def _quad(f, a, b):
    val, err = integrate.quad(f, a, b, epsabs=_QUAD_EPSABS, epsrel=_QUAD_EPSREL, limit=200)
    if not math.isfinite(val) or err > max(_QUAD_EPSABS, _QUAD_EPSREL * abs(val)) * 100:
        raise IntegrationError(f"quadrature on ({a}, {b}) did not converge: err={err:g}")
    return val


def laplace_exponent(spec, lam):
    """Phi(lam) = k + d lam + int (1 - exp(-lam t)) Pi(dt)."""
    lam = float(lam)
    if lam < 0:
        raise DomainError(f"lambda must be >= 0, got {lam!r}")
    if spec.stable_index is not None:
        return spec.killing_rate + spec.drift * lam + lam ** spec.stable_index
    val = spec.killing_rate + spec.drift * lam
    if spec.levy_density is not None and lam > 0:
        g = spec.levy_density
        # -expm1 keeps 1 - exp(-lam t) accurate near t = 0
        val += _quad(lambda t: -math.expm1(-lam * t) * g(t), 0.0, 1.0)
        val += _quad(lambda t: -math.expm1(-lam * t) * g(t), 1.0, INF)
    return val


def conjugate_exponent(spec, lam):
    """lam / Phi(lam)."""
    if not lam > 0:
        raise DomainError(f"lambda must be > 0, got {lam!r}")
    phi = laplace_exponent(spec, lam)
    if phi == 0.0:
        raise ZeroDivisionError("Phi(lambda) = 0")
    return lam / phi


def renewal_stable(alpha, x):
    """Renewal function V(x) = 2 x^(alpha/2) / (alpha Gamma(alpha/2)) of the
    alpha/2-stable subordinator."""
    _check_alpha(alpha)
    if x < 0:
        raise DomainError(f"x must be >= 0, got {x!r}")
    if x == INF:
        return INF
    return 2.0 * x ** (alpha / 2.0) / (alpha * gamma_fn(alpha / 2.0))


def potential_density_stable(alpha, t):
    """Density v(t) = t^(alpha/2 - 1) / Gamma(alpha/2) of the potential measure."""
    _check_alpha(alpha)
    if not t > 0:
        raise DomainError(f"t must be > 0, got {t!r}")
    return t ** (alpha / 2.0 - 1.0) / gamma_fn(alpha / 2.0)


@dataclass(frozen=True)
class RenewalFunction:
    """Renewal function V, its density v and atom c at the origin."""

    V: Callable[[float], float]
    v: Callable[[float], float]
    atom: float = 0.0

    @classmethod
    def stable(cls, alpha):
        return cls(V=lambda x: renewal_stable(alpha, x),
                   v=lambda t: potential_density_stable(alpha, t))

    def check(self, grid):
        """Check V(0) = atom, V nondecreasing and concave, v nonincreasing."""
        grid = np.asarray(grid, dtype=float)
        vals = np.array([self.V(x) for x in grid])
        dens = np.array([self.v(x) for x in grid if x > 0])
        ok = abs(self.V(0.0) - self.atom) < 1e-12
        ok &= bool(np.all(np.diff(vals) >= -1e-12))
        ok &= bool(np.all(np.diff(dens) <= 1e-12))
        if self.atom == 0.0 and len(grid) > 2:
            slopes = np.diff(vals) / np.diff(grid)
            ok &= bool(np.all(np.diff(slopes) <= 1e-9))
        return ok


def renewal_integral_check(alpha, x):
    """|int_0^x v - V(x)| computed by quadrature (singular weight at 0)."""
    rho = alpha / 2.0
    if rho == 1.0:
        integral = x
    else:
        # t^(rho-1) handled exactly by the algebraic weight
        integral, _ = integrate.quad(lambda t: 1.0 / gamma_fn(rho), 0.0, x,
                                     weight="alg", wvar=(rho - 1.0, 0.0),
                                     epsabs=1e-13, epsrel=1e-12)
    return abs(integral - renewal_stable(alpha, x))


def laplace_link_check(alpha, lam):
    """Relative gap between int exp(-lam x) v(x) dx and 1 / Phi(lam)."""
    _check_alpha(alpha)
    if not lam > 0:
        raise DomainError(f"lambda must be > 0, got {lam!r}")
    rho = alpha / 2.0
    target = lam ** (-rho)
    g = gamma_fn(rho)
    if rho == 1.0:
        head = _quad(lambda t: math.exp(-lam * t), 0.0, 1.0)
    else:
        head, err = integrate.quad(lambda t: math.exp(-lam * t) / g, 0.0, 1.0,
                                   weight="alg", wvar=(rho - 1.0, 0.0),
                                   epsabs=_QUAD_EPSABS, epsrel=_QUAD_EPSREL)
    tail = _quad(lambda t: math.exp(-lam * t) * t ** (rho - 1.0) / g, 1.0, INF)
    return abs(head + tail - target) / target


def vogt_bound(d):
    """Vogt's explicit upper bound on lambda_D ||u_D||_inf over domains in R^d."""
    if d < 1:
        raise DomainError("d must be >= 1")
    return d / 8.0 + math.sqrt(d) / 4.0 * math.sqrt(5.0 * (1.0 + 0.25 * math.log(2.0))) + 1.0


def ball_torsion_profile(params, r):
    """Torsion function of the alpha-stable process on the unit ball at |x| = r."""
    if not 0.0 <= r <= 1.0:
        raise DomainError(f"radius must lie in [0, 1], got {r!r}")
    a, d = params.alpha, params.d
    log_c = (gammaln(d / 2.0) - a * math.log(2.0) - gammaln(1.0 + a / 2.0)
             - gammaln(d / 2.0 + a / 2.0))
    return math.exp(log_c) * (1.0 - r * r) ** (a / 2.0)


def ball_torsion_sup(params):
    """||u_B||_inf for the unit ball, attained at the centre."""
    return ball_torsion_profile(params, 0.0)


@dataclass(frozen=True)
class BoundSet:
    lower: float
    upper: float
    label: str = ""

    def __post_init__(self):
        if self.lower > self.upper:
            raise DomainError(f"bound set {self.label!r} has lower > upper")

    def __contains__(self, value):
        return self.lower <= value <= self.upper

    @property
    def width(self):
        return self.upper - self.lower


def wendel_bounds(x, a):
    """Bracket (x/(x+a))^(1-a) <= Gamma(x+a) / (x^a Gamma(x)) <= 1."""
    if not x > 0 or not 0.0 < a < 1.0:
        raise DomainError("wendel_bounds needs x > 0 and 0 < a < 1")
    return BoundSet((x / (x + a)) ** (1.0 - a), 1.0, "wendel")


def wendel_ratio(x, a):
    return math.exp(gammaln(x + a) - gammaln(x) - a * math.log(x))


def lambda_ball_brownian(d):
    """Principal Dirichlet eigenvalue of the unit ball for speed-2 Brownian motion."""
    if d < 1:
        raise DomainError("d must be >= 1")
    return bessel_first_zero(d / 2.0 - 1.0) ** 2


def bessel_constant(d_max=200):
    """Smallest C with lambda_B - d^2/4 <= C d^(4/3) for d = 1..d_max."""
    return max((lambda_ball_brownian(d) - d * d / 4.0) / d ** (4.0 / 3.0)
               for d in range(1, d_max + 1))


def chen_song_window(lambda_w, alpha):
    """[Phi(lambda_W) / 2, Phi(lambda_W)] with Phi(lam) = lam^(alpha/2)."""
    if lambda_w < 0:
        raise DomainError("lambda_W must be >= 0")
    phi = lambda_w ** (alpha / 2.0)
    return BoundSet(0.5 * phi, phi, "chen_song")


def lambda_ball_stable_bounds(params, C):
    """Two-sided bound on the unit-ball eigenvalue of the stable process."""
    if C < 0:
        raise DomainError("C must be >= 0")
    a, d = params.alpha, params.d
    lower = d**a / 2.0 ** (a + 1.0)
    upper = d**a / 2.0**a + C ** (a / 2.0) * d ** (2.0 * a / 3.0)
    return BoundSet(lower, upper, "bessel_window")


def torsion_ball_bounds(params):
    a, d = params.alpha, params.d
    k = 2.0 ** (-a / 2.0) / gamma_fn(1.0 + a / 2.0)
    lower = k * d ** (-a / 2.0)
    return BoundSet(lower, lower + k * a ** (1.0 - a / 2.0) / d, "torsion_ball")


def theorem1_prefactor(alpha):
    _check_alpha(alpha)
    return 4.0 / (alpha * gamma_fn(alpha / 2.0))


def theorem1_bounds(params, lambda_x):
    """[1/lambda, 4 V_d^(alpha/2) / (alpha Gamma(alpha/2) lambda)] for ||u_D||_inf."""
    if not lambda_x > 0:
        return BoundSet(INF, INF, "theorem1")
    a = params.alpha
    upper = theorem1_prefactor(a) * vogt_bound(params.d) ** (a / 2.0) / lambda_x
    return BoundSet(1.0 / lambda_x, upper, "theorem1")


def theorem2_bounds(phi_at_lambda_w, v_at_sup_torsion_w):
    """[1/Phi(lambda_W), 2 V(||u_W||_inf)], with 1/0 = inf and V(inf) = inf."""
    if phi_at_lambda_w < 0 or v_at_sup_torsion_w < 0:
        raise DomainError("theorem2 inputs must be nonnegative")
    if phi_at_lambda_w == 0 or v_at_sup_torsion_w == INF:
        # lambda_W = 0 exactly when ||u_W|| = inf: both sides degenerate
        return BoundSet(INF, INF, "theorem2")
    return BoundSet(1.0 / phi_at_lambda_w, 2.0 * v_at_sup_torsion_w, "theorem2")


def comparison_lemma_bounds(params, C1, C2):
    a, d = params.alpha, params.d
    main = 2.0 ** (-1.5 * a) * d ** (a / 2.0) / gamma_fn(1.0 + a / 2.0)
    return BoundSet(0.5 * main, main + C1 * d ** (a / 6.0) + C2 * d ** (a - 1.0),
                    "comparison_lemma")


def _check_alpha(alpha):
    if not 0.0 < alpha <= 2.0:
        raise DomainError(f"alpha must lie in (0, 2], got {alpha!r}")
