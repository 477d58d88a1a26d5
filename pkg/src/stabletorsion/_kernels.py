"""Compiled inner loops.

Every convex domain is stored as an intersection of halfspaces
``{x : A[i] . x < b[i]}`` (unit normals) and open balls ``|x - C[j]| < R[j]``.
The kernels below only see those four arrays.
"""

import math

import numba as nb
import numpy as np

_JIT = dict(nopython=True, cache=True, error_model="numpy")

# status codes for batch runs
OK = 0
BUDGET = 1
CAP = 2

# exp(-g0 g1 / h) below exp(-40) is treated as zero
_BRIDGE_CUTOFF = 40.0


# ---------------------------------------------------------------- geometry


@nb.jit(**_JIT)
def min_gap(x, A, b, C, R):
    """Signed distance-like gap: the exact distance to the boundary when x is
    inside, and a nonpositive number when x is outside."""
    d = x.shape[0]
    g = np.inf
    for i in range(A.shape[0]):
        s = b[i]
        for j in range(d):
            s -= A[i, j] * x[j]
        if s < g:
            g = s
    for i in range(C.shape[0]):
        r2 = 0.0
        for j in range(d):
            t = x[j] - C[i, j]
            r2 += t * t
        s = R[i] - math.sqrt(r2)
        if s < g:
            g = s
    return g


@nb.jit(**_JIT)
def min_gap_many(X, A, b, C, R):
    out = np.empty(X.shape[0])
    for k in range(X.shape[0]):
        out[k] = min_gap(X[k], A, b, C, R)
    return out


@nb.jit(**_JIT)
def ray_exit(x, u, A, b, C, R, out):
    """Write into ``out`` the first boundary point on the ray x + s u, s > 0,
    for x inside the domain."""
    d = x.shape[0]
    s_min = np.inf
    for i in range(A.shape[0]):
        au = 0.0
        ax = 0.0
        for j in range(d):
            au += A[i, j] * u[j]
            ax += A[i, j] * x[j]
        if au > 0.0:
            s = (b[i] - ax) / au
            if s < s_min:
                s_min = s
    for i in range(C.shape[0]):
        qa = 0.0
        qb = 0.0
        qc = -R[i] * R[i]
        for j in range(d):
            p = x[j] - C[i, j]
            qa += u[j] * u[j]
            qb += p * u[j]
            qc += p * p
        if qa > 0.0:
            disc = qb * qb - qa * qc
            if disc < 0.0:
                disc = 0.0
            s = (-qb + math.sqrt(disc)) / qa
            if s < s_min:
                s_min = s
    if s_min < 0.0:
        s_min = 0.0
    for j in range(d):
        out[j] = x[j] + s_min * u[j]


@nb.jit(**_JIT)
def _bridge_crossing(x0, x1, A, b, C, R, h, normal):
    """Probability that the Brownian bridge from x0 to x1 (variance 2h per
    coordinate) leaves through some supporting halfspace; ``normal`` receives
    the outward normal of the most likely one."""
    d = x0.shape[0]
    q = 1.0
    p_best = 0.0
    for i in range(A.shape[0]):
        g0 = b[i]
        g1 = b[i]
        for j in range(d):
            g0 -= A[i, j] * x0[j]
            g1 -= A[i, j] * x1[j]
        e = g0 * g1 / h
        if e < _BRIDGE_CUTOFF:
            p = math.exp(-e)
            q *= 1.0 - p
            if p > p_best:
                p_best = p
                for j in range(d):
                    normal[j] = A[i, j]
    for i in range(C.shape[0]):
        r = 0.0
        for j in range(d):
            t = x0[j] - C[i, j]
            r += t * t
        r = math.sqrt(r)
        g0 = R[i] - r
        if g0 * g0 / h >= _BRIDGE_CUTOFF or r == 0.0:
            continue
        # tangent plane at the radial projection of x0
        proj = 0.0
        for j in range(d):
            proj += (x0[j] - C[i, j]) * (x1[j] - C[i, j])
        g1 = R[i] - proj / r
        e = g0 * g1 / h
        if e < _BRIDGE_CUTOFF:
            p = math.exp(-e)
            q *= 1.0 - p
            if p > p_best:
                p_best = p
                for j in range(d):
                    normal[j] = (x0[j] - C[i, j]) / r
    return 1.0 - q


# ---------------------------------------------------------------- Brownian


@nb.jit(**_JIT)
def brownian_exit_one(rng, x0, A, b, C, R, h, max_steps, exit_point):
    """Exit time of speed-2 Brownian motion started at x0 (assumed inside).

    Fixed Euler steps of length h; a step whose endpoint stays inside still
    counts as an exit with the bridge crossing probability. Returns
    (time, status); ``exit_point`` is set to a point of the boundary.
    Every step draws d normals and one uniform regardless of the outcome, so
    paths from different domains stay coupled.
    """
    d = x0.shape[0]
    x = x0.copy()
    x1 = np.empty(d)
    u = np.empty(d)
    normal = np.zeros(d)
    s = math.sqrt(2.0 * h)
    far = _BRIDGE_CUTOFF * h
    t = 0.0
    g = min_gap(x, A, b, C, R)
    for _ in range(max_steps):
        for j in range(d):
            x1[j] = x[j] + s * rng.standard_normal()
        v = rng.random()
        g1 = min_gap(x1, A, b, C, R)
        if g1 <= 0.0:
            for j in range(d):
                u[j] = x1[j] - x[j]
            ray_exit(x, u, A, b, C, R, exit_point)
            return t + 0.5 * h, OK
        # every per-constraint product g0 g1 is at least g * g1
        if g * g1 < far:
            p = _bridge_crossing(x, x1, A, b, C, R, h, normal)
            if v < p:
                ray_exit(x1, normal, A, b, C, R, exit_point)
                return t + 0.5 * h, OK
        for j in range(d):
            x[j] = x1[j]
        g = g1
        t += h
    for j in range(d):
        exit_point[j] = x[j]
    return t, BUDGET


@nb.jit(**_JIT)
def brownian_exit_batch(rng, x0, A, b, C, R, h, max_steps, tau, points, status):
    inside = min_gap(x0, A, b, C, R) > 0.0
    for i in range(tau.shape[0]):
        if not inside:
            tau[i] = 0.0
            points[i, :] = x0
            status[i] = OK
            continue
        t, st = brownian_exit_one(rng, x0, A, b, C, R, h, max_steps, points[i])
        tau[i] = t
        status[i] = st


# ---------------------------------------------------------------- subordinator


@nb.jit(**_JIT)
def _kanter(u, rho):
    # Kanter's function; increasing on (0, pi)
    return (math.sin(rho * u) ** (rho / (1.0 - rho)) * math.sin((1.0 - rho) * u)
            / math.sin(u) ** (1.0 / (1.0 - rho)))


@nb.jit(**_JIT)
def stable_variate(rng, rho):
    """Positive stable variate with Laplace transform exp(-lam^rho), 0 < rho < 1."""
    u = math.pi * rng.random()
    while u == 0.0:
        u = math.pi * rng.random()
    e = rng.standard_exponential()
    return (_kanter(u, rho) / e) ** ((1.0 - rho) / rho)


@nb.jit(**_JIT)
def stable_fill(rng, rho, out):
    for i in range(out.shape[0]):
        out[i] = stable_variate(rng, rho)


@nb.jit(**_JIT)
def _biased_neg_power(rng, rho):
    """Draw S^-rho where S has density proportional to s^-rho p_1(s), p_1 the
    positive rho-stable density. In Kanter's representation this tilts E to a
    Gamma(2 - rho) law and U to a density proportional to A(U)^-(1-rho)."""
    a0 = rho ** (rho / (1.0 - rho)) * (1.0 - rho)
    while True:
        u = math.pi * rng.random()
        if u == 0.0:
            continue
        if rng.random() <= (a0 / _kanter(u, rho)) ** (1.0 - rho):
            break
    e = rng.standard_gamma(2.0 - rho)
    return (e / _kanter(u, rho)) ** (1.0 - rho)


@nb.jit(**_JIT)
def passage(rng, rho, level, h_s):
    """First passage of a fresh rho-stable subordinator over ``level``.

    Returns (sigma, S_sigma). The continuous-time pair is drawn exactly:
    undershoot ~ level * Beta(rho, 1 - rho), the crossing jump is Pareto given
    the undershoot, and sigma = (undershoot / S*)^rho with S* size-biased by
    s^-rho. With h_s > 0 sigma is rounded up to the grid h_s Z and S is
    advanced over the remaining time, which is the law of the grid-observed
    passage. The draw count does not depend on ``level``.
    """
    if rho >= 1.0:
        if level <= 0.0:
            return 0.0, 0.0
        return level, level
    bb = rng.beta(rho, 1.0 - rho)
    pareto = (1.0 - rng.random()) ** (-1.0 / rho)
    w = _biased_neg_power(rng, rho)
    extra_s = stable_variate(rng, rho)
    if level <= 0.0:
        return 0.0, 0.0
    y = level * bb
    jump = y + (level - y) * pareto
    if jump < level:
        jump = level
    sigma = y ** rho * w
    if h_s > 0.0:
        k = math.ceil(sigma / h_s)
        if k < 1.0:
            k = 1.0
        grid = k * h_s
        extra = grid - sigma
        if extra > 0.0:
            jump += extra ** (1.0 / rho) * extra_s
        sigma = grid
    return sigma, jump


@nb.jit(**_JIT)
def passage_batch(rng, rho, level, h_s, sigma, jump):
    for i in range(sigma.shape[0]):
        s, j = passage(rng, rho, level, h_s)
        sigma[i] = s
        jump[i] = j


@nb.jit(**_JIT)
def passage_walk(rng, rho, level, h_s, max_steps):
    """Brute-force grid passage: add h_s^(1/rho) S_1 increments until >= level."""
    if level <= 0.0:
        return 0.0, 0.0
    scale = h_s ** (1.0 / rho)
    s = 0.0
    for k in range(1, max_steps + 1):
        s += scale * stable_variate(rng, rho)
        if s >= level:
            return k * h_s, s
    return np.inf, s


@nb.jit(**_JIT)
def passage_walk_batch(rng, rho, level, h_s, max_steps, sigma, jump):
    for i in range(sigma.shape[0]):
        s, j = passage_walk(rng, rho, level, h_s, max_steps)
        sigma[i] = s
        jump[i] = j


# ---------------------------------------------------------------- resurrection


@nb.jit(**_JIT)
def resurrection_batch(rng_w, rng_s, x0, A, b, C, R, rho, h, h_s, cap, max_steps,
                       tau_y, tau_z, tau_w, n_out, status, rec_tau, rec_sigma, rec_s):
    """Repeated resurrections of the subordinate killed process.

    tau_{n+1} is the Brownian exit after S_{sigma_n}; sigma_{n+1} the passage
    of S over tau_{n+1}; W at S_{sigma_{n+1}} is the exit point plus a Gaussian
    of variance 2 (S_{sigma_{n+1}} - tau_{n+1}). The run stops when that point
    is outside. Returns the number of interlacing violations (must be 0).
    """
    d = x0.shape[0]
    n_rec = rec_tau.shape[0]
    pos = np.empty(d)
    exit_pt = np.empty(d)
    bad = 0
    inside0 = min_gap(x0, A, b, C, R) > 0.0
    for i in range(tau_y.shape[0]):
        status[i] = OK
        if i < n_rec:
            rec_tau[i, :] = np.nan
            rec_sigma[i, :] = np.nan
            rec_s[i, :] = np.nan
            rec_tau[i, 0] = 0.0
            rec_sigma[i, 0] = 0.0
            rec_s[i, 0] = 0.0
        if not inside0:
            tau_y[i] = 0.0
            tau_z[i] = 0.0
            tau_w[i] = 0.0
            n_out[i] = 0
            continue
        for j in range(d):
            pos[j] = x0[j]
        s_prev = 0.0
        tau_prev = 0.0
        sig = 0.0
        done = False
        for m in range(cap):
            t_exit, st = brownian_exit_one(rng_w, pos, A, b, C, R, h, max_steps, exit_pt)
            if st != OK:
                status[i] = BUDGET
                tau_y[i] = sig
                if m == 0:
                    tau_z[i] = sig
                    tau_w[i] = t_exit
                n_out[i] = m
                done = True
                break
            tau_next = s_prev + t_exit
            ds, jump = passage(rng_s, rho, t_exit, h_s)
            if jump < t_exit:
                jump = t_exit
            sig += ds
            s_new = s_prev + jump
            if not (tau_prev <= s_prev and s_prev <= tau_next and tau_next <= s_new):
                bad += 1
            if m == 0:
                tau_z[i] = sig
                tau_w[i] = t_exit
            if i < n_rec:
                rec_tau[i, m + 1] = tau_next
                rec_sigma[i, m + 1] = sig
                rec_s[i, m + 1] = s_new
            sd = math.sqrt(2.0 * (jump - t_exit))
            for j in range(d):
                pos[j] = exit_pt[j] + sd * rng_w.standard_normal()
            if min_gap(pos, A, b, C, R) <= 0.0:
                tau_y[i] = sig
                n_out[i] = m + 1
                done = True
                break
            s_prev = s_new
            tau_prev = tau_next
        if not done:
            status[i] = CAP
            tau_y[i] = sig
            n_out[i] = cap
        if tau_z[i] > tau_y[i]:
            bad += 1
    return bad


@nb.jit(**_JIT)
def stay_from_boundary(rng_w, rng_s, points, A, b, C, R, rho, levels, h_s, inside):
    """One resurrection step from boundary points: draw the passage over each
    level, displace by the overshoot and record whether W lands in the domain."""
    d = points.shape[1]
    y = np.empty(d)
    for i in range(points.shape[0]):
        _, jump = passage(rng_s, rho, levels[i], h_s)
        over = jump - levels[i]
        if over < 0.0:
            over = 0.0
        sd = math.sqrt(2.0 * over)
        for j in range(d):
            y[j] = points[i, j] + sd * rng_w.standard_normal()
        inside[i] = min_gap(y, A, b, C, R) > 0.0


# ---------------------------------------------------------------- coupled runs


@nb.jit(**_JIT)
def _nested_gap(x, A, b, C, R, radius):
    g = min_gap(x, A, b, C, R)
    if radius < np.inf:
        r = 0.0
        for j in range(x.shape[0]):
            r += x[j] * x[j]
        r = radius - math.sqrt(r)
        if r < g:
            g = r
    return g


@nb.jit(**_JIT)
def _origin_ball_crossing(x0, x1, radius, h):
    # bridge crossing of the tangent plane of B(0, radius) at x0's projection
    r = 0.0
    proj = 0.0
    for j in range(x0.shape[0]):
        r += x0[j] * x0[j]
        proj += x0[j] * x1[j]
    r = math.sqrt(r)
    if r == 0.0:
        return 0.0
    e = (radius - r) * (radius - proj / r) / h
    if e >= _BRIDGE_CUTOFF:
        return 0.0
    return math.exp(-e)


@nb.jit(**_JIT)
def _nested_crossing(x0, x1, A, b, C, R, radius, h, normal):
    p = _bridge_crossing(x0, x1, A, b, C, R, h, normal)
    if radius < np.inf:
        q = _origin_ball_crossing(x0, x1, radius, h)
        p = 1.0 - (1.0 - p) * (1.0 - q)
    return p


@nb.jit(**_JIT)
def nested_exits(rng_w, rng_s, x0, A, b, C, R, radii, rho, h, h_s, max_steps,
                 tau_w, tau_z):
    """One Brownian path and one subordinator draw shared by the nested
    domains D cap B(0, radii[k]); writes each domain's tau_W and tau_Z."""
    d = x0.shape[0]
    m = radii.shape[0]
    x = x0.copy()
    x1 = np.empty(d)
    normal = np.empty(d)
    alive = np.ones(m, dtype=np.bool_)
    for k in range(m):
        if _nested_gap(x0, A, b, C, R, radii[k]) <= 0.0:
            alive[k] = False
            tau_w[k] = 0.0
    t = 0.0
    n_alive = 0
    for k in range(m):
        if alive[k]:
            n_alive += 1
    steps = 0
    s = math.sqrt(2.0 * h)
    far = _BRIDGE_CUTOFF * h
    gap = np.empty(m)
    for k in range(m):
        gap[k] = _nested_gap(x0, A, b, C, R, radii[k])
    while n_alive > 0 and steps < max_steps:
        for j in range(d):
            x1[j] = x[j] + s * rng_w.standard_normal()
        v = rng_w.random()
        for k in range(m):
            if not alive[k]:
                continue
            g1 = _nested_gap(x1, A, b, C, R, radii[k])
            gone = g1 <= 0.0
            if not gone and gap[k] * g1 < far:
                gone = v < _nested_crossing(x, x1, A, b, C, R, radii[k], h, normal)
            gap[k] = g1
            if gone:
                alive[k] = False
                tau_w[k] = t + 0.5 * h
                n_alive -= 1
        for j in range(d):
            x[j] = x1[j]
        t += h
        steps += 1
    for k in range(m):
        if alive[k]:
            tau_w[k] = np.inf
    # one set of subordinator draws, reused for every level
    bb = rng_s.beta(rho, 1.0 - rho) if rho < 1.0 else 0.0
    w = _biased_neg_power(rng_s, rho) if rho < 1.0 else 1.0
    for k in range(m):
        lev = tau_w[k]
        if rho >= 1.0:
            tau_z[k] = lev
        elif lev <= 0.0:
            tau_z[k] = 0.0
        else:
            sig = (lev * bb) ** rho * w
            if h_s > 0.0:
                kk = math.ceil(sig / h_s)
                if kk < 1.0:
                    kk = 1.0
                sig = kk * h_s
            tau_z[k] = sig


@nb.jit(**_JIT)
def walk_exit_nested(rng, x0, A, b, C, R, radii, rho, h_s, max_steps, tau_y):
    """Subordinate walk Y_{k h_s} = W(S_{k h_s}) observed on the subordinator
    grid; tau_y[k] is its first grid time outside D cap B(0, radii[k])."""
    d = x0.shape[0]
    m = radii.shape[0]
    y = x0.copy()
    alive = np.ones(m, dtype=np.bool_)
    n_alive = m
    for k in range(m):
        if _nested_gap(y, A, b, C, R, radii[k]) <= 0.0:
            alive[k] = False
            tau_y[k] = 0.0
            n_alive -= 1
    scale = h_s ** (1.0 / rho) if rho < 1.0 else h_s
    for step in range(1, max_steps + 1):
        if n_alive == 0:
            break
        ds = scale * stable_variate(rng, rho) if rho < 1.0 else h_s
        sd = math.sqrt(2.0 * ds)
        for j in range(d):
            y[j] += sd * rng.standard_normal()
        for k in range(m):
            if alive[k] and _nested_gap(y, A, b, C, R, radii[k]) <= 0.0:
                alive[k] = False
                tau_y[k] = step * h_s
                n_alive -= 1
    for k in range(m):
        if alive[k]:
            tau_y[k] = np.inf


@nb.jit(**_JIT)
def killed_batch(rng_w, rng_s, x0, A, b, C, R, rho, h, h_s, max_steps, tau_w, tau_z, status):
    """tau_Z = sigma_1: Brownian exit followed by one subordinator passage.
    Consumes draws in the same order as the first round of resurrection_batch."""
    d = x0.shape[0]
    exit_pt = np.empty(d)
    inside0 = min_gap(x0, A, b, C, R) > 0.0
    for i in range(tau_w.shape[0]):
        status[i] = OK
        if not inside0:
            tau_w[i] = 0.0
            tau_z[i] = 0.0
            continue
        t_exit, st = brownian_exit_one(rng_w, x0, A, b, C, R, h, max_steps, exit_pt)
        tau_w[i] = t_exit
        if st != OK:
            status[i] = BUDGET
            tau_z[i] = 0.0
            continue
        ds, _ = passage(rng_s, rho, t_exit, h_s)
        tau_z[i] = ds
