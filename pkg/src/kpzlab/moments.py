"""Annealed moments of the Beta-weight path model by nested contour
integrals, the matching continuum-field moment formulas, exhaustive
enumeration oracles, and the saddle-point analysis connecting the two
under diffusive rescaling.

Circle contours are integrated by the periodic trapezoid rule and
vertical lines by Gauss-Legendre after an explicit Gaussian-tail
truncation; both are spectrally accurate for the analytic integrands
here.  Exponents of size T * O(1) are assembled in the log domain and
the common scale is removed before summation.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .rwre import polymer_target_index
from .scaling import ScalingFrame
from .ssrw import heat_kernel, rate_pair

#: minimum admissible distance from any quadrature node to a pole
POLE_CLEARANCE = 1e-3

#: default radial gap, beyond the required +1, between nested circles
NESTING_MARGIN = 0.5


@dataclass(frozen=True)
class CircleContour:
    center: complex
    radius: float
    n_points: int = 512

    def nodes(self):
        theta = 2.0 * math.pi * np.arange(self.n_points) / self.n_points
        unit = np.exp(1j * theta)
        return self.center + self.radius * unit, unit

    def weight(self):
        # (1/2pi*i) * dz for the trapezoid rule absorbs to radius/M times e^{i theta}
        return self.radius / self.n_points


@dataclass(frozen=True)
class VerticalContour:
    offset: float
    half_length: float
    n_points: int = 200

    def nodes(self):
        x, w = np.polynomial.legendre.leggauss(self.n_points)
        s = self.half_length * x
        return self.offset + 1j * s, self.half_length * w


@dataclass(frozen=True)
class MomentResult:
    """A real moment with quadrature diagnostics."""

    value: float
    log_abs: float
    imag_residual: float  # |imaginary part| relative to |value|
    n_points: int
    details: dict = field(default_factory=dict)


def beta_moment_closed_form_k1(T: int, n: int, alpha: float, beta: float) -> float:
    """E Z(T, n) by averaging each path: every edge is visited once, so
    the expectation factorizes into C(T, n-1) (mu/nu)^(T-n+1) ((nu-mu)/nu)^(n-1)."""
    mu, nu = alpha, alpha + beta
    if not 1 <= n <= T + 1:
        return 0.0
    log_val = (
        gammaln(T + 1) - gammaln(n) - gammaln(T - n + 2)
        + (T - n + 1) * math.log(mu / nu)
        + (n - 1) * math.log((nu - mu) / nu)
    )
    return math.exp(log_val)


def _beta_edge_moment(alpha: float, beta: float, a: int, b: int) -> float:
    """E[B^a (1-B)^b] for B ~ Beta(alpha, beta), as an exact product."""
    nu = alpha + beta
    val = 1.0
    for i in range(a):
        val *= (alpha + i)
    for i in range(b):
        val *= (beta + i)
    for i in range(a + b):
        val /= (nu + i)
    return val


def _paths_to(T: int, n: int):
    """All height profiles of up-right paths from (0,1) to (T, n).

    A path is the tuple (y_1, ..., y_T) of heights after each step;
    step i uses the horizontal edge into (i, y_i) if y_i == y_{i-1},
    else the diagonal edge into (i, y_i).
    """
    from itertools import combinations

    diag_count = n - 1
    paths = []
    for diag_steps in combinations(range(T), diag_count):
        y, heights = 1, []
        dset = set(diag_steps)
        for i in range(T):
            if i in dset:
                y += 1
            heights.append(y)
        paths.append(tuple(heights))
    return paths


def beta_moment_oracle(T: int, targets, alpha: float, beta: float) -> float:
    """E prod_j Z(T, n_j) for k <= 2 by exhaustive path enumeration.

    Shared edges between the two paths are collected per site and each
    site contributes an exact joint Beta moment; sums are accumulated
    with compensated summation.
    """
    targets = list(targets)
    if T > 8:
        raise ValueError(f"oracle limited to T <= 8, got T={T}")
    if len(targets) not in (1, 2):
        raise ValueError("oracle supports k = 1 or 2")
    if any(not 1 <= n <= T + 1 for n in targets):
        return 0.0
    path_sets = [_paths_to(T, n) for n in targets]
    terms = []
    if len(targets) == 1:
        for p in path_sets[0]:
            val, prev = 1.0, 1
            for i, y in enumerate(p, start=1):
                if y == prev:
                    val *= _beta_edge_moment(alpha, beta, 1, 0)
                else:
                    val *= _beta_edge_moment(alpha, beta, 0, 1)
                prev = y
            terms.append(val)
        return math.fsum(terms)
    for p1 in path_sets[0]:
        for p2 in path_sets[1]:
            # per-site (a, b) exponents of B and (1 - B)
            usage = {}
            for p in (p1, p2):
                prev = 1
                for i, y in enumerate(p, start=1):
                    a, b = usage.get((i, y), (0, 0))
                    if y == prev:
                        usage[(i, y)] = (a + 1, b)
                    else:
                        usage[(i, y)] = (a, b + 1)
                    prev = y
            val = 1.0
            for (a, b) in usage.values():
                val *= _beta_edge_moment(alpha, beta, a, b)
            terms.append(val)
    return math.fsum(terms)


def _log_pochhammer(nu: float, k: int) -> float:
    return float(gammaln(nu + k) - gammaln(nu))


def _magnitude_saddle(q: float, mu: float, nu: float):
    """Radius minimizing the integrand magnitude on circles around 0.

    Stationary point of q*log((nu+r)/r) + log((mu+r)/(nu+r)) on r > 0;
    None when the magnitude is monotone decreasing (q >= (nu-mu)/nu), in
    which case the largest admissible circle is best.
    """
    denom = nu - mu - q * nu
    if denom <= 0.0:
        return None
    return q * nu * mu / denom


def default_beta_contours(T: int, targets, alpha: float, beta: float,
                          n_points: int = 512) -> list:
    """Nested circles around the origin adapted to the integrand.

    The inner circle sits at the magnitude saddle of the smallest target
    (or as far out as allowed when there is none), which keeps the
    trapezoid sum free of catastrophic cancellation; outer circles add
    the required +1 separation, all strictly inside |z| = nu.
    """
    targets = list(targets)
    k = len(targets)
    mu, nu = float(alpha), float(alpha + beta)
    # beyond (mu+nu)/2 the factor |(mu+z)/(nu+z)|^T exceeds 1 at the back
    # of the circle and its T-th power wrecks the trapezoid sum
    top = min(nu - max(0.1, 0.02 * nu), 0.5 * (mu + nu))
    lo = 0.25
    room = top - lo - (1.0 + POLE_CLEARANCE) * (k - 1)
    if room <= 0.0:
        raise ValueError(f"nu = {nu} leaves no room for {k} nested contours")
    sep = 1.0 + min(NESTING_MARGIN, 0.5 * room) if k > 1 else 0.0
    hi = top - sep * (k - 1)
    s = _magnitude_saddle(min(targets) / T, mu, nu)
    inner = hi if s is None else min(max(s, lo), hi)
    radii = [inner + sep * m for m in range(k)]
    return [CircleContour(0.0, r, n_points) for r in reversed(radii)]


def _validate_beta_contours(contours, nu: float):
    radii = [c.radius for c in contours]
    for c in contours:
        if c.center != 0.0:
            raise ValueError("circle contours must be centered at the origin")
        if c.radius <= POLE_CLEARANCE:
            raise ValueError(f"radius {c.radius} too close to the pole at 0")
        if c.radius >= nu - POLE_CLEARANCE:
            raise ValueError(f"radius {c.radius} too close to the pole at -nu={-nu}")
    for rA, rB in zip(radii, radii[1:]):
        if rA < rB + 1.0 + POLE_CLEARANCE:
            raise ValueError(
                f"nested contours violate the +1 separation: {rA} vs {rB} + 1"
            )


def beta_moment_contour(T: int, targets, alpha: float, beta: float,
                        contours=None, n_points: int = 512) -> MomentResult:
    """E prod_j Z(T, n_j) by the nested-contour integral representation.

    targets must be nonincreasing; the j-th contour (outermost first)
    carries the factor ((nu+z)/z)^n_j ((mu+z)/(nu+z))^T / (nu+z)^2 and
    pairs A < B contribute (z_A - z_B)/(z_A - z_B - 1).  The quadrature
    is the periodic trapezoid rule, exponentially accurate here.
    """
    targets = [int(n) for n in targets]
    k = len(targets)
    if k not in (1, 2):
        raise ValueError("contour evaluation supports k = 1 or 2")
    if any(n1 < n2 for n1, n2 in zip(targets, targets[1:])):
        raise ValueError(f"targets must be nonincreasing, got {targets}")
    mu, nu = float(alpha), float(alpha + beta)
    if contours is None:
        contours = default_beta_contours(T, targets, alpha, beta, n_points)
    _validate_beta_contours(contours, nu)

    def log_integrand(z, n):
        return (
            n * np.log((nu + z) / z)
            + T * np.log((mu + z) / (nu + z))
            - 2.0 * np.log(nu + z)
        )

    log_poch = _log_pochhammer(nu, k)
    if k == 1:
        z, unit = contours[0].nodes()
        L = log_integrand(z, targets[0])
        scale = float(np.max(L.real))
        reduced = contours[0].weight() * np.sum(np.exp(L - scale) * unit)
        total_log_scale = scale + log_poch
    else:
        zA, unitA = contours[0].nodes()
        zB, unitB = contours[1].nodes()
        diff = zA[:, None] - zB[None, :]
        if np.min(np.abs(diff - 1.0)) < POLE_CLEARANCE:
            raise ValueError("contours pass too close to the z_A = z_B + 1 pole")
        LA = log_integrand(zA, targets[0])
        LB = log_integrand(zB, targets[1])
        L = LA[:, None] + LB[None, :]
        scale = float(np.max(L.real))
        cross = diff / (diff - 1.0)
        reduced = (
            contours[0].weight()
            * contours[1].weight()
            * np.sum(np.exp(L - scale) * cross * unitA[:, None] * unitB[None, :])
        )
        total_log_scale = scale + log_poch

    re, im = float(reduced.real), float(reduced.imag)
    value = math.exp(total_log_scale) * re
    imag_residual = abs(im) / abs(re) if re != 0.0 else math.inf
    log_abs = total_log_scale + math.log(abs(re)) if re != 0.0 else -math.inf
    return MomentResult(value, log_abs, imag_residual,
                        n_points=contours[0].n_points,
                        details={"radii": [c.radius for c in contours]})


def she_moment_closed_form_k1(t: float, x: float, gamma: float) -> float:
    """First moment of the limit field: (gamma/(1-gamma)) * p_{gamma(1-gamma)}(t, x)."""
    return gamma / (1.0 - gamma) * heat_kernel(gamma * (1.0 - gamma), t, x)


def she_moment_contour(t: float, xs, gamma: float, offsets=None,
                       n_points: int = None, half_length: float = None) -> MomentResult:
    """E prod_j V(t, x_j) for the limit field, by vertical-line contours.

    xs must be nonincreasing and the line offsets r_j must satisfy
    r_j > r_{j+1} + 1.  Lines are truncated where the Gaussian factor
    falls below 1e-16 of its peak, then integrated by Gauss-Legendre.
    For k = 2 the node count has to beat the pair pole at z_1 - z_2 = 1,
    whose distance from the integration plane is r_1 - r_2 - 1; the
    default line gap of 2 keeps that distance at 1.
    """
    xs = [float(x) for x in xs]
    k = len(xs)
    if k not in (1, 2):
        raise ValueError("contour evaluation supports k = 1 or 2")
    if any(x1 < x2 for x1, x2 in zip(xs, xs[1:])):
        raise ValueError(f"x targets must be nonincreasing, got {xs}")
    if not 0.0 < gamma < 0.5:
        raise ValueError(f"gamma must lie in (0, 1/2), got {gamma}")
    if n_points is None:
        n_points = 200 if k == 1 else 800
    w = 1.0 - 2.0 * gamma
    A = w**4 * t / (8.0 * gamma * (1.0 - gamma))
    Bs = [-(w**2) * x / (2.0 * gamma * (1.0 - gamma)) for x in xs]
    required = math.sqrt(-math.log(1e-16) / A)
    if half_length is None:
        half_length = required
    elif half_length < required:
        raise ValueError(
            f"truncation {half_length:.3f} insufficient: Gaussian tail bound "
            f"needs at least {required:.3f}"
        )
    if offsets is None:
        offsets = [2.0 * (k - 1 - j) for j in range(k)]
    if len(offsets) != k or any(r1 <= r2 + 1.0 for r1, r2 in zip(offsets, offsets[1:])):
        raise ValueError(f"line offsets must satisfy r_j > r_(j+1) + 1, got {offsets}")

    contours = [VerticalContour(r, half_length, n_points) for r in offsets]
    pref_log = 2 * k * math.log(w) - k * math.log(2.0) - 2 * k * math.log(1.0 - gamma)

    if k == 1:
        z, wts = contours[0].nodes()
        g = np.exp(A * z**2 + Bs[0] * z)
        reduced = np.sum(wts * g) / (2.0 * math.pi)
    else:
        z1, w1 = contours[0].nodes()
        z2, w2 = contours[1].nodes()
        diff = z1[:, None] - z2[None, :]
        cross = diff / (diff - 1.0)
        g1 = np.exp(A * z1**2 + Bs[0] * z1)
        g2 = np.exp(A * z2**2 + Bs[1] * z2)
        reduced = np.sum(
            (w1[:, None] * w2[None, :]) * g1[:, None] * g2[None, :] * cross
        ) / (2.0 * math.pi) ** 2

    re, im = float(reduced.real), float(reduced.imag)
    value = math.exp(pref_log) * re
    imag_residual = abs(im) / abs(re) if re != 0.0 else math.inf
    log_abs = pref_log + math.log(abs(re)) if re != 0.0 else -math.inf
    return MomentResult(value, log_abs, imag_residual, n_points=n_points,
                        details={"offsets": list(offsets), "half_length": half_length})


def path_exponent(z: float, n: int, T: int, alpha: float) -> float:
    """Per-step exponent f(z) = log((a+z)/(2a+z)) + (n/T) log((2a+z)/z)
    whose saddle governs the rescaled-moment asymptotics (mu = a, nu = 2a)."""
    return math.log((alpha + z) / (2.0 * alpha + z)) + (n / T) * math.log(
        (2.0 * alpha + z) / z
    )


def _path_exponent_prime(z: float, n: int, T: int, alpha: float) -> float:
    q = n / T
    return 1.0 / (alpha + z) - 1.0 / (2.0 * alpha + z) + q * (1.0 / (2.0 * alpha + z) - 1.0 / z)


@dataclass(frozen=True)
class CriticalPoint:
    z0_asymptotic: float
    z0_numeric: float
    fprime_residual: float
    T: int
    n: int


def critical_point(gamma: float, eps: float, t: float, x: float) -> CriticalPoint:
    """Saddle of the per-step exponent at the rescaled endpoint.

    z0_asymptotic = 2*gamma / ((1-2*gamma)*eps); the numeric saddle is
    found by bracketed bisection of f' on (0, 4*z0_asymptotic).
    """
    if not 0.0 < gamma < 0.5:
        raise ValueError(f"gamma must lie in (0, 1/2), got {gamma}")
    if eps > 0.2:
        raise ValueError(f"saddle analysis expects eps <= 0.2, got {eps}")
    alpha = 1.0 / eps
    frame = ScalingFrame(eps, 1.0 - 2.0 * gamma)
    T, n, _ = polymer_target_index(frame, t, x)
    z0_asym = 2.0 * gamma / ((1.0 - 2.0 * gamma) * eps)
    lo, hi = 1e-12 * z0_asym, 4.0 * z0_asym
    flo, fhi = _path_exponent_prime(lo, n, T, alpha), _path_exponent_prime(hi, n, T, alpha)
    if not flo < 0.0 < fhi:
        raise RuntimeError(
            f"no sign change on the bracket (0, {hi:.3f}): f'={flo:.3e}, {fhi:.3e}"
        )
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if _path_exponent_prime(mid, n, T, alpha) < 0.0:
            lo = mid
        else:
            hi = mid
    z0 = 0.5 * (lo + hi)
    return CriticalPoint(z0_asym, z0, abs(_path_exponent_prime(z0, n, T, alpha)), T, n)


def taylor_quadratic_coefficient(gamma: float, eps: float) -> float:
    """Coefficient of ztilde^2 in the saddle expansion of the exponent."""
    w = 1.0 - 2.0 * gamma
    return w**4 * eps**2 / (8.0 * gamma * (1.0 - gamma))


def taylor_check(gamma: float, eps: float, t: float, x: float, z_grid) -> float:
    """Max deviation of the exponent from its second-order saddle expansion.

    The expansion around z0 = 2*gamma/((1-2*gamma)*eps) is
    -rate(v) + 2*rate'(v)*eps*x_eps/t_eps + quad*zt^2 - lin*x_eps*zt
    with v = 1-2*gamma and the endpoint snapped as in the rescaled
    partition function.  The grid must satisfy |zt| <= 1/(10*eps).
    """
    z_grid = np.asarray(list(z_grid), dtype=float)
    if np.any(np.abs(z_grid) > 0.1 / eps):
        raise ValueError("grid exceeds |ztilde| <= 1/(10*eps)")
    alpha = 1.0 / eps
    w = 1.0 - 2.0 * gamma
    frame = ScalingFrame(eps, w)
    T, n, _ = polymer_target_index(frame, t, x)
    t_eps = T * eps * eps
    x_eps = (n - gamma * T) * eps  # path-frame offset, = x up to one cell
    rate, slope = rate_pair(w)
    z0 = 2.0 * gamma / (w * eps)
    quad = taylor_quadratic_coefficient(gamma, eps)
    lin = w**2 * eps**2 / (2.0 * gamma * (1.0 - gamma) * t_eps)
    worst = 0.0
    for zt in z_grid:
        f = path_exponent(z0 + zt, n, T, alpha)
        model = -rate + 2.0 * slope * eps * x_eps / t_eps + quad * zt * zt - lin * x_eps * zt
        worst = max(worst, abs(f - model))
    return worst


def moment_convergence_table(gamma: float, t: float, xs, k: int, eps_list,
                             n_points: int = None):
    """Rescaled Beta-model moments against the limit-field moment, per eps.

    Row fields: epsilon, k, rescaled_beta_moment, she_moment, ratio.  The
    circle radius follows the saddle (inner radius z0, outer z0 + 1.5) to
    keep the integrand concentrated near the critical point, which
    restricts the table to gamma < 1/3 where z0 < nu.  Each row's limit
    moment is evaluated at the row's snapped offsets, so the ratio
    isolates the genuine mesh error from the sub-cell target offset.
    """
    xs = sorted([float(x) for x in xs], reverse=True)
    if k != len(xs):
        raise ValueError(f"k={k} but {len(xs)} targets given")
    if not 0.0 < gamma < 1.0 / 3.0:
        raise ValueError(f"saddle-radius contours need gamma < 1/3, got {gamma}")
    if k == 2 and any(eps < 0.05 for eps in eps_list):
        raise ValueError("pair moments need eps >= 0.05 (nested quadrature conditioning)")
    rows = []
    for eps in eps_list:
        alpha = 1.0 / eps
        w = 1.0 - 2.0 * gamma
        frame = ScalingFrame(eps, w)
        rate, slope = rate_pair(w)
        targets, snapped_xs, log_rescale, T = [], [], 0.0, None
        for x in xs:
            T, n, x_r = polymer_target_index(frame, t, x)
            targets.append(n)
            snapped_xs.append((n - gamma * T) * eps)
            log_rescale += -math.log(eps) + T * rate + x_r * slope
        z0 = 2.0 * gamma / (w * eps)
        npts = n_points or (4096 if k == 1 else 1024)
        radii = [z0 + (1.0 + NESTING_MARGIN) * m for m in range(k)]
        contours = [CircleContour(0.0, r, npts) for r in reversed(radii)]
        bm = beta_moment_contour(T, sorted(targets, reverse=True), alpha, alpha,
                                 contours=contours)
        she = she_moment_contour(t, sorted(snapped_xs, reverse=True), gamma)
        ratio = math.exp(log_rescale + bm.log_abs - she.log_abs)
        rows.append({
            "epsilon": eps,
            "k": k,
            "rescaled_beta_moment": math.exp(log_rescale + bm.log_abs),
            "she_moment": she.value,
            "ratio": ratio if bm.value > 0 else -ratio,
        })
    return rows
