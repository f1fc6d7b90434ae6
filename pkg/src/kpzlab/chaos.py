"""Multilinear expansion of the quenched transition probability in the
disorder variables.

The probability of reaching (N, y) expands exactly into a degree-ordered
series: the degree-0 term is the free-walk probability, and each degree-k
term is a sum over k-tuples of sites (strictly increasing in time) of a
deterministic coefficient times the product of the disorder values there.
Coefficients are products of free-walk point probabilities and
probability differences ("brackets"), so they carry signs; they are
assembled as (log magnitude, sign) pairs because in the rescaled regime
the individual factors are exponentially small.
"""

import math
from dataclasses import dataclass
from itertools import combinations, product

import numpy as np

from .environment import Environment
from .scaling import LatticePoint, ScalingFrame, snap
from .ssrw import NEG_INF, heat_kernel, rate_pair, ssrw_log_prob
from .rwre import evolve_rwre


@dataclass(frozen=True)
class ChaosTerm:
    """One expansion monomial: a site tuple and its coefficient.

    Sites are strictly increasing in time, all before the target time.
    """

    degree: int
    points: tuple
    coefficient: float

    def __post_init__(self):
        times = [p.i for p in self.points]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("site times must be strictly increasing")
        if len(self.points) != self.degree:
            raise ValueError("degree must match the number of sites")
        if not math.isfinite(self.coefficient):
            raise ValueError("coefficient must be finite")


def _signed_log_bracket(m: int, d: int):
    """(log|b|, sign) of b = P(S_m = d-1) - P(S_m = d+1)."""
    la = ssrw_log_prob(m, d - 1)
    lb = ssrw_log_prob(m, d + 1)
    if la == NEG_INF and lb == NEG_INF:
        return NEG_INF, 1.0
    if lb == NEG_INF:
        return la, 1.0
    if la == NEG_INF:
        return lb, -1.0
    if la == lb:
        return NEG_INF, 1.0
    hi, lo, sign = (la, lb, 1.0) if la > lb else (lb, la, -1.0)
    return hi + math.log1p(-math.exp(lo - hi)), sign


def chaos_coefficient(N: int, y: int, points) -> float:
    """Expansion coefficient for the site tuple `points` at target (N, y).

    points is a sequence of (i, j) with 0 <= i_1 < ... < i_k <= N-1.
    The value is 2^-k times the free-walk probability of the first point
    times one bracket per consecutive gap, the last bracket ending at
    (N, y).
    """
    points = list(points)
    k = len(points)
    times = [i for i, _ in points]
    if any(t2 <= t1 for t1, t2 in zip(times, times[1:])) or (points and not 0 <= times[0]):
        raise ValueError("point times must satisfy 0 <= i_1 < ... < i_k")
    if points and times[-1] > N - 1:
        raise ValueError(f"last point time {times[-1]} exceeds N-1 = {N - 1}")
    if k == 0:
        return math.exp(ssrw_log_prob(N, y))
    log_mag = -k * math.log(2.0) + ssrw_log_prob(points[0][0], points[0][1])
    sign = 1.0
    hops = list(zip(points, points[1:] + [(N, y)]))
    for (i1, j1), (i2, j2) in hops:
        lb, s = _signed_log_bracket(i2 - i1 - 1, j2 - j1)
        log_mag += lb
        sign *= s
    if log_mag == NEG_INF:
        return 0.0
    return sign * math.exp(log_mag)


def chaos_terms(N: int, y: int, degree: int):
    """All degree-`degree` expansion terms at target (N, y) with nonzero
    coefficient, pruned to the cone reachable from the origin and from
    which the target is reachable.  Exponential in N; meant for small
    lattices (the cross-validation tests use N <= 6).
    """
    if degree < 1:
        raise ValueError("degree must be >= 1")
    sites_by_time = [
        [j for j in range(-i, i + 1, 2) if abs(y - j) <= N - i] for i in range(N)
    ]
    for times in combinations(range(N), degree):
        for js in product(*(sites_by_time[i] for i in times)):
            pts = list(zip(times, js))
            coeff = chaos_coefficient(N, y, pts)
            if coeff != 0.0:
                yield ChaosTerm(degree, tuple(LatticePoint(i, j) for i, j in pts), coeff)


@dataclass(frozen=True)
class PolyExpansion:
    """Degree-aggregated expansion of a transition probability.

    coeffs[d] is the total degree-d coefficient, i.e. the sum over
    degree-d site tuples of the coefficient times the disorder product.
    Evaluating the polynomial at eta = sqrt(eps) reproduces the quenched
    probability exactly.
    """

    n_steps: int
    target: int
    coeffs: np.ndarray

    def value_at(self, eta: float) -> float:
        # Horner, highest degree first
        acc = 0.0
        for c in self.coeffs[::-1]:
            acc = acc * eta + c
        return float(acc)


def chaos_poly_dp(env: Environment, N: int, y: int, max_degree=None) -> PolyExpansion:
    """Degree coefficients at (N, y) by dynamic programming over the ring
    of polynomials in the disorder-strength parameter.

    Each site update multiplies by (1 +- eta * omega)/2 truncated at
    max_degree (default N, which is exact).  Memory grows like
    N^2 * max_degree; N <= 24 keeps this trivial.
    """
    if N > 24:
        raise ValueError(f"polynomial-ring DP limited to N <= 24, got {N}")
    if N > env.n_max:
        raise ValueError(f"N={N} exceeds the environment bound n_max={env.n_max}")
    D = (N if max_degree is None else max_degree) + 1
    # rows indexed [site, degree]
    row = np.zeros((1, D))
    row[0, 0] = 1.0
    for n in range(N):
        sites = -n + 2 * np.arange(n + 1)
        w = np.asarray(env.omega(np.full(n + 1, n), sites), dtype=float)
        nxt = np.zeros((n + 2, D))
        half = 0.5 * row
        shifted = 0.5 * w[:, None] * row[:, :-1]
        nxt[1:] += half
        nxt[1:, 1:] += shifted
        nxt[:-1] += half
        nxt[:-1, 1:] -= shifted
        row = nxt
    idx = (y + N) // 2
    if (y + N) % 2 != 0 or not 0 <= idx <= N:
        raise ValueError(f"target {y} unreachable at time {N}")
    return PolyExpansion(N, y, row[idx].copy())


def chaos_identity_residual(env: Environment, N: int, y: int) -> float:
    """|quenched DP probability - full expansion sum| at (N, y).

    The expansion side enumerates every site tuple in the reachable cone
    by depth-first search, accumulating sqrt(eps)^k * coefficient *
    disorder products.  Exponential in N; N <= 8 keeps it fast.
    """
    if N > 8:
        raise ValueError(f"tuple enumeration limited to N <= 8, got {N}")
    if (y + N) % 2 != 0 or abs(y) > N:
        raise ValueError(f"target {y} unreachable at time {N}")
    eps = env.spec.epsilon

    # free-walk probabilities P[m][d] and brackets up front
    P = [[math.exp(ssrw_log_prob(m, d)) for d in range(-N, N + 1)] for m in range(N + 1)]

    def prob(m, d):
        return P[m][d + N] if abs(d) <= N else 0.0

    def bracket(m, d):
        return prob(m, d - 1) - prob(m, d + 1)

    omega = {}
    for i in range(N):
        js = list(range(-i, i + 1, 2))
        vals = np.atleast_1d(np.asarray(env.omega(np.full(len(js), i), np.array(js)), dtype=float))
        for j, w in zip(js, vals):
            omega[(i, j)] = float(w)

    half_sqrt_eps = 0.5 * math.sqrt(eps)
    total = prob(N, y)  # degree-0 term

    def extend(i_prev, j_prev, partial):
        nonlocal total
        for i in range(i_prev + 1, N):
            span_prev = i - i_prev
            span_next = N - i
            lo = max(-i, j_prev - span_prev, y - span_next)
            hi = min(i, j_prev + span_prev, y + span_next)
            j = lo if (lo + i) % 2 == 0 else lo + 1
            while j <= hi:
                w = partial * bracket(span_prev - 1, j - j_prev) * omega[(i, j)] * half_sqrt_eps
                if w != 0.0:
                    total += w * bracket(N - i - 1, y - j)
                    extend(i, j, w)
                j += 2

    for i1 in range(N):
        lo = max(-i1, y - (N - i1))
        hi = min(i1, y + (N - i1))
        j1 = lo if (lo + i1) % 2 == 0 else lo + 1
        while j1 <= hi:
            w = prob(i1, j1) * omega[(i1, j1)] * half_sqrt_eps
            if w != 0.0:
                total += w * bracket(N - i1 - 1, y - j1)
                extend(i1, j1, w)
            j1 += 2

    dp_row = evolve_rwre(env, N)
    return abs(dp_row.prob(y) - total)


def _rescaled_link_log(frame: ScalingFrame, di: int, dj: int, m1: int, m2: int) -> float:
    """log of (1/eps) * exp(di * rate + (dj - v*di) * rate') * P(S_{di+m1} = dj+m2)."""
    lp = ssrw_log_prob(di + m1, dj + m2)
    if lp == NEG_INF:
        return NEG_INF
    rate, slope = rate_pair(frame.v)
    return -math.log(frame.epsilon) + di * rate + (dj - frame.v * di) * slope + lp


def _rescaled_bracket(frame: ScalingFrame, di: int, dj: int):
    """(log|.|, sign) of the rescaled bracket over one time gap."""
    la = _rescaled_link_log(frame, di, dj, -1, -1)
    lb = _rescaled_link_log(frame, di, dj, -1, 1)
    if la == NEG_INF and lb == NEG_INF:
        return NEG_INF, 1.0
    if lb == NEG_INF:
        return la, 1.0
    if la == NEG_INF:
        return lb, -1.0
    if la == lb:
        return NEG_INF, 1.0
    hi, lo, sign = (la, lb, 1.0) if la > lb else (lb, la, -1.0)
    return hi + math.log1p(-math.exp(lo - hi)), sign


def rescaled_chaos_coefficient(frame: ScalingFrame, points, t: float, x: float) -> float:
    """Recentered expansion coefficient at continuum points.

    points is a sequence of (t_l, x_l) with 0 < t_1 < ... < t_k < t; the
    value is eps^-(1+k) * exp((t_eps/eps^2)*rate + (x_eps/eps)*rate') *
    psi evaluated at the snapped sites.  If two snapped times coincide
    (or a point lands on the endpoint time) the value is zero by
    convention.
    """
    points = list(points)
    times = [tl for tl, _ in points] + [t]
    if any(t2 <= t1 for t1, t2 in zip(times, times[1:])) or (points and points[0][0] <= 0.0):
        raise ValueError("need 0 < t_1 < ... < t_k < t")
    k = len(points)
    snapped = [snap(frame, tl, xl).point for tl, xl in points + [(t, x)]]
    idx = [p.i for p in snapped]
    if any(i2 <= i1 for i1, i2 in zip(idx, idx[1:])):
        return 0.0

    log_mag = -k * math.log(2.0)
    sign = 1.0
    # first hop carries a plain point probability from the origin
    i1, j1 = snapped[0].i, snapped[0].j
    first = _rescaled_link_log(frame, i1, j1, 0, 0)
    if first == NEG_INF:
        return 0.0
    log_mag += first
    for (a, b) in zip(snapped, snapped[1:]):
        lb, s = _rescaled_bracket(frame, b.i - a.i, b.j - a.j)
        if lb == NEG_INF:
            return 0.0
        log_mag += lb
        sign *= s
    return sign * math.exp(log_mag)


def chaos_coefficient_limit(v: float, points, t: float, x: float) -> float:
    """Small-mesh limit of the rescaled coefficient: 2 * (2v)^k times the
    product of heat kernels along the chain (0,0) -> points -> (t, x)."""
    points = list(points)
    times = [tl for tl, _ in points] + [t]
    if any(t2 <= t1 for t1, t2 in zip(times, times[1:])) or (points and points[0][0] <= 0.0):
        raise ValueError("need 0 < t_1 < ... < t_k < t")
    k = len(points)
    chain = [(0.0, 0.0)] + points + [(t, x)]
    prod = 2.0 * (2.0 * v) ** k
    for (t1, x1), (t2, x2) in zip(chain, chain[1:]):
        prod *= heat_kernel(1.0 - v * v, t2 - t1, x2 - x1)
    return prod
