"""Exact simple-symmetric-random-walk probabilities and their sharp
large-deviation asymptotics.

Probabilities are kept in the log domain throughout: at drift v the walk
reaches site v*n with probability about exp(-n * rate(v)), far below
float underflow at the lattice sizes used here.  log(0) is represented
by -inf.
"""

import math
from dataclasses import dataclass

import mpmath
import numpy as np
from scipy.special import gammaln

from .scaling import ScalingFrame, snap

NEG_INF = float("-inf")

# Above this walk length the binomial log-probability is evaluated with
# high-precision log-gamma: the double-precision difference
# lgamma(n+1) - lgamma(k+1) - lgamma(n-k+1) carries an absolute error of
# order 1e-16 * lgamma(n), which past n ~ 1e2 can exceed 1e-13 of the
# (much smaller) result.
_LGAMMA_CUTOFF = 128

#: the three index shifts entering the expansion-coefficient brackets
STANDARD_SHIFTS = ((0, 0), (-1, -1), (-1, 1))

#: candidate constants for the uniform-bound fit, smallest first
BOUND_LADDER = (1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0)


def ssrw_log_prob(n: int, m: int) -> float:
    """log P(S_n = m) for the simple symmetric walk started at 0.

    Returns -inf when the site is unreachable (|m| > n or n + m odd).
    Computed from log-gamma; relative error stays below 1e-13 up to
    n = 1e6 (extended precision takes over past the cutoff where the
    double-precision log-gamma difference starts to cancel).
    """
    if n < 0 or abs(m) > n or (n + m) % 2 != 0:
        return NEG_INF
    k = (n + m) // 2
    if n <= _LGAMMA_CUTOFF:
        return float(gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)
                     - n * math.log(2.0))
    with mpmath.workdps(30):
        val = (mpmath.loggamma(n + 1) - mpmath.loggamma(k + 1)
               - mpmath.loggamma(n - k + 1) - n * mpmath.log(2))
        return float(val)


def ssrw_log_prob_row(n: int) -> np.ndarray:
    """log P(S_n = j) for all reachable j = -n, -n+2, ..., n at once."""
    k = np.arange(n + 1)
    return gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1) - n * math.log(2.0)


def rate_pair(v: float):
    """Large-deviation rate of the walk speed and its derivative.

    rate(v) = (1-v)/2 * log(1-v) + (1+v)/2 * log(1+v), the Legendre
    transform of the step cumulant; rate'(v) = arctanh(v).
    """
    if not abs(v) < 1.0:
        raise ValueError(f"speed must satisfy |v| < 1, got {v}")
    rate = 0.5 * ((1.0 - v) * math.log1p(-v) + (1.0 + v) * math.log1p(v))
    slope = 0.5 * (math.log1p(v) - math.log1p(-v))
    return rate, slope


def heat_kernel(sigma2: float, t: float, x: float) -> float:
    """Density of N(0, sigma2 * t) at x."""
    if not sigma2 > 0.0:
        raise ValueError(f"sigma2 must be positive, got {sigma2}")
    if not t > 0.0:
        raise ValueError(f"t must be positive, got {t}")
    return math.exp(-x * x / (2.0 * sigma2 * t)) / math.sqrt(2.0 * math.pi * sigma2 * t)


def speed_divergence(k: float, v: float) -> float:
    """Scaled KL divergence between step laws at drifts k and v.

    Equals 2 * KL(Bernoulli((1+k)/2) || Bernoulli((1+v)/2)); vanishes at
    k = v, is strictly convex with second derivative 2 / (1 - k^2).
    """
    if not abs(k) < 1.0:
        raise ValueError(f"|k| must be < 1, got {k}")
    return (1.0 + k) * (math.log1p(k) - math.log1p(v)) + (1.0 - k) * (
        math.log1p(-k) - math.log1p(-v)
    )


@dataclass(frozen=True)
class LdpQuery:
    """Arguments of the rescaled point probability with index shifts.

    The shifts (m1, m2) displace the number of steps and the target site;
    only values in {-1, 0, 1} with m1 - m2 even preserve lattice parity.
    """

    frame: ScalingFrame
    t: float
    x: float
    m1: int = 0
    m2: int = 0

    def __post_init__(self):
        if self.m1 not in (-1, 0, 1) or self.m2 not in (-1, 0, 1):
            raise ValueError(f"shifts must lie in {{-1,0,1}}, got ({self.m1},{self.m2})")
        if (self.m1 - self.m2) % 2 != 0:
            raise ValueError(f"m1 - m2 must be even, got ({self.m1},{self.m2})")
        if not self.t > 0.0:
            raise ValueError(f"t must be positive, got {self.t}")


def rescaled_ssrw_log(q: LdpQuery) -> float:
    """Log of the exponentially recentered point probability.

    Snaps (t, x), then returns
    -log(eps) + i * rate(v) + (j - v*i) * rate'(v) + log P(S_{i+m1} = j+m2),
    assembled entirely in the log domain.
    """
    frame = q.frame
    sp = snap(frame, q.t, q.x)
    i, j = sp.point.i, sp.point.j
    lp = ssrw_log_prob(i + q.m1, j + q.m2)
    if lp == NEG_INF:
        return NEG_INF
    rate, slope = rate_pair(frame.v)
    return -math.log(frame.epsilon) + i * rate + (j - frame.v * i) * slope + lp


def rescaled_ssrw(q: LdpQuery) -> float:
    """Rescaled point probability; converges to ldp_limit as eps -> 0."""
    return math.exp(rescaled_ssrw_log(q))


def ldp_limit(v: float, t: float, x: float, m1: int = 0, m2: int = 0) -> float:
    """Limit of the rescaled point probability at fixed (t, x) and shifts.

    2 * p_{1-v^2}(t, x) / ((1+v)^((m1+m2)/2) * (1-v)^((m1-m2)/2)).
    """
    if not abs(v) < 1.0:
        raise ValueError(f"|v| must be < 1, got {v}")
    if not t > 0.0:
        raise ValueError(f"t must be positive, got {t}")
    num = 2.0 * heat_kernel(1.0 - v * v, t, x)
    return num / ((1.0 + v) ** ((m1 + m2) // 2) * (1.0 - v) ** ((m1 - m2) // 2))


def _bound_rhs(C: float, t: float, x: float, eps: float) -> float:
    """Right-hand side of the two-regime uniform envelope for constant C."""
    if t <= 100.0 * eps * eps:
        return C / eps if abs(x) <= C * eps else 0.0
    return C * math.exp(-x * x / (C * t)) / math.sqrt(t)


def uniform_bound_fit(v: float, samples, shifts=STANDARD_SHIFTS):
    """Smallest ladder constant C making the uniform envelope hold.

    samples is an iterable of (t, x, eps) with t > 0.  Every sample is
    checked against the envelope for each index shift; returns None when
    even C = 100 fails somewhere.
    """
    samples = list(samples)
    for t, x, eps in samples:
        if not t > 0.0:
            raise ValueError(f"samples require t > 0, got t={t}")
    for C in BOUND_LADDER:
        ok = True
        for t, x, eps in samples:
            frame = ScalingFrame(eps, v)
            for m1, m2 in shifts:
                lhs = rescaled_ssrw(LdpQuery(frame, t, x, m1, m2))
                if lhs > _bound_rhs(C, t, x, eps) * (1.0 + 1e-12):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return C
    return None
