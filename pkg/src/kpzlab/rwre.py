"""Dynamic programming for nearest-neighbor walks in a random medium and
for the edge-weighted directed-path model obtained from them by time
reversal.

The walk recursion runs over the full reachable cone, in the log domain
with -inf for zero weights: in the large-deviation window probabilities
are of order exp(-n * rate(v)) and would underflow long before the mesh
sizes of interest.  A batch axis evolves many independent disorder
replicas at once; per-site weights come from the counter-based field, so
results are independent of batching and worker count.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .environment import Environment, EnvironmentSpec, omega_values
from .scaling import ScalingFrame, snap
from .ssrw import rate_pair

NEG_INF = float("-inf")


@dataclass(frozen=True)
class LogProbRow:
    """One time slice of a probability or partition vector, in log domain.

    Sites are site0 + step * k for k = 0 .. len(log_values) - 1.  Walk
    rows use (site0, step) = (-n, 2); directed-path rows use (1, 1).
    """

    n: int
    log_values: np.ndarray
    site0: int
    step: int

    def sites(self) -> np.ndarray:
        return self.site0 + self.step * np.arange(len(self.log_values))

    def log_prob(self, j: int) -> float:
        k, r = divmod(j - self.site0, self.step)
        if r != 0 or k < 0 or k >= len(self.log_values):
            return NEG_INF
        return float(self.log_values[k])

    def prob(self, j: int) -> float:
        return math.exp(self.log_prob(j))

    def log_mass(self) -> float:
        """Log of the row total (0 for a conserved probability row)."""
        m = float(np.max(self.log_values))
        if m == NEG_INF:
            return NEG_INF
        return m + math.log(np.sum(np.exp(self.log_values - m)))


class RescaledValue(NamedTuple):
    """A rescaled observable and its logarithm (the interface height)."""

    value: float
    log_value: float


def _log_jump_weights(spec: EnvironmentSpec, n: int, sites: np.ndarray, seeds):
    """log of (1 + s*omega)/2 and (1 - s*omega)/2 at row-n sites.

    seeds may be a scalar or an array of replica seeds; the returned
    arrays broadcast as (n_replicas, n_sites).
    """
    s = math.sqrt(spec.epsilon)
    seeds = np.atleast_1d(np.asarray(seeds, dtype=np.uint64))
    w = omega_values(spec, n, sites[None, :], seed=seeds[:, None])
    sw = s * np.asarray(w, dtype=float)
    if np.any(np.abs(sw) > 1.0):
        raise ValueError("jump probability outside [0,1]: |sqrt(eps)*omega| > 1")
    with np.errstate(divide="ignore"):
        lw_up = np.log1p(sw) - math.log(2.0)
        lw_down = np.log1p(-sw) - math.log(2.0)
    return lw_up, lw_down


def _evolve_walk_batch(spec: EnvironmentSpec, seeds, N: int) -> np.ndarray:
    """Final log-probability rows, shape (n_replicas, N+1)."""
    seeds = np.atleast_1d(np.asarray(seeds, dtype=np.uint64))
    row = np.zeros((len(seeds), 1))
    for n in range(N):
        sites = -n + 2 * np.arange(n + 1)
        lw_up, lw_down = _log_jump_weights(spec, n, sites, seeds)
        nxt = np.full((len(seeds), n + 2), NEG_INF)
        nxt[:, 1:] = row + lw_up
        np.logaddexp(nxt[:, :-1], row + lw_down, out=nxt[:, :-1])
        row = nxt
    return row


def evolve_rwre(env: Environment, N: int) -> LogProbRow:
    """Walk transition probabilities P(S_N = .) in the given medium."""
    if N > env.n_max:
        raise ValueError(f"N={N} exceeds the environment bound n_max={env.n_max}")
    row = _evolve_walk_batch(env.spec, env.spec.seed, N)[0]
    return LogProbRow(N, row, -N, 2)


def rescaled_rwre(env: Environment, frame: ScalingFrame, t: float, x: float) -> RescaledValue:
    """Exponentially recentered transition probability at the cell of (t, x).

    The log of the returned value is the height field whose limit is the
    narrow-wedge KPZ interface.
    """
    values, logs = rescaled_rwre_batch(env.spec, [env.spec.seed], frame, t, x)
    return RescaledValue(float(values[0]), float(logs[0]))


def rescaled_rwre_batch(spec: EnvironmentSpec, seeds, frame: ScalingFrame, t: float, x: float):
    """rescaled_rwre over many disorder replicas at once.

    Returns (values, log_values) arrays, one entry per seed; bit-identical
    to evolving each seed separately.
    """
    if spec.epsilon != frame.epsilon:
        raise ValueError("environment and frame disagree on epsilon")
    if not t > 0.0:
        raise ValueError(f"t must be positive, got {t}")
    sp = snap(frame, t, x)
    i, j = sp.point.i, sp.point.j
    if abs(j) > i:
        raise ValueError(f"target site {sp.point} is not reachable")
    rows = _evolve_walk_batch(spec, seeds, i)
    lp = rows[:, (j + i) // 2]
    rate, slope = rate_pair(frame.v)
    logs = -math.log(frame.epsilon) + i * rate + (j - frame.v * i) * slope + lp
    return np.exp(logs), logs


def _evolve_polymer_batch(spec: EnvironmentSpec, seeds, N: int) -> np.ndarray:
    """Final log partition rows over x = 1..N+1, shape (n_replicas, N+1).

    Edge weights are B = (1 + sqrt(eps) * omega)/2 into the destination
    site, so each row sums to one exactly in expectation and pathwise.
    """
    seeds = np.atleast_1d(np.asarray(seeds, dtype=np.uint64))
    row = np.zeros((len(seeds), 1))  # Z(0, x) = 1{x == 1}
    for n in range(1, N + 1):
        sites = 1 + np.arange(n + 1)
        lw_B, lw_1mB = _log_jump_weights(spec, n, sites, seeds)
        nxt = np.full((len(seeds), n + 1), NEG_INF)
        nxt[:, :-1] = row + lw_B[:, :-1]  # horizontal edge into (n, x)
        np.logaddexp(nxt[:, 1:], row + lw_1mB[:, 1:], out=nxt[:, 1:])
        row = nxt
    return row


def polymer_evolve(env: Environment, N: int) -> LogProbRow:
    """Point-to-point partition function Z(N, x) for x = 1..N+1, log domain."""
    if N > env.n_max:
        raise ValueError(f"N={N} exceeds the environment bound n_max={env.n_max}")
    row = _evolve_polymer_batch(env.spec, env.spec.seed, N)[0]
    return LogProbRow(N, row, 1, 1)


def polymer_target_index(frame: ScalingFrame, t: float, x: float):
    """Lattice indices (T, n) of the rescaled path endpoint near (t, x).

    The endpoint is located by snapping (t, -2x) in the frame of the
    time-reversed walk; the path index n = (i - j)/2 is then an integer
    and the walk site it corresponds to is j + 2.  Returns
    (T, n, x_r) where x_r = j - v*i is the walk-frame offset whose
    rescaled coordinate is -2 times the path one.
    """
    sp = snap(frame, t, -2.0 * x)
    i, j = sp.point.i, sp.point.j
    return i, (i - j) // 2, float(j - frame.v * i)


def rescaled_polymer(env: Environment, gamma: float, t: float, x: float) -> RescaledValue:
    """Rescaled partition function of the directed-path model.

    Drift v = 1 - 2*gamma fixes the rescaling frame; the prefactor is
    (1/eps) * exp((t_eps/eps^2) * rate(v) - (2*x_eps/eps) * rate'(v)).
    """
    if not 0.0 < gamma < 0.5:
        raise ValueError(f"gamma must lie in (0, 1/2), got {gamma}")
    if not t > 0.0:
        raise ValueError(f"t must be positive, got {t}")
    eps = env.spec.epsilon
    frame = ScalingFrame(eps, 1.0 - 2.0 * gamma)
    T, n, x_r = polymer_target_index(frame, t, x)
    row = polymer_evolve(env, T)
    rate, slope = rate_pair(frame.v)
    log_value = -math.log(eps) + T * rate + x_r * slope + row.log_prob(n)
    return RescaledValue(math.exp(log_value), log_value)


def _enumerate_signs(n_bits: int) -> np.ndarray:
    """All sign patterns in {-1,+1}^n_bits, shape (2^n_bits, n_bits)."""
    idx = np.arange(1 << n_bits, dtype=np.uint64)
    bits = (idx[:, None] >> np.arange(n_bits, dtype=np.uint64)[None, :]) & np.uint64(1)
    return 2.0 * bits.astype(float) - 1.0


def _cluster_distribution(values: np.ndarray, tol: float):
    """Collapse a multiset of floats into (representatives, probabilities)."""
    v = np.sort(values)
    breaks = np.flatnonzero(np.diff(v) > tol)
    groups = np.split(v, breaks + 1)
    reps = np.array([g[0] for g in groups])
    probs = np.array([len(g) / len(v) for g in groups])
    return reps, probs


def time_reversal_law_check(N: int, epsilon: float = 0.25, tol: float = 1e-12) -> bool:
    """Exhaustively verify the equality in law between Z(N, x) and the
    walk probability at the reversed site.

    Enumerates every two-point disorder configuration on each side (the
    sides use different site sets, so the laws are compared after
    normalizing by the number of configurations).  N <= 4 keeps the
    enumeration below 2^14 configurations.
    """
    if N > 4:
        raise ValueError(f"exhaustive check limited to N <= 4, got {N}")
    s = math.sqrt(epsilon)

    # partition-function side: sites (n, x), n = 1..N, x = 1..n+1
    z_sites = [(n, xx) for n in range(1, N + 1) for xx in range(1, n + 2)]
    signs = _enumerate_signs(len(z_sites))
    B = 0.5 * (1.0 + s * signs)  # column k holds B at z_sites[k]
    col = {site: k for k, site in enumerate(z_sites)}
    Z = np.zeros((len(signs), 1))
    Z[:, 0] = 1.0
    for n in range(1, N + 1):
        nxt = np.zeros((len(signs), n + 1))
        for xx in range(1, n + 2):
            b = B[:, col[(n, xx)]]
            stay = Z[:, xx - 1] * b if xx - 1 < Z.shape[1] else 0.0
            diag = Z[:, xx - 2] * (1.0 - b) if xx - 2 >= 0 else 0.0
            nxt[:, xx - 1] = stay + diag
        Z = nxt

    # walk side: sites (n, j), n = 0..N-1, |j| <= n, parity of n
    w_sites = [(n, j) for n in range(N) for j in range(-n, n + 1, 2)]
    wsigns = _enumerate_signs(len(w_sites))
    wcol = {site: k for k, site in enumerate(w_sites)}
    P = np.zeros((len(wsigns), 1))
    P[:, 0] = 1.0
    for n in range(N):
        nxt = np.zeros((len(wsigns), n + 2))
        for k, j in enumerate(range(-n, n + 1, 2)):
            w = wsigns[:, wcol[(n, j)]]
            up = 0.5 * (1.0 + s * w)
            nxt[:, k + 1] += P[:, k] * up
            nxt[:, k] += P[:, k] * (1.0 - up)
        P = nxt

    for xx in range(1, N + 2):
        y = N - 2 * xx + 2
        reps_z, probs_z = _cluster_distribution(Z[:, xx - 1], tol)
        reps_p, probs_p = _cluster_distribution(P[:, (y + N) // 2], tol)
        if len(reps_z) != len(reps_p):
            return False
        if np.max(np.abs(reps_z - reps_p)) > tol:
            return False
        if np.max(np.abs(probs_z - probs_p)) > 1e-15:
            return False
    return True
