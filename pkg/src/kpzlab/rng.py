"""Counter-based random variates.

Every draw is a pure function of (seed, integer coordinates), so a field
or noise stream can be evaluated at any site, in any order, in chunks or
in parallel, and always reproduces bit-identical values.  The mixing
function is the SplitMix64 finalizer, applied once per folded coordinate.
"""

import numpy as np

_U64 = np.uint64
_GOLDEN = _U64(0x9E3779B97F4A7C15)
_MIX1 = _U64(0xBF58476D1CE4E5B9)
_MIX2 = _U64(0x94D049BB133111EB)

# 2**-53, for mapping the top 53 bits of a hash to (0, 1)
_INV53 = 1.0 / 9007199254740992.0


def _mix64(z):
    z = (z ^ (z >> _U64(30))) * _MIX1
    z = (z ^ (z >> _U64(27))) * _MIX2
    return z ^ (z >> _U64(31))


def _as_u64(x):
    # two's-complement wrap for negative coordinates; values already in
    # the upper uint64 half (e.g. derived seeds) pass through unchanged
    a = np.asarray(x)
    if a.dtype == np.uint64:
        return a
    return a.astype(np.int64).astype(np.uint64)


def hash_u64(seed, *coords):
    """Mix a seed and integer coordinates into a uint64 (broadcasts)."""
    with np.errstate(over="ignore"):  # uint64 wraparound is the point
        h = _mix64(_as_u64(seed) + _GOLDEN)
        for c in coords:
            h = _mix64((h + _GOLDEN) ^ (_as_u64(c) * _MIX2))
    return h


def uniform(seed, *coords):
    """Uniform draw in the open interval (0, 1), one per coordinate tuple."""
    h = hash_u64(seed, *coords)
    return (np.asarray(h >> _U64(11), dtype=np.float64) + 0.5) * _INV53


def standard_normal(seed, *coords):
    """Standard normal via Box-Muller on two sub-stream uniforms."""
    u1 = uniform(seed, *coords, 0)
    u2 = uniform(seed, *coords, 1)
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)


def derive_seed(seed, *coords):
    """Child seed for an independent substream (e.g. one per replica)."""
    return int(hash_u64(seed, *coords))


def gamma_shape_ge1(shape, seed, *coords, max_rounds=64):
    """Gamma(shape, 1) draws for shape >= 1, one per coordinate tuple.

    Marsaglia-Tsang squeeze-rejection, with rejection rounds indexed by an
    extra counter coordinate so the result stays a pure function of
    (seed, coords).  Acceptance per round exceeds 99.8% for shape >= 1.
    """
    if shape < 1.0:
        raise ValueError(f"shape must be >= 1, got {shape}")
    d = shape - 1.0 / 3.0
    c = 1.0 / np.sqrt(9.0 * d)

    out_shape = np.broadcast(*(np.asarray(a) for a in (seed, *coords))).shape
    out = np.empty(out_shape if out_shape else (1,), dtype=np.float64)
    pending = np.ones_like(out, dtype=bool)
    for r in range(max_rounds):
        x = np.atleast_1d(standard_normal(seed, *coords, 101, r))
        u = np.atleast_1d(uniform(seed, *coords, 102, r))
        v = (1.0 + c * x) ** 3
        ok = v > 0.0
        with np.errstate(invalid="ignore", divide="ignore"):
            squeeze = u < 1.0 - 0.0331 * x**4
            full = np.log(u) < 0.5 * x**2 + d * (1.0 - v + np.log(np.where(ok, v, 1.0)))
        accept = pending & ok & (squeeze | full)
        out[accept] = (d * np.broadcast_to(v, out.shape))[accept]
        pending &= ~accept
        if not pending.any():
            break
    else:
        raise RuntimeError("gamma sampler failed to accept within max_rounds")
    return out.reshape(out_shape) if out_shape else float(out[0])


def beta_symmetric(alpha, seed, *coords):
    """Beta(alpha, alpha) draws via the ratio of two Gamma variates."""
    g1 = gamma_shape_ge1(alpha, seed, *coords, 1)
    g2 = gamma_shape_ge1(alpha, seed, *coords, 2)
    return g1 / (g1 + g2)
