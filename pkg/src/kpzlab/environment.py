"""Seeded i.i.d. disorder fields.

A field assigns a zero-mean variate omega_{i,j} to every site (i >= 0,
j integer).  Values come from a counter-based generator, so omega_{i,j}
is a pure function of (seed, i, j): access order, chunking, and worker
count cannot change the field.
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from . import rng

KINDS = ("rademacher", "uniform_bounded", "beta_symmetric")

# substream tags keeping the per-site draws of different kinds disjoint
_TAG_SIGN = 11
_TAG_UNIFORM = 12
_TAG_BETA = 13


@dataclass(frozen=True)
class EnvironmentSpec:
    """Distribution family, disorder scale, and seed of a field.

    The jump probabilities (1 +- sqrt(eps) * omega) / 2 must stay inside
    [0, 1], which bounds sup|omega| * sqrt(eps) by 1 for the bounded
    families.  The symmetric-Beta family ties its shape to the scale,
    alpha = beta = 1/eps, and satisfies the bound automatically.
    """

    kind: str
    epsilon: float
    seed: int
    a: float = 1.0  # half-width of the uniform family

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}, expected one of {KINDS}")
        if not self.epsilon > 0.0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if self.kind == "rademacher" and math.sqrt(self.epsilon) > 1.0:
            raise ValueError("rademacher requires epsilon <= 1 to keep probabilities in [0,1]")
        if self.kind == "uniform_bounded":
            if self.a < 0.0:
                raise ValueError(f"half-width must be nonnegative, got {self.a}")
            if self.a * math.sqrt(self.epsilon) > 1.0:
                raise ValueError(
                    f"uniform half-width {self.a} violates a*sqrt(eps) <= 1 at eps={self.epsilon}"
                )
        if self.kind == "beta_symmetric" and self.epsilon > 1.0:
            raise ValueError("beta_symmetric requires epsilon <= 1 (shape 1/eps >= 1)")

    def to_json_fragment(self) -> str:
        d = {"kind": self.kind, "epsilon": self.epsilon, "seed": self.seed}
        if self.kind == "uniform_bounded":
            d["a"] = self.a
        return json.dumps(d, sort_keys=True)

    @classmethod
    def from_json_fragment(cls, s: str) -> "EnvironmentSpec":
        d = json.loads(s)
        return cls(d["kind"], d["epsilon"], d["seed"], d.get("a", 1.0))


def null_spec(epsilon: float, seed: int = 0) -> EnvironmentSpec:
    """A zero disorder field (uniform family with half-width 0)."""
    return EnvironmentSpec("uniform_bounded", epsilon, seed, a=0.0)


def omega_values(spec: EnvironmentSpec, i, j, seed=None):
    """Field values at sites (i, j); arguments broadcast.

    `seed` overrides spec.seed (an array of seeds evaluates many
    independent replicas of the field at once).
    """
    if seed is None:
        seed = spec.seed
    if spec.kind == "rademacher":
        h = rng.hash_u64(seed, _TAG_SIGN, i, j)
        return np.where((h >> np.uint64(63)).astype(bool), 1.0, -1.0)
    if spec.kind == "uniform_bounded":
        u = rng.uniform(seed, _TAG_UNIFORM, i, j)
        return spec.a * (2.0 * u - 1.0)
    # beta_symmetric: omega = 2 * eps^(-1/2) * (B - 1/2), B ~ Beta(1/eps, 1/eps)
    B = rng.beta_symmetric(1.0 / spec.epsilon, seed, _TAG_BETA, i, j)
    return 2.0 / math.sqrt(spec.epsilon) * (B - 0.5)


class Environment:
    """An immutable disorder field over sites i < n_max, |j| <= n_max."""

    def __init__(self, spec: EnvironmentSpec, n_max: int):
        if n_max < 1:
            raise ValueError(f"n_max must be >= 1, got {n_max}")
        self.spec = spec
        self.n_max = n_max

    def omega(self, i, j):
        """omega_{i,j}; scalar in, scalar out, arrays broadcast."""
        i_arr = np.asarray(i)
        j_arr = np.asarray(j)
        if np.any(i_arr < 0) or np.any(i_arr >= self.n_max) or np.any(np.abs(j_arr) > self.n_max):
            raise IndexError(f"site out of declared bounds (n_max={self.n_max})")
        out = omega_values(self.spec, i, j)
        return float(out) if np.isscalar(i) and np.isscalar(j) else out

    def beta_weight(self, i, j):
        """Edge weight B_{i,j} = (1 + sqrt(eps) * omega_{i,j}) / 2 in [0, 1]."""
        return 0.5 * (1.0 + math.sqrt(self.spec.epsilon) * self.omega(i, j))


def sample_environment(spec: EnvironmentSpec, n_max: int) -> Environment:
    return Environment(spec, n_max)


@dataclass(frozen=True)
class OmegaStats:
    """Monte Carlo moment estimates of a disorder family."""

    n_samples: int
    mean: float
    mean_se: float
    two_m2: float  # estimate of 2 * E[omega^2]
    two_m2_se: float
    sigma: float  # sqrt(2 * E[omega^2]), the noise strength entering the limit

    def as_dict(self):
        return {
            "n_samples": self.n_samples,
            "mean": self.mean,
            "mean_se": self.mean_se,
            "two_m2": self.two_m2,
            "two_m2_se": self.two_m2_se,
            "sigma": self.sigma,
        }


def omega_stats(spec: EnvironmentSpec, n_samples: int, seed=None) -> OmegaStats:
    """Estimate E[omega], 2*E[omega^2] and sigma from n_samples draws."""
    if n_samples < 1000:
        raise ValueError(f"need at least 1e3 samples, got {n_samples}")
    w = np.asarray(omega_values(spec, 0, np.arange(n_samples), seed=seed), dtype=float)
    mean = float(w.mean())
    mean_se = float(w.std(ddof=1) / math.sqrt(n_samples))
    sq = w * w
    two_m2 = 2.0 * float(sq.mean())
    two_m2_se = 2.0 * float(sq.std(ddof=1) / math.sqrt(n_samples))
    return OmegaStats(n_samples, mean, mean_se, two_m2, two_m2_se, math.sqrt(two_m2))
