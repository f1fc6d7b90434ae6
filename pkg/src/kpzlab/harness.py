"""Experiment drivers: replica orchestration, summary statistics, run
manifests, and flat-file output.

Every driver validates its configuration up front, derives per-replica
seeds from the master seed with the counter hash, and reduces results in
fixed replica order, so outputs are byte-identical regardless of worker
count.  Files carry a manifest header (JSON, in comment lines for CSV)
followed by a deterministic body.
"""

import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import rng
from .chaos import chaos_identity_residual
from .environment import EnvironmentSpec, omega_stats, sample_environment
from .moments import critical_point, moment_convergence_table
from .rwre import rescaled_rwre_batch, time_reversal_law_check
from .scaling import ScalingFrame, snap
from .she import heat_solution, she_point_samples, she_second_moment_series
from .ssrw import LdpQuery, ldp_limit, rescaled_ssrw

VERSION = "0.1.0"

_REPLICA_STREAM = 271828


@dataclass(frozen=True)
class SummaryStats:
    """Replica summary; stderr is None when a single replica makes the
    sample variance undefined."""

    n: int
    mean: float
    variance: float
    stderr: float
    min: float
    max: float

    @classmethod
    def from_values(cls, values) -> "SummaryStats":
        v = np.asarray(values, dtype=float)
        n = len(v)
        if n == 0:
            raise ValueError("no values to summarize")
        if n == 1:
            return cls(1, float(v[0]), None, None, float(v[0]), float(v[0]))
        var = float(v.var(ddof=1))
        return cls(n, float(v.mean()), var, math.sqrt(var / n),
                   float(v.min()), float(v.max()))

    def as_dict(self):
        return {"n": self.n, "mean": self.mean, "variance": self.variance,
                "stderr": self.stderr, "min": self.min, "max": self.max}


def replica_seeds(seed: int, count: int) -> np.ndarray:
    """Independent per-replica seeds, a pure function of (seed, index)."""
    return rng.hash_u64(seed, _REPLICA_STREAM, np.arange(count))


def make_manifest(command: str, config: dict, derived: dict, seed: int) -> dict:
    return {
        "command": command,
        "version": VERSION,
        "seed": seed,
        "config": config,
        "derived": derived,
        "wall_clock": time.strftime("%Y-%m-%dT%H:%M:%S"),
    }


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def write_csv(path, manifest: dict, columns, rows):
    """Manifest as '#' comment lines, then a header row, then the body.

    Floats are written with shortest round-trip repr, so identical runs
    produce byte-identical bodies.
    """
    with open(path, "w") as f:
        f.write(f"# manifest: {json.dumps(manifest, sort_keys=True)}\n")
        f.write(",".join(columns) + "\n")
        for row in rows:
            f.write(",".join(_fmt(row[c]) for c in columns) + "\n")


def write_json(path, manifest: dict, rows, summary):
    with open(path, "w") as f:
        json.dump({"manifest": manifest, "rows": rows, "summary": summary},
                  f, indent=1, sort_keys=True)
        f.write("\n")


def run_rwre_mc(v: float, t: float, x: float, eps_list, replicas: int, dist: str,
                seed: int, threads: int = 1, out=None, fmt: str = "csv"):
    """Monte Carlo of the rescaled transition probability over disorder.

    Emits one row per mesh size with the replica summary, the exact
    disorder-averaged value (the rescaled free-walk probability), the
    limiting mean target, the second-moment target at the measured noise
    strength, and the recentered log-value summary.
    """
    if replicas < 1:
        raise ValueError("replicas must be >= 1")
    if not t > 0.0:
        raise ValueError("t must be positive")
    for eps in eps_list:
        if not 0.0 < eps <= 0.5:
            raise ValueError(f"eps must lie in (0, 0.5], got {eps}")
    seeds = replica_seeds(seed, replicas)
    rows = []
    derived = {}
    for eps in eps_list:
        frame = ScalingFrame(eps, v)
        spec = EnvironmentSpec(dist, eps, seed)
        sp = snap(frame, t, x)
        derived[str(eps)] = {"N": sp.point.i, "site": sp.point.j}

        chunk = max(64, (replicas + 4 * max(1, threads) - 1) // (4 * max(1, threads)))
        blocks = [seeds[i:i + chunk] for i in range(0, replicas, chunk)]

        def eval_block(block):
            return rescaled_rwre_batch(spec, block, frame, t, x)

        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                parts = list(pool.map(eval_block, blocks))
        else:
            parts = [eval_block(b) for b in blocks]
        values = np.concatenate([p[0] for p in parts])
        logs = np.concatenate([p[1] for p in parts])

        stats = SummaryStats.from_values(values)
        log_stats = SummaryStats.from_values(logs)
        sigma = omega_stats(spec, 10**5, seed=rng.derive_seed(seed, 777)).sigma
        exact_mean = rescaled_ssrw(LdpQuery(frame, t, x))
        second = values * values
        rows.append({
            "epsilon": eps,
            "replicas": stats.n,
            "mean": stats.mean,
            "stderr": stats.stderr,
            "min": stats.min,
            "max": stats.max,
            "exact_disorder_mean": exact_mean,
            "mean_target": heat_solution(v, t, x),
            "second_moment": float(second.mean()),
            "second_moment_target": she_second_moment_series(v, sigma, t, x),
            "sigma_measured": sigma,
            "log_mean": log_stats.mean,
            "log_stderr": log_stats.stderr,
        })
    manifest = make_manifest(
        "rwre-mc",
        {"v": v, "t": t, "x": x, "eps": list(eps_list), "replicas": replicas,
         "dist": dist, "threads": threads},
        derived, seed)
    columns = list(rows[0].keys())
    if out:
        if fmt == "json":
            write_json(out, manifest, rows, SummaryStats.from_values(
                [r["mean"] for r in rows]).as_dict())
        else:
            write_csv(out, manifest, columns, rows)
    return manifest, rows


def run_ldp_table(v: float, t: float, x: float, m1: int, m2: int, eps_list,
                  out=None, tol: float = 0.05):
    """Rescaled free-walk probability against its limit along a mesh ladder.

    Returns (manifest, rows, ok); ok is False when the smallest-mesh
    deviation exceeds tol.
    """
    if not t > 0.0:
        raise ValueError("t must be positive")
    rows = []
    for eps in sorted(eps_list, reverse=True):
        frame = ScalingFrame(eps, v)
        val = rescaled_ssrw(LdpQuery(frame, t, x, m1, m2))
        lim = ldp_limit(v, t, x, m1, m2)
        rows.append({"epsilon": eps, "rescaled": val, "limit": lim,
                     "ratio": val / lim, "abs_dev": abs(val / lim - 1.0)})
    ok = rows[-1]["abs_dev"] <= tol
    manifest = make_manifest(
        "ldp-check",
        {"v": v, "t": t, "x": x, "m1": m1, "m2": m2, "eps": sorted(eps_list, reverse=True),
         "tol": tol},
        {"final_abs_dev": rows[-1]["abs_dev"]}, 0)
    if out:
        write_csv(out, manifest, list(rows[0].keys()), rows)
    return manifest, rows, ok


def run_chaos_verify(n: int, seed: int, dist: str, eps: float, trials: int,
                     out=None, tol: float = 1e-12):
    """Expansion-identity residuals over random environments and targets."""
    if not 1 <= n <= 8:
        raise ValueError("n must lie in 1..8")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rows = []
    for trial in range(trials):
        trial_seed = rng.derive_seed(seed, 313, trial)
        env = sample_environment(EnvironmentSpec(dist, eps, trial_seed), n + 1)
        n_t = 2 + int(rng.hash_u64(seed, 314, trial) % np.uint64(n - 1)) if n > 2 else n
        sites = list(range(-n_t, n_t + 1, 2))
        y = sites[int(rng.hash_u64(seed, 315, trial) % np.uint64(len(sites)))]
        resid = chaos_identity_residual(env, n_t, y)
        rows.append({"trial": trial, "n": n_t, "y": y, "residual": resid})
    worst = max(r["residual"] for r in rows)
    manifest = make_manifest(
        "chaos-verify",
        {"n": n, "dist": dist, "eps": eps, "trials": trials, "tol": tol},
        {"worst_residual": worst}, seed)
    if out:
        write_csv(out, manifest, list(rows[0].keys()), rows)
    return manifest, rows, worst <= tol


def run_law_check(n: int, eps: float):
    ok = all(time_reversal_law_check(m, eps) for m in range(1, n + 1))
    manifest = make_manifest("law-check", {"n": n, "eps": eps}, {"ok": ok}, 0)
    return manifest, ok


def run_moment_table(k: int, gamma: float, t: float, xs, eps_list,
                     quad_points=None, out=None):
    if k not in (1, 2):
        raise ValueError("k must be 1 or 2")
    for eps in eps_list:
        if not 0.0 < eps <= 0.5:
            raise ValueError(f"eps must lie in (0, 0.5], got {eps}")
    rows = moment_convergence_table(gamma, t, xs, k, sorted(eps_list, reverse=True),
                                    n_points=quad_points)
    manifest = make_manifest(
        "moments",
        {"k": k, "gamma": gamma, "t": t, "x": list(xs),
         "eps": sorted(eps_list, reverse=True), "quad_points": quad_points},
        {"final_ratio": rows[-1]["ratio"]}, 0)
    if out:
        write_csv(out, manifest, list(rows[0].keys()), rows)
    return manifest, rows


def run_she(v: float, sigma: float, t: float, dx: float, half_width: float,
            replicas: int, seed: int, out=None):
    """Noise replicas of the field at the origin, with mass diagnostics."""
    if replicas < 1:
        raise ValueError("replicas must be >= 1")
    vals, masses = she_point_samples(v, sigma, t, dx, half_width, replicas, seed)
    rows = [{"replica": i, "value_at_0": float(vals[i]), "mass": float(masses[i])}
            for i in range(replicas)]
    stats = SummaryStats.from_values(vals)
    manifest = make_manifest(
        "she-solve",
        {"v": v, "sigma": sigma, "t": t, "dx": dx, "half_width": half_width,
         "replicas": replicas},
        {"mean_target": heat_solution(v, t, 0.0),
         "second_moment_target": she_second_moment_series(v, sigma, t, 0.0)},
        seed)
    if out:
        write_csv(out, manifest, ["replica", "value_at_0", "mass"], rows)
    return manifest, rows, stats


def run_critical_point(gamma: float, eps: float, t: float, x: float):
    cp = critical_point(gamma, eps, t, x)
    manifest = make_manifest(
        "critical-point", {"gamma": gamma, "eps": eps, "t": t, "x": x},
        {"T": cp.T, "n": cp.n}, 0)
    report = {
        "z0_asymptotic": cp.z0_asymptotic,
        "z0_numeric": cp.z0_numeric,
        "fprime_residual": cp.fprime_residual,
        "T": cp.T,
        "n": cp.n,
    }
    return manifest, report
