"""Acceptance suite: one test per numbered criterion, each printing a
PASS/FAIL line with its key numbers (run with -s to see them).

Stated runtime budgets are asserted.  The full-scale second-moment Monte
Carlo of criterion 9 is feasible only on multi-core hardware; on a slow
machine the test measures throughput, projects the full cost, and fails
with the projection unless KPZLAB_ACCEPT_FULL=1 forces the complete run.
"""

import math
import os
import time

import numpy as np
import pytest

import kpzlab.moments as M
from kpzlab.chaos import (
    chaos_coefficient_limit,
    chaos_identity_residual,
    chaos_poly_dp,
    rescaled_chaos_coefficient,
)
from kpzlab.environment import EnvironmentSpec, sample_environment
from kpzlab.harness import replica_seeds
from kpzlab.rwre import evolve_rwre, rescaled_rwre_batch, time_reversal_law_check
from kpzlab.scaling import ScalingFrame
from kpzlab import rng
from kpzlab.she import (
    heat_solution,
    she_point_samples,
    she_second_moment_series,
    she_solve,
)
from kpzlab.ssrw import (
    STANDARD_SHIFTS,
    LdpQuery,
    ldp_limit,
    rescaled_ssrw,
    uniform_bound_fit,
)

SEED = 20260810


def _report(num, label, ok, detail):
    print(f"\nCRITERION {num:2d} [{label}]: {'PASS' if ok else 'FAIL'}  ({detail})")


def test_c01_chaos_identity():
    t0 = time.time()
    worst = 0.0
    for trial in range(100):
        dist = ("rademacher", "uniform_bounded")[trial % 2]
        n = 2 + int(rng.hash_u64(SEED, 1, trial) % np.uint64(7))  # 2..8
        seed = rng.derive_seed(SEED, 2, trial)
        env = sample_environment(EnvironmentSpec(dist, 0.25, seed), n + 1)
        sites = list(range(-n, n + 1, 2))
        y = sites[int(rng.hash_u64(SEED, 3, trial) % np.uint64(len(sites)))]
        worst = max(worst, chaos_identity_residual(env, n, y))
    ring_worst = 0.0
    for n_steps, y, seed in [(8, 0, 1), (16, -4, 2), (24, 0, 3), (24, 6, 4)]:
        env = sample_environment(EnvironmentSpec("rademacher", 0.1, seed), 30)
        val = chaos_poly_dp(env, n_steps, y).value_at(math.sqrt(0.1))
        ref = evolve_rwre(env, n_steps).prob(y)
        ring_worst = max(ring_worst, abs(val / ref - 1))
    elapsed = time.time() - t0
    ok = worst <= 1e-12 and ring_worst <= 1e-13 and elapsed < 10
    _report(1, "expansion identity", ok,
            f"worst residual {worst:.2e} <= 1e-12, ring-DP rel {ring_worst:.2e} "
            f"<= 1e-13, {elapsed:.1f}s < 10s")
    assert worst <= 1e-12
    assert ring_worst <= 1e-13
    assert elapsed < 10


def test_c02_sharp_ldp():
    # per-shift deviations are not pointwise monotone along the mesh
    # ladder (lattice parity forces sub-cell target offsets whose sign
    # alternates; see the decisions ledger), so the decrease is asserted
    # for the worst deviation over the three index shifts
    t0 = time.time()
    detail = []
    ok = True
    for (v, t, x) in [(0.5, 1.0, 0.0), (0.5, 1.0, 0.3), (0.8, 2.0, -0.5)]:
        per_eps_worst = []
        for eps in (0.2, 0.1, 0.05, 0.02):
            frame = ScalingFrame(eps, v)
            devs = [abs(rescaled_ssrw(LdpQuery(frame, t, x, m1, m2))
                        / ldp_limit(v, t, x, m1, m2) - 1)
                    for m1, m2 in STANDARD_SHIFTS]
            per_eps_worst.append(max(devs))
            if eps == 0.02 and max(devs) > 0.05:
                ok = False
        if not all(b < a for a, b in zip(per_eps_worst, per_eps_worst[1:])):
            ok = False
        detail.append(f"({v},{t},{x}): " + "->".join(f"{d:.4f}" for d in per_eps_worst))
    elapsed = time.time() - t0
    ok = ok and elapsed < 5
    _report(2, "sharp large deviation", ok, "; ".join(detail) + f"; {elapsed:.1f}s < 5s")
    assert ok


def test_c03_uniform_bound():
    t0 = time.time()
    samples = [(t, x, e) for t in (0.1, 1.0, 5.0)
               for x in (0.0, 0.5, -0.5, 2.0, -2.0)
               for e in (0.2, 0.1, 0.05)]
    C = uniform_bound_fit(0.5, samples)
    elapsed = time.time() - t0
    ok = C is not None and C <= 100 and elapsed < 5
    _report(3, "uniform envelope", ok, f"fitted C = {C} on 3x5x3 grid, {elapsed:.1f}s < 5s")
    assert ok


def test_c04_coefficient_limit():
    t0 = time.time()
    cases = [
        (0.5, [(0.4, 0.15)], 1.0, 0.0),
        (0.5, [(0.3, 0.05), (0.65, -0.1)], 1.0, 0.1),
    ]
    devs = []
    for v, pts, t, x in cases:
        lim = chaos_coefficient_limit(v, pts, t, x)
        val = rescaled_chaos_coefficient(ScalingFrame(0.02, v), pts, t, x)
        devs.append(abs(val / lim - 1))
    elapsed = time.time() - t0
    ok = all(d <= 0.1 for d in devs) and elapsed < 5
    _report(4, "rescaled coefficient limit", ok,
            f"k=1 dev {devs[0]:.4f}, k=2 dev {devs[1]:.4f} (<= 0.1), {elapsed:.1f}s < 5s")
    assert ok


def test_c05_beta_moments():
    t0 = time.time()
    worst_k1 = 0.0
    for (a, b) in [(1.0, 1.0), (2.0, 2.0), (10.0, 10.0)]:
        for T in (4, 12, 20):
            for n in sorted({1, max(1, round(T / 4)), max(1, round(2 * T / 5)), T // 2}):
                cf = M.beta_moment_closed_form_k1(T, n, a, b)
                got = M.beta_moment_contour(T, [n], a, b, n_points=1024).value
                worst_k1 = max(worst_k1, abs(got / cf - 1))
    worst_k2 = 0.0
    for (T, n1, n2, a, b) in [(6, 3, 3, 2.0, 2.0), (8, 5, 3, 1.0, 1.0),
                              (8, 4, 4, 2.0, 2.0), (8, 4, 2, 10.0, 10.0),
                              (7, 4, 4, 1.0, 1.0), (8, 9, 1, 2.0, 3.0)]:
        orc = M.beta_moment_oracle(T, [n1, n2], a, b)
        got = M.beta_moment_contour(T, [n1, n2], a, b, n_points=512).value
        worst_k2 = max(worst_k2, abs(got / orc - 1))
    elapsed = time.time() - t0
    ok = worst_k1 <= 1e-10 and worst_k2 <= 1e-8 and elapsed < 30
    _report(5, "beta-weight moments", ok,
            f"k=1 worst rel {worst_k1:.2e} <= 1e-10, k=2 worst rel {worst_k2:.2e} "
            f"<= 1e-8, {elapsed:.1f}s < 30s")
    assert ok


def test_c06_she_moment_k1():
    t0 = time.time()
    worst = 0.0
    for g in (0.1, 0.25, 0.4):
        for (t, x) in [(1.0, 0.0), (1.0, 0.5), (2.0, -1.0)]:
            cf = M.she_moment_closed_form_k1(t, x, g)
            got = M.she_moment_contour(t, [x], g).value
            worst = max(worst, abs(got / cf - 1))
    elapsed = time.time() - t0
    ok = worst <= 1e-10 and elapsed < 5
    _report(6, "limit-field first moment", ok,
            f"worst rel {worst:.2e} <= 1e-10, {elapsed:.1f}s < 5s")
    assert ok


def test_c07_moment_convergence():
    t0 = time.time()
    rows1 = M.moment_convergence_table(0.25, 1.0, [0.0], 1, [0.2, 0.1, 0.05])
    errs1 = [abs(r["ratio"] - 1) for r in rows1]
    rows2 = M.moment_convergence_table(0.25, 1.0, [0.0, 0.0], 2, [0.2, 0.1])
    errs2 = [abs(r["ratio"] - 1) for r in rows2]
    elapsed = time.time() - t0
    ok = (errs1[0] > errs1[1] > errs1[2] and errs1[2] <= 0.1
          and errs2[1] < errs2[0] and elapsed < 300)
    _report(7, "moment convergence", ok,
            f"k=1 errs {errs1[0]:.4f}->{errs1[1]:.4f}->{errs1[2]:.4f} (final <= 0.1), "
            f"k=2 errs {errs2[0]:.4f}->{errs2[1]:.4f}, {elapsed:.1f}s < 300s")
    assert ok


def test_c08_critical_point_and_taylor():
    t0 = time.time()
    cp = M.critical_point(0.25, 0.05, 1.0, 0.0)
    root_resid = cp.fprime_residual
    h = 0.1
    f = lambda z: M.path_exponent(z, cp.n, cp.T, 20.0)
    fd_half = (f(cp.z0_asymptotic + h) - 2 * f(cp.z0_asymptotic)
               + f(cp.z0_asymptotic - h)) / h**2 / 2
    quad_rel = abs(M.taylor_quadratic_coefficient(0.25, 0.05) / fd_half - 1)
    # the expansion constant is exact at the saddle (the exponent is
    # affine in the endpoint ratio), so the zeroth-order deviation sits
    # at rounding level for every mesh instead of merely decreasing;
    # see the decisions ledger
    zeroth = [M.taylor_check(0.25, eps, 1.0, 0.0, [0.0]) for eps in (0.1, 0.05, 0.02)]
    elapsed = time.time() - t0
    ok = (root_resid <= 1e-12 and quad_rel <= 1e-4
          and all(z <= 1e-13 for z in zeroth) and elapsed < 1)
    _report(8, "saddle point and expansion", ok,
            f"|f'(z0)| = {root_resid:.1e} <= 1e-12, quad-vs-FD rel {quad_rel:.1e} "
            f"<= 1e-4, zeroth-order devs {max(zeroth):.1e} <= 1e-13, {elapsed:.2f}s < 1s")
    assert ok


def test_c09_she_solver():
    t0 = time.time()
    v, sig, t = 0.5, math.sqrt(2.0), 0.5

    fg = she_solve(v, 0.0, t, 0.01, 4.0)
    xs = fg.grid()
    sel = np.abs(xs) <= 1.0
    noiseless_dev = max(abs(float(fg.values[i]) / heat_solution(v, t, float(xs[i])) - 1)
                        for i in np.flatnonzero(sel))

    vals, _ = she_point_samples(v, sig, t, 0.02, 4.0, replicas=2000, seed=SEED)
    target = heat_solution(v, t, 0.0)
    se = vals.std(ddof=1) / math.sqrt(len(vals))
    mean_dev_se = abs(vals.mean() - target) / se

    # second-moment clause at the stated scale: 1e4 replicas, dx = 0.005
    m2_target = she_second_moment_series(v, sig, t, 0.0)
    probe0 = time.time()
    probe_n = 12
    pv, _ = she_point_samples(v, sig, t, 0.005, 3.7, replicas=probe_n, seed=SEED)
    per_replica = (time.time() - probe0) / probe_n
    projected = per_replica * 10**4
    budget_left = 300.0 - (time.time() - t0)

    ok_so_far = noiseless_dev <= 0.01 and mean_dev_se <= 3.0
    if projected > budget_left and os.environ.get("KPZLAB_ACCEPT_FULL") != "1":
        _report(9, "field solver", False,
                f"noiseless dev {noiseless_dev:.2e} <= 1%, mean |d|/se {mean_dev_se:.2f} "
                f"<= 3; second-moment clause INFEASIBLE here: {per_replica:.2f}s/replica "
                f"=> {projected/60:.0f} min projected for 1e4 replicas vs < 5 min total "
                f"budget (12-replica prefix E[u^2] = {float(np.mean(pv**2)):.3f}, "
                f"target {m2_target:.3f}); set KPZLAB_ACCEPT_FULL=1 to run in full")
        pytest.fail(
            "criterion 9 second-moment clause cannot meet its 5-minute budget on "
            f"this machine: measured {per_replica:.2f}s/replica single-threaded, "
            f"projected {projected/60:.0f} min for 1e4 replicas at dx=0.005; "
            "the tolerance itself was verified offline (see decisions ledger); "
            "set KPZLAB_ACCEPT_FULL=1 to execute the full run")
    vals2, _ = she_point_samples(v, sig, t, 0.005, 3.7,
                                 replicas=10**4 - probe_n, seed=SEED, replica0=probe_n)
    m2 = float(np.mean(np.concatenate([pv, vals2]) ** 2))
    m2_rel = abs(m2 / m2_target - 1)
    elapsed = time.time() - t0
    ok = ok_so_far and m2_rel <= 0.10 and elapsed < 300
    _report(9, "field solver", ok,
            f"noiseless dev {noiseless_dev:.2e} <= 1%, mean |d|/se {mean_dev_se:.2f} <= 3, "
            f"E[u^2] {m2:.4f} vs {m2_target:.4f} rel {m2_rel:.3f} <= 0.10, "
            f"{elapsed:.0f}s < 300s")
    assert ok


def test_c10_rwre_monte_carlo():
    t0 = time.time()
    v, t, x = 0.5, 1.0, 0.0
    seeds = replica_seeds(SEED, 10**4)
    means, details = {}, []
    m2_rel = None
    for eps in (0.2, 0.1, 0.05):
        frame = ScalingFrame(eps, v)
        spec = EnvironmentSpec("rademacher", eps, 0)
        vals, _ = rescaled_rwre_batch(spec, seeds, frame, t, x)
        means[eps] = float(vals.mean())
        if eps == 0.1:
            exact = rescaled_ssrw(LdpQuery(frame, t, x))
            se = vals.std(ddof=1) / 100.0
            mean_dev_se = abs(vals.mean() - exact) / se
            details.append(f"eps=0.1 |mean-exact|/se = {mean_dev_se:.2f}")
        if eps == 0.05:
            m2 = float((vals ** 2).mean())
            m2_target = she_second_moment_series(v, math.sqrt(2.0), t, x)
            m2_rel = abs(m2 / m2_target - 1)
            details.append(f"eps=0.05 E[val^2] {m2:.4f} vs {m2_target:.4f} "
                           f"rel {m2_rel:.3f}")
    limit = ldp_limit(v, t, x)
    final_err = abs(means[0.05] - limit)
    approach = abs(means[0.05] - limit) < abs(means[0.2] - limit)
    elapsed = time.time() - t0
    ok = (mean_dev_se <= 3.0 and final_err <= 0.05 and approach
          and m2_rel <= 0.15 and elapsed < 600)
    _report(10, "disorder Monte Carlo", ok,
            "; ".join(details) + f"; means {means[0.2]:.4f}->{means[0.1]:.4f}->"
            f"{means[0.05]:.4f} vs limit {limit:.4f} (final err {final_err:.4f} "
            f"<= 0.05); {elapsed:.0f}s < 600s")
    assert ok


def test_c11_time_reversal_law():
    t0 = time.time()
    results = {n: time_reversal_law_check(n) for n in (1, 2, 3, 4)}
    elapsed = time.time() - t0
    ok = all(results.values()) and elapsed < 10
    _report(11, "time-reversal equality in law", ok,
            f"N=1..4 all x, multiset tolerance 1e-12: {results}, {elapsed:.1f}s < 10s")
    assert ok
