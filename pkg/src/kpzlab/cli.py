"""Command-line entry points.

Exit codes: 0 on success, 1 on configuration errors, 2 when a verifying
command exceeds its tolerance.  The KPZLAB_SEED environment variable
supplies the default seed; --seed overrides it.
"""

import argparse
import json
import os
import sys

from . import harness


class _ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; config errors must be 1
    def error(self, message):
        raise _ConfigError(message)


def _default_seed() -> int:
    try:
        return int(os.environ.get("KPZLAB_SEED", "0"))
    except ValueError:
        raise _ConfigError("KPZLAB_SEED must be an integer")


def _float_list(s: str):
    return [float(tok) for tok in s.split(",") if tok.strip()]


def build_parser() -> _Parser:
    p = _Parser(prog="kpzlab", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("ldp-check", help="rescaled walk probability vs its limit")
    q.add_argument("--v", type=float, default=0.5)
    q.add_argument("--t", type=float, default=1.0)
    q.add_argument("--x", type=float, default=0.0)
    q.add_argument("--m1", type=int, default=0)
    q.add_argument("--m2", type=int, default=0)
    q.add_argument("--eps", type=_float_list, default=[0.2, 0.1, 0.05, 0.02])
    q.add_argument("--tol", type=float, default=0.05)
    q.add_argument("--out", default=None)

    q = sub.add_parser("chaos-verify", help="expansion-identity residuals")
    q.add_argument("--n", type=int, default=8)
    q.add_argument("--seed", type=int, default=None)
    q.add_argument("--dist", default="rademacher",
                   choices=["rademacher", "uniform_bounded", "beta_symmetric"])
    q.add_argument("--eps", type=float, default=0.1)
    q.add_argument("--trials", type=int, default=100)
    q.add_argument("--tol", type=float, default=1e-12)
    q.add_argument("--out", default=None)

    q = sub.add_parser("law-check", help="time-reversal equality in law")
    q.add_argument("--n", type=int, default=3)
    q.add_argument("--eps", type=float, default=0.25)

    q = sub.add_parser("rwre-mc", help="disorder Monte Carlo of the rescaled probability")
    q.add_argument("--v", type=float, default=0.5)
    q.add_argument("--t", type=float, default=1.0)
    q.add_argument("--x", type=float, default=0.0)
    q.add_argument("--eps", type=_float_list, default=[0.1])
    q.add_argument("--replicas", type=int, default=1000)
    q.add_argument("--dist", default="rademacher",
                   choices=["rademacher", "uniform_bounded", "beta_symmetric"])
    q.add_argument("--seed", type=int, default=None)
    q.add_argument("--threads", type=int, default=1)
    q.add_argument("--out", default=None)
    q.add_argument("--format", default="csv", choices=["csv", "json"])

    q = sub.add_parser("she-solve", help="noise replicas of the limiting field")
    q.add_argument("--v", type=float, default=0.5)
    q.add_argument("--sigma", type=float, default=1.0)
    q.add_argument("--t", type=float, default=0.5)
    q.add_argument("--dx", type=float, default=0.02)
    q.add_argument("--half-width", type=float, default=4.0)
    q.add_argument("--replicas", type=int, default=100)
    q.add_argument("--seed", type=int, default=None)
    q.add_argument("--out", default=None)

    q = sub.add_parser("moments", help="rescaled moment convergence table")
    q.add_argument("--k", type=int, default=1)
    q.add_argument("--gamma", type=float, default=0.25)
    q.add_argument("--t", type=float, default=1.0)
    q.add_argument("--x", type=_float_list, default=[0.0])
    q.add_argument("--eps", type=_float_list, default=[0.2, 0.1, 0.05])
    q.add_argument("--quad-points", type=int, default=None)
    q.add_argument("--out", default=None)

    q = sub.add_parser("critical-point", help="saddle of the moment exponent")
    q.add_argument("--gamma", type=float, default=0.25)
    q.add_argument("--eps", type=float, default=0.1)
    q.add_argument("--t", type=float, default=1.0)
    q.add_argument("--x", type=float, default=0.0)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        seed = getattr(args, "seed", None)
        if seed is None:
            seed = _default_seed()

        if args.command == "ldp-check":
            _, rows, ok = harness.run_ldp_table(
                args.v, args.t, args.x, args.m1, args.m2, args.eps,
                out=args.out, tol=args.tol)
            for r in rows:
                print(f"eps={r['epsilon']:g} rescaled={r['rescaled']:.8g} "
                      f"limit={r['limit']:.8g} ratio={r['ratio']:.6f}")
            return 0 if ok else 2

        if args.command == "chaos-verify":
            _, rows, ok = harness.run_chaos_verify(
                args.n, seed, args.dist, args.eps, args.trials,
                out=args.out, tol=args.tol)
            worst = max(r["residual"] for r in rows)
            print(f"trials={len(rows)} worst residual={worst:.3e}")
            return 0 if ok else 2

        if args.command == "law-check":
            _, ok = harness.run_law_check(args.n, args.eps)
            print(f"equality in law up to n={args.n}: {'ok' if ok else 'FAILED'}")
            return 0 if ok else 2

        if args.command == "rwre-mc":
            _, rows = harness.run_rwre_mc(
                args.v, args.t, args.x, args.eps, args.replicas, args.dist,
                seed, threads=args.threads, out=args.out, fmt=args.format)
            for r in rows:
                print(f"eps={r['epsilon']:g} mean={r['mean']:.6f}"
                      f" +- {r['stderr'] if r['stderr'] is None else round(r['stderr'], 6)}"
                      f" exact={r['exact_disorder_mean']:.6f} target={r['mean_target']:.6f}")
            return 0

        if args.command == "she-solve":
            _, rows, stats = harness.run_she(
                args.v, args.sigma, args.t, args.dx, args.half_width,
                args.replicas, seed, out=args.out)
            print(f"replicas={stats.n} mean={stats.mean:.6f} stderr={stats.stderr}")
            return 0

        if args.command == "moments":
            _, rows = harness.run_moment_table(
                args.k, args.gamma, args.t, args.x, args.eps,
                quad_points=args.quad_points, out=args.out)
            for r in rows:
                print(f"eps={r['epsilon']:g} rescaled={r['rescaled_beta_moment']:.8g} "
                      f"limit={r['she_moment']:.8g} ratio={r['ratio']:.6f}")
            return 0

        if args.command == "critical-point":
            _, report = harness.run_critical_point(args.gamma, args.eps, args.t, args.x)
            print(json.dumps(report, indent=1, sort_keys=True))
            return 0

        raise _ConfigError(f"unknown command {args.command}")
    except (_ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
