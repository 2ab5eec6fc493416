#!/usr/bin/env python3
"""Run the full verification registry and print a per-check summary table.

Usage:
    python scripts/run_verification.py [--out report.json] [--hbar H] [--omega W] [--gamma G]
"""

import argparse
import collections
import sys
import time

from mqds.verify import CHECK_REGISTRY, run_all


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=None)
    ap.add_argument("--hbar", type=float, default=1.0)
    ap.add_argument("--omega", type=float, default=1.0)
    ap.add_argument("--gamma", type=float, default=1.0)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    t0 = time.perf_counter()
    report = run_all(seed=args.seed, hbar=args.hbar, omega=args.omega, gamma=args.gamma)
    dt = time.perf_counter() - t0

    worst = collections.defaultdict(float)
    counts = collections.Counter()
    fails = collections.Counter()
    for e in report.entries:
        counts[e.name] += 1
        worst[e.name] = max(worst[e.name], e.residual)
        if not e.passed:
            fails[e.name] += 1

    print(f"{'check':30s} {'entries':>8s} {'failed':>7s} {'worst residual':>15s}")
    for name in CHECK_REGISTRY:
        print(f"{name:30s} {counts[name]:8d} {fails[name]:7d} {worst[name]:15.3e}")
    print(f"\ntotal: {report.n_passed} passed, {report.n_failed} failed in {dt:.1f}s")

    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(report.to_json() + "\n")
        print(f"report written to {args.out}")
    return 0 if report.all_passed else 1


if __name__ == "__main__":
    sys.exit(main())
