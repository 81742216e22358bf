#!/usr/bin/env python3
"""Validate the L = ceil(8/s) window rule by doubling L.

At each s the boundary-reach estimate is recomputed on a doubled window;
the rule is adequate when the two estimates agree within 2 combined
standard errors (the window is not clipping critical droplets).

    python scripts/validate_trend_window.py --k 2 --s 0.25 0.2 --trials 20000 --seed 5
"""

import argparse
import math

from perckit.harness import default_trend_window, trend_check_theorem1


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k", type=int, default=2)
    ap.add_argument(
        "--s", type=float, nargs="+", default=[0.25, 0.2],
        help="strictly decreasing, at least two values",
    )
    ap.add_argument("--trials", type=int, default=20_000)
    ap.add_argument("--seed", type=int, required=True)
    args = ap.parse_args()

    base = trend_check_theorem1(args.k, tuple(args.s), args.trials, args.seed)
    doubled = trend_check_theorem1(
        args.k, tuple(args.s), args.trials, args.seed,
        L_rule=lambda s: 2 * default_trend_window(s),
    )
    print("s,L,estimate,L2,estimate2,agree_2se")
    for s, L1, p1, e1, L2, p2, e2 in zip(
        base.s_values, base.L_values, base.estimates, base.stderrs,
        doubled.L_values, doubled.estimates, doubled.stderrs,
    ):
        agree = abs(p1 - p2) <= 2.0 * math.hypot(e1, e2)
        print(f"{s},{L1},{p1},{L2},{p2},{agree}")


if __name__ == "__main__":
    main()
