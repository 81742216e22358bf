#!/usr/bin/env python3
"""Metastability trend check: log P(reach boundary) against -2 lambda_k / s.

The default grid reproduces the acceptance run at a reduced trial budget:

    python scripts/run_trend_check.py --k 2 --trials 20000 --seed 42
"""

import argparse

from perckit.harness import trend_check_theorem1


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k", type=int, default=2)
    ap.add_argument("--s", type=float, nargs="+", default=[0.25, 0.2, 0.167, 0.143])
    ap.add_argument("--trials", type=int, default=20_000)
    ap.add_argument("--seed", type=int, required=True)
    ap.add_argument("--model", default=None)
    args = ap.parse_args()

    report = trend_check_theorem1(
        args.k, tuple(args.s), trials=args.trials, seed=args.seed, model=args.model
    )
    print(report.to_json())
    lo, hi = report.slope_window
    verdict = "inside" if report.slope_in_window else "OUTSIDE"
    print(f"# slope {report.slope:.4f} is {verdict} [{lo:.4f}, {hi:.4f}]")


if __name__ == "__main__":
    main()
