#!/usr/bin/env python3
"""Threshold scan for the localized k-percolation models.

Sweeps the empty-site probability q over quadrant windows at a few sizes
and writes the frozen-schema CSV.  Example:

    python scripts/run_threshold_scan.py --k 2 --trials 2000 --seed 7 \
        --out scan_k2.csv
"""

import argparse

from perckit.harness import ExperimentConfig, results_to_csv, scan_threshold, write_results


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k", type=int, default=2)
    ap.add_argument("--model", default="local", choices=["local", "modified", "frobose"])
    ap.add_argument("--q", type=float, nargs="+", default=[0.5, 0.6, 0.7, 0.8, 0.9])
    ap.add_argument("--L", type=int, nargs="+", default=[32, 64, 128])
    ap.add_argument("--trials", type=int, default=1000)
    ap.add_argument("--seed", type=int, required=True)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()

    config = ExperimentConfig(
        model=args.model,
        k_values=(args.k,),
        L_values=tuple(args.L),
        q_values=tuple(args.q),
        trials=args.trials,
        seed=args.seed,
    )
    results = scan_threshold(config)
    if args.out:
        write_results(results, args.out, "csv")
        print(f"wrote {len(results)} rows to {args.out}")
    else:
        print(results_to_csv(results), end="")


if __name__ == "__main__":
    main()
