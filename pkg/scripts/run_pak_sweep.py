#!/usr/bin/env python3
"""Sweep P(A_k) against the two-sided metastability bounds.

    python scripts/run_pak_sweep.py --k 1 2 3 --s 0.2 0.1 0.05 0.02
"""

import argparse
import json

from perckit.harness import sweep_pak_bounds


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k", type=int, nargs="+", default=[1, 2, 3, 4])
    ap.add_argument("--s", type=float, nargs="+", default=[0.2, 0.1, 0.05, 0.02])
    ap.add_argument("--tol", type=float, default=1e-8)
    args = ap.parse_args()

    rows = sweep_pak_bounds(args.k, args.s, args.tol)
    print("k,s,log_value,paper_log_lower,paper_log_upper,inside_lower,ratio_to_upper")
    for r in rows:
        print(
            f"{r.k},{r.s},{r.log_value:.10g},{r.paper_log_lower:.10g},"
            f"{r.paper_log_upper:.10g},{r.inside_lower},{r.ratio_to_upper:.6g}"
        )
    print(json.dumps({"all_inside_lower": all(r.inside_lower for r in rows)}))


if __name__ == "__main__":
    main()
