#!/usr/bin/env python3
"""Estimate the classical index of the 2-D p-norm planes over a p-grid.

The exact values are unknown off p in {1, 2, inf}; this records the best
upper bounds the search finds, which should decay to zero as p approaches 2
from either side.  Writes CSV to stdout.
"""

import argparse
import sys

import numpy as np

from numindex import Lp, estimate_index


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--points", type=int, default=13)
    ap.add_argument("--budget", type=int, default=8000)
    ap.add_argument("--restarts", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    grid = np.concatenate(
        [np.linspace(1.05, 1.9, args.points // 2), np.linspace(2.1, 6.0, args.points - args.points // 2)]
    )
    print("p,index_estimate")
    for p in grid:
        est = estimate_index(
            Lp(float(p), 2), restarts=args.restarts, budget=args.budget, seed=args.seed
        )
        print(f"{p:.4f},{est.value:.6f}")
        sys.stdout.flush()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
