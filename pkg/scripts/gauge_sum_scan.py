#!/usr/bin/env python3
"""Second-index estimates for (Euclidean plane + line) over mixed outer norms.

Sweeps the outer norm from the one-norm to the sup-norm through convex
mixtures with a p-norm component and records the second-index estimate of
the 3-D sum together with the sup-distance of the outer norm to the three
special norms.  Every such space has a one-dimensional skew-hermitian part
(the plane rotation), and none of the estimates should ever reach one.
Writes CSV to stdout.
"""

import argparse
import math
import sys

from numindex import (
    AbsoluteSum,
    Lp,
    estimate_second_index,
    gauge_distance,
    mixture_gauge,
    real_line,
)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--steps", type=int, default=9)
    ap.add_argument("--p", type=float, default=4.0, help="smooth mixture component")
    ap.add_argument("--budget", type=int, default=8000)
    ap.add_argument("--restarts", type=int, default=8)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    specials = {"one": Lp(1, 2), "euclid": Lp(2, 2), "sup": Lp(math.inf, 2)}
    print("weight_on_one,dist_one,dist_euclid,dist_sup,second_index")
    for k in range(args.steps):
        w = k / (args.steps - 1)
        outer = mixture_gauge([1.0, args.p], [w, 1.0 - w])
        dists = [gauge_distance(outer, s) for s in specials.values()]
        space = AbsoluteSum(outer, Lp(2, 2), real_line())
        est = estimate_second_index(
            space, restarts=args.restarts, budget=args.budget, seed=args.seed
        )
        print(f"{w:.3f}," + ",".join(f"{d:.4f}" for d in dists) + f",{est.value:.6f}")
        sys.stdout.flush()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
