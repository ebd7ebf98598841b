"""Coefficient at the median of the regression-model copula.

Prints the volume-method estimate, its convergence flag and the finite-t
ratios R(t) that lead to it, for each beta1.

    python3 scripts/regression_median.py [--betas 0,1,-1,2,-2,3,-3] [--trace]
"""

import argparse
import time

from quantdep.core import QuantilePoint
from quantdep.dependence import LimitSchedule, qdc_volume
from quantdep.registry import make_family

REFERENCE = {0: 0.1823, 1: 0.1795, 2: 0.3122, 3: 0.50}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--betas", default="0,1,-1,2,-2,3,-3")
    ap.add_argument("--max-steps", type=int, default=LimitSchedule().max_steps)
    ap.add_argument("--trace", action="store_true", help="print R(t) at every step")
    args = ap.parse_args()

    sched = LimitSchedule(max_steps=args.max_steps)
    pt = QuantilePoint(0.5, 0.5)
    print(f"{'beta1':>6} {'lambda':>9} {'ref':>7} {'conv':>5} {'secs':>6}")
    for b in (float(s) for s in args.betas.split(",")):
        start = time.perf_counter()
        est = qdc_volume(make_family("regression", {"beta0": 0.0, "beta1": b}), pt, sched=sched)
        ref = REFERENCE.get(abs(int(b)))
        print(f"{b:6g} {est.value:9.5f} {ref if ref is not None else '':>7} "
              f"{str(est.converged):>5} {time.perf_counter() - start:6.2f}")
        if args.trace:
            for t, r in est.trace:
                print(f"        t={t:.3e}  R={r:.6f}")


if __name__ == "__main__":
    main()
