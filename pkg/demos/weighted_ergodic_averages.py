"""Omega-weighted time averages along three dynamical systems.

The weighted average of the indicator of [0, 1/2) along a golden rotation
converges to 1/2, but more slowly than the plain Birkhoff average, whose
error for this rotation is only of order log N / N.
"""
import numpy as np

from primeomega import BernoulliShift, Doubling, Rotation, build_weight_table
from primeomega.dynamics import CylinderIndicator, IntervalIndicator, convergence_report, starting_points

table = build_weight_table(10**6, "big")
checkpoints = [10**2, 10**3, 10**4, 10**5, 10**6]


def show(title, spec, obs, x0):
    r = convergence_report(spec, obs, x0, checkpoints, table)
    print(title)
    print("  K         weighted   unweighted")
    for K, w, u in zip(r.checkpoints, r.weighted, r.unweighted):
        print(f"  {K:<10d}{w:<11.2e}{u:.2e}")


x0 = starting_points(Rotation(), 1)[0]
show("golden rotation, indicator of [0, 1/2)", Rotation(), IntervalIndicator(0.0, 0.5), x0)
show("doubling map, indicator of [0.1, 0.35)", Doubling(seed=1), IntervalIndicator(0.1, 0.35), 0.3)
show("Bernoulli(0.3, 0.7), cylinder 101", BernoulliShift((0.3, 0.7), seed=0), CylinderIndicator((1, 0, 1)), 0)

errs = [convergence_report(Rotation(), IntervalIndicator(0.0, 0.5), x, [10**5], table) for x in starting_points(Rotation(), 16)]
ratio = np.median([e.weighted[0] / max(e.unweighted[0], 1e-300) for e in errs])
print(f"\nmedian weighted/unweighted error ratio over 16 starting points at K = 1e5: {ratio:.3g}")
