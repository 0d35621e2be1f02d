"""Weighted averages on the integer lattice and the two maximal functions.

For a point mass the maximal function decays like 1/S_K away from the mass,
and the level set {M phi > 1} stays comparable to the mass of phi.
"""
import numpy as np

from primeomega import build_weight_table, dyadic_maximal, level_set_report, sup_maximal
from primeomega.maximal import corpus_member, maximal_profile, select_bounded_overlap, weak_type_sweep

table = build_weight_table(2**20, "big")

delta = corpus_member("delta:50", start=0)
print("j     full     dyadic")
for j in (-1, -2, -5, -10, -50, -100):
    print(f"{j:<6d}{sup_maximal(delta, j, table):<9.4f}{dyadic_maximal(delta, j, table):.4f}")

ind = corpus_member("indicator:64:2", start=0)
prof = maximal_profile(ind, table, -200, 62)
print("\nindicator of height 2 on 64 points: full maximal function exceeds 1 on",
      int(np.count_nonzero(prof.full > 1)), "points")

print("\nweak-type ratio lambda * count / |phi|_1 at lambda = 1")
for spec, s, r in weak_type_sweep(["delta:50", "random:0.01:0"], [2**10, 2**12, 2**14], 1.0, table):
    print(f"  {spec:<15s}{s:>7d}{r.ratio:9.4f}")

rep = level_set_report(corpus_member("random:0.1:3", length=4096), 0.5, table, "dyadic")
print(f"\ndyadic level set at 0.5 for a random input: {rep.level_count} points, ratio {rep.ratio:.4f}")

family = [(0, 10), (3, 12), (5, 20), (11, 14), (18, 30)]
print("\nbounded-overlap subfamily of", family, "->", list(select_bounded_overlap(family)))
