"""Sums of products along permuted copies of a sequence never beat the sum of
powers. The exchange procedure shows why: each swap can only raise the sum."""
import numpy as np

from primeomega import PermutationSystem, swap_normalize, verify_inequality
from primeomega.rearrangement import exhaustive_check, random_system

sys = PermutationSystem((3, 1, 2, 0), [(0, 1, 2, 3), (2, 3, 1, 0), (1, 0, 3, 2)])
check = verify_inequality(sys)
print("product sum", check.lhs, "<= power sum", check.rhs, "slack", check.slack)

res = swap_normalize(sys)
print("sum after each exchange:", res.trace)
print("rows after normalization:", [res.final.row(k) for k in range(sys.K)])

rng = np.random.default_rng(1)
big_sys = random_system(rng, 10, 5)
print("random 10 x 5 system, exchanges needed:", swap_normalize(big_sys).swaps)

ex = exhaustive_check(4, 3, range(4))
print(f"every system with K <= 4, up to 3 permutations, entries 0..3: {ex.passed}/{ex.total} hold")
