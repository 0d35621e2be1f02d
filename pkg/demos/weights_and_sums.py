"""Prime-divisor counts from the sieve and the partial sums built on them."""
import numpy as np

from primeomega import build_pair
from primeomega.weights import exp_sum, mertens_sum, power_sum

little, big = build_pair(10**6)

print("n   omega  Omega")
for n in (1, 2, 12, 360, 1024, 30030):
    print(f"{n:<6d}{little.g(n):>3d}{big.g(n):>7d}")

print()
print("K        S_omega(K)   S_Omega(K)   S/K (omega)  S/K (Omega)  loglog K")
for K in (10, 10**3, 10**6):
    print(f"{K:<9d}{little.S(K):<13d}{big.S(K):<13d}{little.S(K) / K:<13.4f}{big.S(K) / K:<13.4f}{np.log(np.log(K)):.4f}")

print()
print("sum of 1/p over p <= 1e6:", round(mertens_sum(10**6, big), 6))
print("sum of Omega(n)^3, n <= 1e6:", power_sum(10**6, 3, big))
print("sum of 1.9^Omega(n), n <= 1e6:", f"{exp_sum(10**6, 1.9, big):.6e}")
