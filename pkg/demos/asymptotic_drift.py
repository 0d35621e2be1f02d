"""How close the finite sums sit to their classical asymptotics.

Each diagnostic is the gap between a finite sum and its leading term. They
should settle down as K grows, slowly, since the scale is log log K.
"""
from primeomega import build_pair
from primeomega import asymptotics as asy

little, big = build_pair(10**6)
checkpoints = (10**2, 10**3, 10**4, 10**5, 10**6)

for name, fn in [
    ("S(K)/K - loglog K", asy.hardy_wright_drift),
    ("sum 1/p - loglog K", asy.mertens_drift),
    ("Norton ratio", asy.norton_ratio),
]:
    print(name)
    for table in (little, big):
        s = fn(table, checkpoints)
        print(f"  {table.kind.value:<12s}" + "".join(f"{v:10.5f}" for v in s.ratios))

ps = asy.power_sum_ratio(big, (16, 10**3, 10**6))
print("\nfitted constant in the power-sum bound:", round(ps.fitted, 4), "attained at K =", ps.argfit)

c = asy.dyadic_comparability(big, 2**19)
print(f"dyadic comparability up to K = 2**19: {c.constant:.6f} (attained at K = {c.argmax})")
