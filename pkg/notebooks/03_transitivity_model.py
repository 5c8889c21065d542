"""
How many loops are enough?
==========================

If each independent cycle of the graph acted as a uniform random
permutation, the chance that j cycles connect all d solutions is the exact
rational number t_d(j).  Monte Carlo sampling of permutations agrees with it.
"""

import numpy as np

from monodromy import stats

print(" d    j=2         j=3         j=4         E[X_d]")
for d in (1, 2, 3, 4, 5, 10, 20, 30):
    row = [float(stats.transitivity_probability(d, j)) for j in (2, 3, 4)]
    print(f"{d:2d}  " + "  ".join(f"{v:.8f}" for v in row)
          + f"  {stats.expected_betti(d).value:.8f}")

# Exact values stay exact.
print("t_3(2) =", stats.transitivity_probability(3, 2))

rng = np.random.default_rng(0)
for d in (2, 10):
    mc = stats.simulate_transitivity(d, 2, 100_000, rng)
    print(f"d={d}: simulated {mc:.4f}, exact {float(stats.transitivity_probability(d, 2)):.4f}")

# The naive one-point strategy is a coupon collector.
d = 100
print("naive strategy, d=100: simulated", stats.simulate_naive_strategy(d, 2000, rng),
      "expected", stats.coupon_collector_expected(d))
