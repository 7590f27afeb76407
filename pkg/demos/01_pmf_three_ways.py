# %% [markdown]
# # Scaled pmf, three ways
#
# p_n is a polynomial in lambda with nonnegative coefficients. We compute it
# with the recurrence, with the combinatorial sums and by enumerating
# compositions, and compare.

# %%
from poisson_order_k import Params, pmf_bruteforce, pmf_km_sum, pmf_recurrence_table

params = Params(k=3, lam=0.8)
table = pmf_recurrence_table(params, 15)

# %%
print(" n   recurrence           sums                 enumeration")
for n in range(16):
    print(f"{n:2d}  {table[n]:.15e}  {pmf_km_sum(params, n):.15e}  {pmf_bruteforce(params, n):.15e}")

# %% [markdown]
# Multiplying by exp(-k lam) turns the table into probabilities.

# %%
import math

from poisson_order_k import normalization_check

N, defect = normalization_check(params, 1e-12)
probs = pmf_recurrence_table(params, N).as_array() * math.exp(-params.k * params.lam)
print(f"mass up to n={N}: 1 - {defect:.2e}")
print(f"mean {sum(n * q for n, q in enumerate(probs)):.10f}  vs  k(k+1)lam/2 = {params.kappa() * params.lam:.10f}")
