# %% [markdown]
# # Thresholds
#
# lambda_{k+1,k+2} is where p_{k+2} overtakes p_{k+1}. It sits just above
# 9/(4k-1) and below 4/(k+1).

# %%
from poisson_order_k import sweep

print("  k  lambda_k1k2     9/(4k-1)       gap")
for ts in sweep(2, 12):
    print(f"{ts.k:3d}  {ts.lambda_k1k2:.9f}  {ts.bound_sufficient:.9f}  {ts.difference:.3e}")

# %% [markdown]
# r_k and t_k are where p_k reaches 1 and 2.

# %%
for ts in sweep(2, 6):
    print(f"k={ts.k}  r={ts.r_k:.10f}  t={ts.t_k:.10f}")
