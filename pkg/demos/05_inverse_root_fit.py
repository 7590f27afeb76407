# %% [markdown]
# # 1/lambda is nearly linear in k
#
# A least squares line through (k, 1/lambda_{k+1,k+2}). A thinned grid keeps
# this fast; the CLI runs the dense sweep.

# %%
from poisson_order_k import fit_inverse_root, select_ks, sweep

ks = select_ks(2, 2000, thin_above=100, n_log=60)
rows = sweep(2, 2000, ks=ks)
fit = fit_inverse_root([(r.k, r.lambda_k1k2) for r in rows])
print(f"alpha={fit.alpha:.9f} beta={fit.beta:.6f} over {fit.n_points} points")

# %%
for r, res in list(zip(rows, fit.residuals))[::15]:
    print(f"k={r.k:5d}  fit - 1/lambda = {res:+.3e}")
