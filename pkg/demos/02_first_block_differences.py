# %% [markdown]
# # Differences on the first block
#
# For n <= k every backward difference of order m < n is a positive
# polynomial in lambda. The report compares the stencil on an exact table
# with the closed form.

# %%
from poisson_order_k import Params, absolute_monotonicity_report

rep = absolute_monotonicity_report(Params(6, 1.5))
for cell in rep.cells:
    print(f"m={cell.m} n={cell.n}  {cell.delta_recursive:.12e}  rel err {cell.rel_err:.1e}")
print("all positive:", rep.all_positive, " worst rel err:", f"{rep.max_rel_err:.1e}")

# %% [markdown]
# Large orders in plain floating point lose everything to cancellation,
# which is why the report uses exact tables.

# %%
from poisson_order_k import difference, pmf_recurrence_table

params = Params(30, 3.0)
fl = pmf_recurrence_table(params, 30)
ex = pmf_recurrence_table(params, 30, exact=True)
print("float:", difference(fl, 29, 30), " exact:", difference(ex, 29, 30))
