# %% [markdown]
# # Past the first block
#
# On [k+1, 2k] the pmf decreases and is concave for small lambda. At k = 10
# a local maximum appears once lambda is large enough.

# %%
from poisson_order_k import Params, pmf_recurrence_table, structure_report

for lam in (0.2, 0.3):
    rep = structure_report(Params(10, lam), cap=60)
    print(f"lam={lam}: decreasing block {rep.decreasing_on_block}, concave {rep.concave_on_block}, "
          f"first violation {rep.first_violation}")

# %%
p = pmf_recurrence_table(Params(10, 0.3), 25).as_array()
for n in range(8, 22):
    print(f"{n:2d} {p[n]:.6f} " + "#" * int(p[n] * 40))
