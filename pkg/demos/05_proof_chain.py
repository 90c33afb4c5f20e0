# %% [markdown]
# Coefficient inequalities behind the degree bound
#
# The argument reduces to inequalities between explicit rational coefficients.
# Each is checked exactly on a grid of parameters; a sweep returns one report
# per tuple and a CSV summary.

# %%
from qekr.proofchain import (
    appendix_tasks,
    check_factorization,
    coefficients,
    final_counting_bound,
    summarize,
    sweep,
    sweep_csv,
)

cs = coefficients(7, 3, 2, 2)
print("a:", [str(x) for x in cs.a])
print("b:", [str(x) for x in cs.b])

# %%
print(check_factorization(7, 3, 2, 2).details)
print(final_counting_bound(7, 3, 2, 2).details)

# %%
reports = sweep(appendix_tasks((2, 3), k_max=5, n_max=14))
print(summarize(reports))
print(sweep_csv(reports[:5]))
