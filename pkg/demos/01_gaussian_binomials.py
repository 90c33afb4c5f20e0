# %% [markdown]
# Gaussian binomials and q-series
#
# [m k]_q counts k-dimensional subspaces of GF(q)^m. Everything downstream is
# built from these integers, so they are computed exactly and checked against
# a brute-force subspace count and the q-Pascal recurrence.

# %%
from fractions import Fraction

from qekr.qarith import TruncatedSeries, bracket, check_e11, check_q_binomial_identities, gauss_binom

for q in (2, 3, 4):
    print(f"q={q}:", [gauss_binom(6, k, q) for k in range(7)])

# %%
# The q-bracket [x]_i = (q^x - 1)(q^(x-1) - 1)...(q^(x-i+1) - 1)
print(bracket(3, 2, 2), bracket(2, 2, 3))

# %% [markdown]
# The finite q-binomial theorem and its reciprocal series, checked through a
# truncation degree with exact rational coefficients.

# %%
report = check_q_binomial_identities(m=4, q=3, z=Fraction(2, 5), N=9)
print(report.passed, report.details["max_residual"])

one_minus_z = TruncatedSeries([1, -1], 8)
print(one_minus_z.reciprocal())

# %%
# A coefficient identity obtained by comparing two expansions
print(check_e11(6, 2, 0, 2).details)
