# %% [markdown]
# The q-Kneser graph and its eigenprojectors
#
# Vertices are k-subspaces; edges join subspaces meeting trivially. The
# adjacency matrix is kept as an exact integer matrix M, with A = q^(-k^2) M.
# Projectors onto the eigenspaces come from Lagrange interpolation in M and
# are verified exactly (idempotent, orthogonal, summing to I, traces equal to
# the multiplicities).

# %%
from qekr.schemes import project, projector_set, spectrum, spectrum_report, sqnorm

for params in [(4, 2, 2), (5, 2, 2), (7, 3, 2)]:
    t = spectrum(*params)
    print(params, [str(x) for x in t.eigenvalues], t.multiplicities)

# %%
P = projector_set(5, 2, 2)
print(P.report.details["checks"])
print([P[i].trace() for i in range(3)])

# %% [markdown]
# Any vector splits into orthogonal components h = h_0 + h_1 + h_2; for a 0/1
# indicator, the squared norms add up to the number of ones.

# %%
h = [1 if i % 3 == 0 else 0 for i in range(155)]
parts = project(h, P)
norms = [sqnorm(p) for p in parts]
print(norms, sum(norms), sum(h))

# %%
# Above the dense budget only the formula table is checked
print(spectrum_report(7, 3, 2).status)
