# %% [markdown]
# Finite fields and subspace enumeration
#
# Fields up to order 9 are small lookup tables. Subspaces are stored by their
# reduced row echelon basis, which makes equality and hashing trivial and gives
# a platform-independent enumeration order.

# %%
from qekr.gfq import make_field
from qekr.grassmann import count_disjoint, grassmannian, meet_dim, rref_canonical

F4 = make_field(4)
print(F4.describe())
print("x * (x+1) =", F4.mul_(2, 3))

F9 = make_field(9)
print("x * x in GF(9) =", F9.mul_(3, 3))

# %%
S = rref_canonical([(1, 1, 0), (0, 1, 1)], make_field(2))
print(S, S.pivots)

# %%
G = grassmannian(7, 3, 2)
print(G, G[0], G[len(G) - 1])

# %% [markdown]
# Two subspaces meet trivially iff they share no point, so the point incidence
# matrix answers all meet questions with one sparse product.

# %%
lines = grassmannian(4, 2, 3)
print(meet_dim(lines[0], lines[1]), meet_dim(lines[0], lines[-1]))

Z = rref_canonical([(1, 0, 0, 0, 0), (0, 0, 1, 0, 0)], make_field(3))
count, report = count_disjoint(Z, 2)
print(count, report.details)
