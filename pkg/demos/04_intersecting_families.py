# %% [markdown]
# Intersecting families and their minimum degrees
#
# A point pencil (all k-subspaces through one point) is the extremal
# intersecting family. Its minimum d-degree equals [n-d-1 k-d-1], the largest
# value any intersecting family can have when n >= 2k+1.

# %%
from qekr.families import canonical_pencil, check_bounds, degree_profile, hoffman_check, random_intersecting
from qekr.grassmann import grassmannian

G = grassmannian(7, 3, 2)
pencil = canonical_pencil(G, grassmannian(7, 1, 2)[0])
prof = degree_profile(pencil, 2)
print(len(pencil), prof.delta, prof.witness)

# %%
print(check_bounds(pencil, 2).details["bounds"])

# %% [markdown]
# Random greedy families stay within the same bounds.

# %%
for seed in range(5):
    F = random_intersecting(G, seed, len(G))
    b = check_bounds(F, 2).details["bounds"]
    print(seed, len(F), b["delta_d"]["value"], b["size"]["slack"])

# %% [markdown]
# The spectral quantity -c|F| + sum_{i<=d} (c + lambda_i)||h_i||^2 equals minus
# a weighted sum of the components above d. For a pencil those components
# vanish, so the quantity is exactly 0 rather than negative; for the lines of
# a plane it is negative.

# %%
G5 = grassmannian(5, 2, 2)
for F in [canonical_pencil(G5, grassmannian(5, 1, 2)[0]), random_intersecting(G5, 2, 100)]:
    r = hoffman_check(F, 1)
    print(len(F), r.details["quantity"], r.details["tail_weight"], r.status)
