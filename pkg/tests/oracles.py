"""Slow, independent reference implementations used only by the tests."""

from fractions import Fraction
from itertools import combinations, product


def gauss_binom_pascal(m, k, q):
    # q-Pascal: [m k] = [m-1 k-1] + q^k [m-1 k]
    if k < 0 or k > m:
        return 0
    row = [1]
    for mm in range(1, m + 1):
        new = [0] * (mm + 1)
        for kk in range(mm + 1):
            a = row[kk - 1] if kk >= 1 else 0
            b = row[kk] if kk < mm else 0
            new[kk] = a + q**kk * b
        row = new
    return row[k]


def prime_field_span(vectors, p, n):
    """All vectors in the span of ``vectors`` over GF(p), as a frozenset."""
    span = {tuple([0] * n)}
    for v in vectors:
        span = {tuple((a + c * b) % p for a, b in zip(s, v)) for s in span for c in range(p)}
    return frozenset(span)


def count_subspaces_bruteforce(n, k, p):
    """Distinct spans of k-sets of nonzero vectors that have dimension k (prime p only)."""
    vecs = [v for v in product(range(p), repeat=n) if any(v)]
    spans = {prime_field_span(c, p, n) for c in combinations(vecs, k)}
    return sum(1 for s in spans if len(s) == p**k)


def frac_matmul(A, B):
    return [[sum((A[i][t] * B[t][j] for t in range(len(B))), Fraction(0)) for j in range(len(B[0]))] for i in range(len(A))]


def frac_rank(A):
    M = [[Fraction(x) for x in row] for row in A]
    r = 0
    cols = len(M[0]) if M else 0
    for c in range(cols):
        piv = next((i for i in range(r, len(M)) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        for i in range(len(M)):
            if i != r and M[i][c] != 0:
                f = M[i][c] / M[r][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        r += 1
    return r


def poly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out
