"""Coefficient algebra of the d-degree bound and the appendix inequalities.

Every quantity is an exact :class:`~fractions.Fraction`; every inequality is
decided by exact comparison.
"""

from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Callable, Iterable, Iterator

from .qarith import bracket, gauss_binom
from .report import Report, timed

G = gauss_binom


def _in_main_range(n: int, k: int, d: int) -> bool:
    return k > d >= 2 and n >= 2 * k + 1


@dataclass(frozen=True)
class CoefficientSet:
    n: int
    k: int
    d: int
    q: int
    a: tuple[Fraction, ...]
    b: tuple[Fraction, ...]
    c: Fraction
    f: Fraction
    g: Fraction

    @property
    def in_range(self) -> bool:
        return _in_main_range(self.n, self.k, self.d)


def hoffman_constant(n: int, k: int, d: int, q: int) -> Fraction:
    """``c = (q^k - q^d) / (q^n - q^k) [n-k k]``."""
    return Fraction(q**k - q**d, q**n - q**k) * G(n - k, k, q)


def a_coef(n: int, k: int, d: int, i: int, q: int) -> Fraction:
    return hoffman_constant(n, k, d, q) + (-1) ** i * Fraction(q) ** (comb(i, 2) - k * i) * G(n - k - i, k - i, q)


def b_coef(n: int, k: int, d: int, i: int, q: int) -> Fraction:
    return (
        (-1) ** i
        * Fraction(q) ** (k * i + (d - i) ** 2 - comb(i + 1, 2))
        * G(k - i, d - i, q)
        * G(n - d - i, d - i, q)
        * G(n - d - i, k - d, q)
    )


def coefficients(n: int, k: int, d: int, q: int) -> CoefficientSet:
    """``a_i, b_i`` for ``i = 0..d`` and the constants ``c, f, g``.

    Outside ``k > d >= 2, n >= 2k+1`` the values are still computed; inside it
    ``a_1 < 0`` and ``b_1 < 0`` are enforced.
    """
    if n < 2 * k or not (k > d >= 1):
        raise ValueError(f"need k > d >= 1 and n >= 2k, got n={n} k={k} d={d}")
    B = G(n - d - 1, k - d - 1, q)
    cs = CoefficientSet(
        n, k, d, q,
        a=tuple(a_coef(n, k, d, i, q) for i in range(d + 1)),
        b=tuple(b_coef(n, k, d, i, q) for i in range(d + 1)),
        c=hoffman_constant(n, k, d, q),
        f=Fraction(2 * q ** (d * d) * G(k, d, q) * G(n - d, d, q) * B),
        g=Fraction(q ** (d * d) * G(n, d, q) * G(n - d, d, q) * B * B),
    )
    if cs.in_range and not (cs.a[1] < 0 and cs.b[1] < 0):
        raise ArithmeticError(f"a_1={cs.a[1]}, b_1={cs.b[1]} not both negative at {n, k, d, q}")
    return cs


# appendix ---------------------------------------------------------------------


def S_i(n: int, k: int, d: int, i: int, q: int) -> Fraction:
    return Fraction(q) ** (comb(i, 2) - k * i + k) * Fraction(bracket(k - 1, i - 1, q), bracket(n - k - 1, i - 1, q))


def T_i(n: int, k: int, d: int, i: int, q: int) -> Fraction:
    return (
        Fraction(q) ** ((k - 2 * d) * (i - 1) + comb(i, 2))
        * bracket(d - 1, i - 1, q) ** 2
        * bracket(n - k - 1, i - 1, q)
        / (bracket(k - 1, i - 1, q) * bracket(n - d - 1, i - 1, q) ** 2)
    )


def alpha(n: int, k: int, i: int, q: int) -> Fraction:
    return Fraction(q) ** (comb(i, 2) - k * i + k) * Fraction(bracket(k - 1, i - 1, q), bracket(n - k - 1, i - 1, q))


def beta(n: int, d: int, i: int, q: int) -> Fraction:
    return Fraction(q) ** (comb(i, 2) - d * i + d) * Fraction(bracket(d - 1, i - 1, q), bracket(n - d - 1, i - 1, q))


@dataclass(frozen=True)
class AppendixQuantities:
    n: int
    k: int
    d: int
    i: int
    q: int
    S: Fraction
    T: Fraction
    alpha: Fraction
    beta: Fraction


def appendix_quantities(n: int, k: int, d: int, i: int, q: int) -> AppendixQuantities:
    return AppendixQuantities(n, k, d, i, q, S_i(n, k, d, i, q), T_i(n, k, d, i, q), alpha(n, k, i, q), beta(n, d, i, q))


def check_A1(n: int, k: int, d: int, i: int, q: int) -> Report:
    """Tail eigenvalue comparison: ``|lambda_i| <= |lambda_{d+1}| < c`` for ``i > d``."""
    report = Report("A1", {"n": n, "k": k, "d": d, "i": i, "q": q})
    with timed(report):
        if not (k >= i >= d + 1 and n >= 2 * k + 1 and d >= 0):
            raise ValueError(f"need k >= i >= d+1 and n >= 2k+1, got {report.params}")
        left = Fraction(q) ** (comb(i, 2) - k * i) * G(n - k - i, k - i, q)
        mid = Fraction(q) ** (comb(d + 1, 2) - k * (d + 1)) * G(n - k - d - 1, k - d - 1, q)
        right = hoffman_constant(n, k, d, q)
        report.require(left <= mid, "first inequality", left=left, mid=mid)
        report.require((left == mid) == (i == d + 1), "equality exactly at i = d+1", left=left, mid=mid)
        report.require(mid < right, "second inequality", mid=mid, right=right)
        report.details = {"lhs": left, "mid": mid, "rhs": right}
    return report


def check_A2(n: int, k: int, d: int, q: int) -> Report:
    """``b_0 - a_0 b_1 / a_1`` against its closed form."""
    report = Report("A2", {"n": n, "k": k, "d": d, "q": q})
    with timed(report):
        _require_main(n, k, d)
        cs = coefficients(n, k, d, q)
        lhs = cs.b[0] - cs.a[0] * cs.b[1] / cs.a[1]
        rhs = (
            Fraction(q ** (d * d) * (q ** (k - d) - 1) * (q**n - 1), (q**k - 1) * (q ** (n - d) - 1))
            * G(k, d, q) * G(n - d, k - d, q) * G(n - d, d, q)
        )
        report.residual_zero = lhs == rhs
        report.require(lhs == rhs, "closed form", lhs=lhs, rhs=rhs)
        report.details = {"lhs": lhs, "rhs": rhs}
    return report


def check_A3(n: int, k: int, d: int, q: int) -> Report:
    """``f - c b_1 / a_1`` against its closed form."""
    report = Report("A3", {"n": n, "k": k, "d": d, "q": q})
    with timed(report):
        _require_main(n, k, d)
        cs = coefficients(n, k, d, q)
        lhs = cs.f - cs.c * cs.b[1] / cs.a[1]
        poly = 2 * q ** (k + n - d) - q**n - q ** (n - d) - q**k - q ** (k - d) + 2
        rhs = (
            Fraction(q ** (d * d) * poly, (q**k - 1) * (q ** (n - d) - 1))
            * G(k, d, q) * G(n - d - 1, k - d - 1, q) * G(n - d, d, q)
        )
        report.residual_zero = lhs == rhs
        report.require(lhs == rhs, "closed form", lhs=lhs, rhs=rhs)
        report.details = {"lhs": lhs, "rhs": rhs}
    return report


def check_A4(n: int, k: int, d: int, i: int, q: int) -> Report:
    """``(q^k-1) S_i - (q^d-1) T_i < q^k - q^d`` plus the monotonicity facts used
    to reduce it to ``i = 3``, checked directly on this instance."""
    report = Report("A4", {"n": n, "k": k, "d": d, "i": i, "q": q})
    with timed(report):
        if not (3 <= i <= d < k and 2 * k <= n):
            raise ValueError(f"need 3 <= i <= d < k and 2k <= n, got {report.params}")
        aq = appendix_quantities(n, k, d, i, q)
        report.require(aq.S == aq.alpha, "S_i = alpha_i", S=aq.S, alpha=aq.alpha)
        report.require(aq.T == aq.beta**2 / aq.alpha, "T_i = beta_i^2 / alpha_i", T=aq.T)
        lhs = (q**k - 1) * aq.S - (q**d - 1) * aq.T
        rhs = Fraction(q**k - q**d)
        report.require(lhs < rhs, "main inequality", lhs=lhs, rhs=rhs)
        mono: dict[str, bool] = {}
        if i + 1 <= d:
            a0, a1 = aq.alpha, alpha(n, k, i + 1, q)
            b0, b1 = aq.beta, beta(n, d, i + 1, q)
            ratio = a1 / a0
            mono["alpha_ratio_closed_form"] = ratio == (1 - Fraction(q) ** (i - k)) / (q ** (n - k - i) - 1)
            mono["alpha_decreasing"] = ratio < 1
            mono["beta_over_alpha_decreasing"] = b1 / a1 < b0 / a0
            mono["gap_decreasing"] = a0 - b0 > a1 - b1
            for name, ok in mono.items():
                report.require(ok, name, alpha_i=a0, alpha_next=a1, beta_i=b0, beta_next=b1)
        report.details = {"lhs": lhs, "rhs": rhs, "monotonicity": mono}
    return report


def check_A5(n: int, k: int, d: int, i: int, q: int) -> Report:
    """``b_i < a_i b_1 / a_1``; records which parity branch the instance uses."""
    report = Report("A5", {"n": n, "k": k, "d": d, "i": i, "q": q})
    with timed(report):
        if not (2 <= i <= d < k and 2 * k <= n):
            raise ValueError(f"need 2 <= i <= d < k and 2k <= n, got {report.params}")
        a1, ai = a_coef(n, k, d, 1, q), a_coef(n, k, d, i, q)
        b1, bi = b_coef(n, k, d, 1, q), b_coef(n, k, d, i, q)
        lhs, rhs = bi, ai * b1 / a1
        report.require(lhs < rhs, "b_i < a_i b_1 / a_1", lhs=lhs, rhs=rhs)
        S, T = S_i(n, k, d, i, q), T_i(n, k, d, i, q)
        # exact identities turning the claim into a statement about S_i, T_i
        report.require(bi / -b1 == (-1) ** i * T, "b_i / (-b_1) = (-1)^i T_i")
        report.require(
            ai / -a1 == (q**k - q**d + (-1) ** i * (q**k - 1) * S) / (q**d - 1),
            "a_i / (-a_1) in terms of S_i",
        )
        branch = "even" if i % 2 == 0 else "odd"
        if branch == "even":
            report.require(S > T, "S_i > T_i", S=S, T=T)
        else:
            report.require((q**k - 1) * S - (q**d - 1) * T < q**k - q**d, "A4 inequality", S=S, T=T)
        report.details = {"lhs": lhs, "rhs": rhs, "branch": branch, "S": S, "T": T}
    return report


def _require_main(n: int, k: int, d: int) -> None:
    if not _in_main_range(n, k, d):
        raise ValueError(f"need k > d >= 2 and n >= 2k+1, got n={n} k={k} d={d}")


def check_factorization(n: int, k: int, d: int, q: int) -> Report:
    """The quadratic in ``x = |F|`` left after eliminating ``||h_1||^2``.

    ``(b_0 - a_0 b_1/a_1) x^2 / [n k] - (f - c b_1/a_1) x + g`` is compared
    coefficient by coefficient with ``sigma (x - [n-1 k-1]) (x - X)``, where
    ``X = [n-d-1 k-d-1] [n d] / [k d]`` and
    ``sigma = q^{d^2} [k d][n-d-1 k-d-1][n-d d] / [n-1 k-1]``.
    """
    report = Report("factorization", {"n": n, "k": k, "d": d, "q": q})
    with timed(report):
        _require_main(n, k, d)
        cs = coefficients(n, k, d, q)
        Nk = G(n, k, q)
        Y = G(n - 1, k - 1, q)
        X = Fraction(G(n - d - 1, k - d - 1, q) * G(n, d, q), G(k, d, q))
        sigma = Fraction(q ** (d * d) * G(k, d, q) * G(n - d - 1, k - d - 1, q) * G(n - d, d, q), Y)
        lhs = [
            cs.g,
            -(cs.f - cs.c * cs.b[1] / cs.a[1]),
            (cs.b[0] - cs.a[0] * cs.b[1] / cs.a[1]) / Nk,
        ]
        rhs = [sigma * Y * X, -sigma * (Y + X), sigma]
        for deg, (x, y) in enumerate(zip(lhs, rhs)):
            report.require(x == y, f"coefficient of x^{deg}", lhs=x, rhs=y)
        report.require(sigma > 0, "sigma > 0", sigma=sigma)
        # intermediate steps of the chain
        ratio = Fraction((q ** (k - d) - 1) * (q**n - 1), (q**k - 1) * (q ** (n - d) - 1))
        poly = 2 * q ** (k + n - d) - q**n - q ** (n - d) - q**k - q ** (k - d) + 2
        report.require(1 + ratio == Fraction(poly, (q**k - 1) * (q ** (n - d) - 1)), "1 + ratio step")
        report.require(Y * (1 + ratio) == Y + Nk * Fraction(q ** (k - d) - 1, q ** (n - d) - 1), "distribute [n-1 k-1]")
        report.require(Nk * Fraction(q ** (k - d) - 1, q ** (n - d) - 1) == X, "[n k](q^{k-d}-1)/(q^{n-d}-1) = X")
        report.residual_zero = report.passed
        report.details = {"lhs": lhs, "rhs": rhs, "sigma": sigma, "roots": [Y, X]}
    return report


def final_counting_bound(n: int, k: int, d: int, q: int) -> Report:
    """Closing step: ``|F| > X`` plus a positive factored quadratic forces ``|F| > [n-1 k-1]``.

    Records ``X = [n d][n-d-1 k-d-1]/[k d]`` and ``Y = [n-1 k-1]`` exactly.
    The implication only needs ``sigma > 0``; with ``X < Y`` the quadratic is
    positive on ``x < X`` and ``x > Y``, so ``x > X`` leaves ``x > Y``.
    """
    report = Report("final_counting_bound", {"n": n, "k": k, "d": d, "q": q})
    with timed(report):
        _require_main(n, k, d)
        X = Fraction(G(n, d, q) * G(n - d - 1, k - d - 1, q), G(k, d, q))
        Y = Fraction(G(n - 1, k - 1, q))
        sigma = Fraction(q ** (d * d) * G(k, d, q) * G(n - d - 1, k - d - 1, q) * G(n - d, d, q), Y)
        report.require(sigma > 0, "sigma > 0", sigma=sigma)
        report.require(X < Y, "X < [n-1 k-1]", X=X, Y=Y)
        # between the roots the quadratic is negative, so x > X cannot stop short of Y
        mid = (X + Y) / 2
        report.require(sigma * (mid - Y) * (mid - X) < 0, "quadratic negative between roots", x=mid)
        report.details = {"lhs": X, "rhs": Y, "relation": "<" if X < Y else (">" if X > Y else "=")}
    return report


# sweeps -----------------------------------------------------------------------

CSV_FIELDS = ["n", "k", "d", "i", "q", "check", "pass", "lhs", "rhs"]


def appendix_tasks(qs: Iterable[int] = (2, 3, 4, 5), k_max: int = 7, n_max: int = 16) -> list[tuple]:
    """Parameter tuples ``(check, n, k, d, i, q)`` of the appendix grid, sorted."""
    tasks = []
    for q in qs:
        for k in range(2, k_max + 1):
            for d in range(1, k):
                for n in range(2 * k, n_max + 1):
                    main = n >= 2 * k + 1
                    if main:
                        for i in range(d + 1, k + 1):
                            tasks.append(("A1", n, k, d, i, q))
                    if main and d >= 2:
                        tasks.append(("A2", n, k, d, None, q))
                        tasks.append(("A3", n, k, d, None, q))
                        tasks.append(("factorization", n, k, d, None, q))
                        tasks.append(("final_counting_bound", n, k, d, None, q))
                    for i in range(3, d + 1):
                        tasks.append(("A4", n, k, d, i, q))
                    for i in range(2, d + 1):
                        tasks.append(("A5", n, k, d, i, q))
    return sorted(tasks, key=lambda t: (t[5], t[2], t[3], t[1], t[0], t[4] or 0))


_CHECKS: dict[str, Callable[..., Report]] = {
    "A1": check_A1,
    "A2": check_A2,
    "A3": check_A3,
    "A4": check_A4,
    "A5": check_A5,
    "factorization": check_factorization,
    "final_counting_bound": final_counting_bound,
}


def run_task(task: tuple) -> Report:
    name, n, k, d, i, q = task
    fn = _CHECKS[name]
    return fn(n, k, d, i, q) if i is not None else fn(n, k, d, q)


def sweep(tasks: list[tuple], jobs: int = 1) -> list[Report]:
    """Run tasks (optionally in worker processes); order follows ``tasks``."""
    if jobs <= 1:
        return [run_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(run_task, tasks, chunksize=64))


def sweep_csv(reports: Iterable[Report]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for r in reports:
        p = r.params
        lhs, rhs = r.details.get("lhs"), r.details.get("rhs")
        w.writerow([p.get("n"), p.get("k"), p.get("d"), p.get("i", ""), p.get("q"), r.check,
                    int(r.passed), _fmt(lhs), _fmt(rhs)])
    return buf.getvalue()


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, list):
        return ";".join(_fmt(v) for v in x)
    return str(x)


def summarize(reports: list[Report]) -> dict[str, dict[str, int]]:
    out: dict[str, dict[str, int]] = {}
    for r in reports:
        s = out.setdefault(r.check, {"total": 0, "passed": 0})
        s["total"] += 1
        s["passed"] += int(r.passed)
    return dict(sorted(out.items()))


def iter_failures(reports: Iterable[Report]) -> Iterator[Report]:
    return (r for r in reports if not r.passed)
