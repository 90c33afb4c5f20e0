"""Command line entry point: ``qekr verify | family | cache``.

Exit codes: 0 when every check passes, 1 when any check fails, 2 for usage
errors, exceeded limits and malformed input files.
"""

from __future__ import annotations

import argparse
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from itertools import product
from pathlib import Path
from typing import Sequence

from . import cache, families, proofchain, qarith, schemes
from .gfq import make_field
from .grassmann import DEFAULT_CAP, CapExceeded, grassmannian, rref_canonical
from .report import Report, dump_reports, jsonable

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
DEFAULT_SEED = 0


class UsageError(ValueError):
    pass


def int_list(text: str) -> list[int]:
    """``"5"``, ``"2,3,4"`` or ``"4-6"`` (inclusive) to a sorted list of ints."""
    out: set[int] = set()
    try:
        for part in text.split(","):
            part = part.strip()
            if "-" in part:
                lo, hi = part.split("-", 1)
                lo_i, hi_i = int(lo), int(hi)
                if lo_i > hi_i:
                    raise argparse.ArgumentTypeError(f"empty range {part!r}")
                out.update(range(lo_i, hi_i + 1))
            else:
                out.add(int(part))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not an integer list or range: {text!r}") from exc
    return sorted(out)


def positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from exc
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


# output -------------------------------------------------------------------------


def reports_csv(reports: Sequence[Report]) -> str:
    return proofchain.sweep_csv(reports)


def reports_human(reports: Sequence[Report]) -> str:
    lines = []
    for r in reports:
        params = " ".join(f"{k}={v}" for k, v in sorted(r.params.items()) if v is not None)
        status = "" if r.status == "ok" else f" [{r.status}]"
        lines.append(f"{'PASS' if r.passed else 'FAIL'}  {r.check:<22} {params}{status}")
        if not r.passed and r.witness is not None:
            lines.append(f"      witness: {jsonable(r.witness)}")
        for note in r.notes:
            lines.append(f"      note: {note}")
    failed = sum(not r.passed for r in reports)
    lines.append(f"{len(reports) - failed}/{len(reports)} checks passed")
    return "\n".join(lines) + "\n"


def emit(reports: list[Report], args: argparse.Namespace) -> int:
    if args.format == "json":
        text = dump_reports(reports, timings=args.timings) + "\n"
    elif args.format == "csv":
        text = reports_csv(reports)
    else:
        text = reports_human(reports)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if getattr(args, "json_detail", None):
        Path(args.json_detail).write_text(dump_reports(reports, timings=args.timings) + "\n", encoding="utf-8")
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


# verify -------------------------------------------------------------------------


def _identities(n: int, k: int, q: int, seed: int, dense_budget: int) -> list[Report]:
    reports = [qarith.check_q_binomial_identities(m, q) for m in range(1, n + 1)]
    for d in range(1, n // 2 + 1):
        for r in range(d + 1):
            reports.append(qarith.check_e11(n, d, r, q))
    reports += schemes.identity_suite(n, k, q, seed=seed, dense_budget=dense_budget)
    return reports


def _spectrum(n: int, k: int, q: int, seed: int, dense_budget: int) -> list[Report]:
    return [schemes.spectrum_report(n, k, q, dense_budget)]


_SUITES = {"identities": _identities, "spectrum": _spectrum}


def _run_suite(job: tuple) -> list[Report]:
    name, n, k, q, seed, dense_budget = job
    return _SUITES[name](n, k, q, seed, dense_budget)


def _tuples(args: argparse.Namespace) -> list[tuple[int, int, int]]:
    out = []
    for n, k, q in product(args.n or [5], args.k or [2], args.q or [2]):
        if not 0 <= k <= n:
            raise UsageError(f"need 0 <= k <= n, got n={n} k={k}")
        if args.suite == "spectrum" and not n >= 2 * k >= 2:
            raise UsageError(f"spectrum needs n >= 2k >= 2, got n={n} k={k}")
        make_field(q)
        size = qarith.gauss_binom(n, k, q)
        # spectrum alone falls back to formula consistency, so only enumeration is capped
        if args.suite != "spectrum" and size > args.cap:
            raise CapExceeded(n, k, q, size, args.cap)
        out.append((n, k, q))
    return out


def cmd_verify(args: argparse.Namespace) -> int:
    jobs: list[tuple] = []
    if args.suite in ("identities", "spectrum", "all"):
        names = ["identities", "spectrum"] if args.suite == "all" else [args.suite]
        for n, k, q in _tuples(args):
            for name in names:
                if name == "spectrum" and not (n >= 2 * k >= 2):
                    continue
                jobs.append((name, n, k, q, args.seed, args.dense_budget))
    reports: list[Report] = []
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            for batch in pool.map(_run_suite, jobs):
                reports += batch
    else:
        for job in jobs:
            reports += _run_suite(job)
    if args.suite in ("appendix", "all"):
        qs = args.q or [2, 3, 4, 5]
        for q in qs:
            make_field(q)
        tasks = proofchain.appendix_tasks(qs, args.k_max, args.n_max)
        reports += proofchain.sweep(tasks, jobs=args.jobs)
    return emit(reports, args)


# family -------------------------------------------------------------------------


def _load_or_build_family(args: argparse.Namespace) -> families.Family:
    if args.file:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", families.FamilyFileWarning)
            F = families.load_family(args.file, cap=args.cap)
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
        return F
    if args.n is None or args.k is None or args.q is None:
        raise UsageError("--n, --k and --q are required with --pencil/--random")
    G = grassmannian(args.n, args.k, args.q, cap=args.cap)
    if args.pencil:
        if args.point:
            E = rref_canonical([int_list_plain(args.point)], G.field, args.n)
        else:
            E = grassmannian(args.n, 1, args.q, cap=args.cap)[0]
        return families.canonical_pencil(G, E)
    target = args.target if args.target is not None else len(G)
    return families.random_intersecting(G, args.seed, target)


def int_list_plain(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"--point must be comma-separated integers, got {text!r}") from exc


def cmd_family(args: argparse.Namespace) -> int:
    F = _load_or_build_family(args)
    if args.save:
        families.save_family(F, args.save)
    d = args.d if args.d is not None else max(1, F.k - 1)
    if not 1 <= d <= F.k:
        raise UsageError(f"need 1 <= d <= k, got d={d} k={F.k}")
    inter = families.intersecting_report(F)
    reports = [inter, families.degree_report(F, d)]
    if inter.passed:
        reports.append(families.check_bounds(F, d))
        if args.spectral and F.k > d:
            reports.append(families.check_e106(F, d))
            reports.append(families.hoffman_check(F, d, args.dense_budget))
            reports.append(families.lemma32_quantities(F, d, args.dense_budget))
    return emit(reports, args)


# cache --------------------------------------------------------------------------


def cmd_cache(args: argparse.Namespace) -> int:
    if args.action == "build":
        if None in (args.n, args.k, args.q):
            raise UsageError("cache build needs --n, --k and --q")
        path = cache.build(args.n, args.k, args.q, args.cache_dir, cap=args.cap)
        info = cache.inspect(path)
        print(f"{path}: {info['count']} records")
    elif args.action == "inspect":
        if None not in (args.n, args.k, args.q):
            paths = [cache.cache_path(args.n, args.k, args.q, args.cache_dir)]
        else:
            paths = cache.entries(args.cache_dir)
        for p in paths:
            if not p.exists():
                raise UsageError(f"no cache file {p}")
            try:
                info = cache.inspect(p)
            except cache.CacheError as exc:
                print(f"{p}: corrupt ({exc})")
                continue
            fields = " ".join(f"{k}={info[k]}" for k in ("format_version", "n", "k", "q", "modulus", "count", "digest_ok"))
            print(f"{p}: {fields}")
        if not paths:
            print(f"no cache files in {cache.cache_dir(args.cache_dir)}")
    else:
        print(f"removed {cache.clear(args.cache_dir)} file(s)")
    return EXIT_OK


# parser -------------------------------------------------------------------------


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("json", "csv", "human"), default="human")
    p.add_argument("--output", help="write the report here instead of stdout")
    p.add_argument("--timings", action="store_true", help="include elapsed_ms (breaks byte-identical output)")
    p.add_argument("--cap", type=positive_int, default=DEFAULT_CAP, help="max Grassmannian size")
    p.add_argument("--dense-budget", type=positive_int, default=schemes.DENSE_BUDGET,
                   help="max matrix extent for projector builds")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qekr", description="Exact checks for q-analogue EKR degree bounds.")
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run identity, spectrum and appendix suites")
    v.add_argument("suite", choices=("identities", "spectrum", "appendix", "all"))
    v.add_argument("--n", type=int_list, help="ambient dimension(s), e.g. 5 or 4-6")
    v.add_argument("--k", type=int_list)
    v.add_argument("--q", type=int_list)
    v.add_argument("--d", type=int_list, help="accepted for symmetry; suites cover all d")
    v.add_argument("--n-max", type=int, default=16, help="appendix grid: largest n")
    v.add_argument("--k-max", type=int, default=7, help="appendix grid: largest k")
    v.add_argument("--jobs", type=positive_int, default=1)
    v.add_argument("--json-detail", help="also write the JSON report here")
    _common(v)
    v.set_defaults(func=cmd_verify)

    f = sub.add_parser("family", help="check an intersecting family against the bounds")
    src = f.add_mutually_exclusive_group(required=True)
    src.add_argument("--pencil", action="store_true")
    src.add_argument("--random", action="store_true")
    src.add_argument("--file")
    f.add_argument("--n", type=int)
    f.add_argument("--k", type=int)
    f.add_argument("--q", type=int)
    f.add_argument("--d", type=int, help="degree dimension (default k-1)")
    f.add_argument("--point", help="pencil point as comma-separated field encodings")
    f.add_argument("--target", type=positive_int, help="random family size target (default [n k])")
    f.add_argument("--save", help="write the family file here")
    f.add_argument("--spectral", action="store_true", help="also run the spectral checks")
    _common(f)
    f.set_defaults(func=cmd_family)

    c = sub.add_parser("cache", help="manage the Grassmannian cache")
    c.add_argument("action", choices=("build", "inspect", "clear"))
    c.add_argument("--n", type=int)
    c.add_argument("--k", type=int)
    c.add_argument("--q", type=int)
    c.add_argument("--cap", type=positive_int, default=DEFAULT_CAP)
    c.add_argument("--cache-dir", help=f"overrides ${cache.CACHE_ENV}")
    c.set_defaults(func=cmd_cache)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, CapExceeded, schemes.OverBudget, families.FamilyFileError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except families.NotIntersecting as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
