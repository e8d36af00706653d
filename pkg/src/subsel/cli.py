"""Command-line entry point: ``subsel {select,bound,sweep,verify,identity-check}``.

Exit codes: 0 success, 1 verification failure, 2 usage or input error,
3 internal numeric error.  Reports go to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import math
import sys
import time

import numpy as np

from . import bounds
from .expected import FamilyParams, g_empty, g_empty_bernstein, knh_identity_check
from .formats import InputError, bounds_csv, dump_json, g17, load_json, read_matrix
from .linalg import TargetMatrix
from .poly import PolynomialError, real_roots
from .selector import (
    DEFAULT_EPSILON,
    SelectionError,
    SelectionResult,
    select_brute_force,
    select_interlacing,
    verify_certificate,
)

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _err(msg: str):
    print(f"subsel: {msg}", file=sys.stderr)


def _parse_range(spec: str) -> range:
    parts = spec.split(":")
    try:
        if len(parts) == 1:
            lo = hi = int(parts[0])
        elif len(parts) == 2:
            lo, hi = int(parts[0]), int(parts[1])
        else:
            raise ValueError
    except ValueError:
        raise UsageError(f"bad range {spec!r}, expected 'a:b' or 'a'") from None
    if lo > hi:
        raise UsageError(f"range {spec!r} is empty")
    return range(lo, hi + 1)


def parse_grid(spec: str) -> tuple:
    """``"m0:m1,n0:n1,k0:k1"`` to three inclusive ranges."""
    parts = spec.split(",")
    if len(parts) != 3:
        raise UsageError(f"grid {spec!r} needs three comma-separated ranges")
    return tuple(_parse_range(p.strip()) for p in parts)


def _load_matrix(args) -> np.ndarray:
    if args.input:
        return read_matrix(args.input)
    if getattr(args, "random", None):
        try:
            n, m = (int(v) for v in args.random.lower().split("x"))
        except ValueError:
            raise UsageError(f"--random expects NxM, got {args.random!r}") from None
        rng = np.random.default_rng(args.seed)
        return rng.standard_normal((n, m))
    raise UsageError("an --input matrix is required")


def select_report(A: np.ndarray, k: int, epsilon: float) -> dict:
    t0 = time.perf_counter()
    res = select_interlacing(TargetMatrix(A), k, epsilon)
    rep = res.to_dict()
    rep.update(
        m=A.shape[1],
        n=A.shape[0],
        k=k,
        sigma_min=math.sqrt(res.sigma_min_sq),
        wall_time_ms=(time.perf_counter() - t0) * 1e3,
    )
    return rep


def cmd_select(args) -> int:
    A = _load_matrix(args)
    if args.k is None:
        raise UsageError("--k is required")
    if not 1 <= args.k <= A.shape[1]:
        raise UsageError(f"k = {args.k} infeasible for a matrix with {A.shape[1]} columns")
    if not 0 < args.epsilon < 1 / args.k:
        raise UsageError("epsilon must lie in (0, 1/k)")
    rep = select_report(A, args.k, args.epsilon)
    if args.format == "plain":
        for key in ("subset", "sigma_min", "sigma_min_sq", "root_certificate", "bound_certificate",
                    "alpha", "alpha_branch", "epsilon", "wall_time_ms"):
            v = rep[key]
            print(f"{key}: {g17(v) if isinstance(v, float) else v}")
    elif args.format == "csv":
        print("subset,sigma_min,sigma_min_sq,root_certificate,bound_certificate,alpha")
        print(";".join(map(str, rep["subset"])) + "," + ",".join(
            g17(rep[k]) for k in ("sigma_min", "sigma_min_sq", "root_certificate", "bound_certificate", "alpha")))
    else:
        print(dump_json(rep))
    return EXIT_OK


def _need_mnk(args):
    if args.m is None or args.n is None or args.k is None:
        raise UsageError("--m, --n and --k are required")
    return args.m, args.n, args.k


def cmd_bound(args) -> int:
    m, n, k = _need_mnk(args)
    rep = bounds.compare_report(m, n, k)
    if args.format == "csv":
        sys.stdout.write(bounds_csv([rep]))
    elif args.format == "plain":
        print(f"m={m} n={n} k={k}")
        print(f"alpha: {g17(rep.alpha)} ({rep.alpha_branch})")
        print(f"main_bound: {g17(rep.main_bound)}")
        if rep.explicit_bound is not None:
            print(f"explicit_bound: {g17(rep.explicit_bound)}")
        for name, v in rep.baselines.items():
            print(f"{name}: {g17(v)} (main > {name}: {str(rep.dominates[name]).lower()})")
    else:
        print(dump_json(rep.to_dict()))
    return EXIT_OK


def sweep_reports(grid) -> list:
    ms, ns, ks = grid
    out = []
    for m in ms:
        for n in ns:
            if n < 1 or m < n + 1:
                continue
            for k in ks:
                if 1 <= k <= m - 1:
                    out.append(bounds.compare_report(m, n, k))
    return out


def cmd_sweep(args) -> int:
    if not args.grid:
        raise UsageError("--grid is required")
    reports = sweep_reports(parse_grid(args.grid))
    if not reports:
        raise UsageError(f"grid {args.grid!r} contains no valid (m, n, k) with m >= n + 1, 1 <= k < m")
    if args.format == "json":
        print(dump_json([r.to_dict() for r in reports]))
    else:
        sys.stdout.write(bounds_csv(reports))
    return EXIT_OK


def _report_lines(lines, ok) -> int:
    for line in lines:
        print(line)
    print("ALL CHECKS PASSED" if ok else "VERIFICATION FAILED")
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_verify(args) -> int:
    A = _load_matrix(args)
    if args.report:
        try:
            with open(args.report) as fh:
                rep = load_json(fh.read())
            result = SelectionResult(
                subset=tuple(rep["subset"]),
                sigma_min_sq=float(rep["sigma_min_sq"]),
                root_certificate=float(rep.get("root_certificate", 0.0)),
                bound_certificate=float(rep.get("bound_certificate", 0.0)),
                epsilon=float(rep.get("epsilon", DEFAULT_EPSILON)),
            )
        except OSError as exc:
            raise InputError(str(exc)) from exc
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"bad report: {exc}") from exc
        verdict = verify_certificate(TargetMatrix(A), result)
        lines, ok = verdict.lines(), verdict.passed
        if "k" in rep and rep["k"] != len(result.subset):
            lines.append(f"FAIL report k: {rep['k']} vs subset size {len(result.subset)}")
            ok = False
        return _report_lines(lines, ok)
    if args.k is None:
        raise UsageError("verify needs --report or --k")
    T = TargetMatrix(A)
    res = select_interlacing(T, args.k, args.epsilon)
    verdict = verify_certificate(T, res)
    lines, ok = verdict.lines(), verdict.passed
    if math.comb(T.cols, args.k) <= 10**5:
        best = select_brute_force(T, args.k)
        good = best.sigma_min_sq >= res.sigma_min_sq - 1e-9
        lines.append(f"{'PASS' if good else 'FAIL'} brute-force optimum: {g17(best.sigma_min_sq)} vs {g17(res.sigma_min_sq)}")
        ok = ok and good
    return _report_lines(lines, ok)


def identity_checks(max_m: int) -> list:
    """(name, passed) for the exact polynomial identities up to ``max_m``."""
    out = []
    knh_bad = [(m, n, k) for m in range(1, max_m + 1) for n in range(1, m + 1) for k in range(n, m + 1)
               if not knh_identity_check(m, n, k)]
    out.append((f"derivative identity, 1 <= n <= k <= m <= {max_m}", not knh_bad, knh_bad[:5]))
    bern_bad, vieta_bad = [], []
    for m in range(2, max_m + 1):
        for n in range(1, m):
            for k in range(1, n + 1):
                P = FamilyParams(m, n, k)
                g = g_empty(P)
                if g != g_empty_bernstein(P):
                    bern_bad.append((m, n, k))
                if m >= n + k:
                    lam = np.array(real_roots(g).roots)
                    s0 = np.sum(1 / lam)
                    s1 = np.sum(1 / (1 - lam))
                    e0 = k * (m - k + 1) / (n - k + 1)
                    e1 = k * (m - k + 1) / (m - n - k + 1)
                    if abs(s0 - e0) > 1e-9 * e0 or abs(s1 - e1) > 1e-9 * e1:
                        vieta_bad.append((m, n, k))
    out.append((f"Bernstein form of g, m <= {max_m}", not bern_bad, bern_bad[:5]))
    out.append((f"reciprocal root sums of g, m <= {max_m}", not vieta_bad, vieta_bad[:5]))
    return out


def cmd_identity_check(args) -> int:
    results = identity_checks(args.max_m)
    lines = [f"{'PASS' if ok else 'FAIL'} {name}" + ("" if ok else f" first failures {bad}")
             for name, ok, bad in results]
    return _report_lines(lines, all(ok for _, ok, _ in results))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="subsel", description="Column subset selection maximizing sigma_min.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, formats=("json", "csv", "plain"), default="json"):
        sp.add_argument("--format", choices=formats, default=default)

    sp = sub.add_parser("select", help="pick k columns by interlacing-polynomial descent")
    sp.add_argument("--input", help="matrix file (CSV rows, or JSON {rows, cols, data})")
    sp.add_argument("--random", metavar="NxM", help="use a seeded Gaussian matrix instead of --input")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--k", type=int)
    sp.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    common(sp)
    sp.set_defaults(func=cmd_select)

    sp = sub.add_parser("bound", help="closed-form bounds for (m, n, k)")
    sp.add_argument("--m", type=int)
    sp.add_argument("--n", type=int)
    sp.add_argument("--k", type=int)
    common(sp)
    sp.set_defaults(func=cmd_bound)

    sp = sub.add_parser("sweep", help="bound table over a grid, one CSV row per (m, n, k)")
    sp.add_argument("--grid", help='"m0:m1,n0:n1,k0:k1", inclusive')
    common(sp, ("csv", "json"), "csv")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("verify", help="check a select report, or run and check a selection")
    sp.add_argument("--input")
    sp.add_argument("--random", metavar="NxM")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--report")
    sp.add_argument("--k", type=int)
    sp.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("identity-check", help="exact polynomial identity sweep")
    sp.add_argument("--max-m", type=int, default=12)
    sp.set_defaults(func=cmd_identity_check)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, InputError, bounds.DomainError) as exc:
        _err(str(exc))
        return EXIT_USAGE
    except (SelectionError, PolynomialError, ArithmeticError, np.linalg.LinAlgError) as exc:
        _err(f"numeric failure: {exc}")
        return EXIT_NUMERIC
    except ValueError as exc:
        _err(str(exc))
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
