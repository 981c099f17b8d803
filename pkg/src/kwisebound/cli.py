"""Command line front end: compute, scan, poly, verify, sample.

Exit codes: 0 success, 1 usage or input error, 2 internal consistency
failure, 3 resource budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import List, Optional

import mpmath

from . import suites
from .exact_core import BinomialSpec, KwiseError, format_rational, parse_rational
from .extremal import (
    DEFAULT_MAX_CANDIDATES,
    BudgetExceeded,
    ConsistencyError,
    compute_M_dual_search,
    compute_M_primal,
    odd_reduction,
    verify_certificate,
)
from .kwise_dist import lift_to_joint, sample
from .relaxed import sandwich_report

EXIT_OK, EXIT_USAGE, EXIT_INCONSISTENT, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _p_arg(text: str) -> Fraction:
    try:
        p = parse_rational(text)
    except (KwiseError, TypeError) as exc:
        raise argparse.ArgumentTypeError(str(exc))
    if not 0 < p < 1:
        raise argparse.ArgumentTypeError(f"p must lie strictly between 0 and 1, got {text}")
    return p


def _int_list(text: str) -> List[int]:
    """'3,4,7' or '3-6' or a mix like '2-4,10'."""
    out = []
    for part in filter(None, (s.strip() for s in text.split(","))):
        if "-" in part:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return out


def _p_list(text: str) -> List[Fraction]:
    return [_p_arg(s) for s in filter(None, (t.strip() for t in text.split(",")))]


def _threads(args) -> int:
    if getattr(args, "threads", None):
        return max(1, args.threads)
    env = os.environ.get("KWISE_THREADS")
    return max(1, int(env)) if env and env.isdigit() else 1


def _emit(text: str, out: Optional[str]):
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _check_nk(n: int, k: int):
    if n < 1:
        raise UsageError("n must be positive")
    if k < 1:
        raise UsageError("k must be positive")
    if k > n:
        raise UsageError("k exceeds n")


def _certificate(spec, k, method, budget, workers):
    if k % 2:
        if method == "dual":
            return odd_reduction(spec, k, method="dual", max_candidates=budget, workers=workers)
        return odd_reduction(spec, k)
    if method == "dual":
        return compute_M_dual_search(spec, k, budget, workers)
    return compute_M_primal(spec, k)


def cmd_compute(args) -> int:
    _check_nk(args.n, args.k)
    spec = BinomialSpec(args.n, args.p)
    workers = _threads(args)
    if args.method in ("dual", "both") and args.k % 2 == 0 and args.k > args.n - 1:
        raise UsageError(f"dual root-pair search needs k <= n - 1 (k={args.k}, n={args.n})")
    if args.method == "both":
        primal = _certificate(spec, args.k, "primal", args.max_candidates, workers)
        dual = _certificate(spec, args.k, "dual", args.max_candidates, workers)
        if primal.value != dual.value:
            raise ConsistencyError(f"primal {primal.value} != dual {dual.value}")
        checks = verify_certificate(primal)
        dual_checks = verify_certificate(dual)
        doc = primal.to_json(checks)
        doc["method"] = "both"
        doc["dual_search"] = {
            "dual_zeros": list(dual.dual_zeros),
            "dual_coeffs": [format_rational(c) for c in dual.dual_poly.coeffs],
            "support": list(dual.distribution.support),
            "masses": [format_rational(m) for m in dual.distribution.masses],
            "degenerate": dual.degenerate,
            "checks": dual_checks,
        }
        all_checks = list(checks.values()) + list(dual_checks.values())
    else:
        cert = _certificate(spec, args.k, args.method, args.max_candidates, workers)
        checks = verify_certificate(cert)
        doc = cert.to_json(checks)
        all_checks = list(checks.values())
    _emit(json.dumps(doc, indent=2) + "\n", args.out)
    return EXIT_OK if all(all_checks) else EXIT_INCONSISTENT


def _dec(q) -> str:
    return mpmath.nstr(mpmath.mpf(q.numerator) / q.denominator, 15) if q is not None else ""


def _scan_row(job):
    n, k, p, budget = job
    row = {"n": n, "k": k, "p": format_rational(p), "M": "", "M_tilde": "", "ratio": "",
           "degenerate": "", "regime": "", "status": "ok"}
    vals = {"M": None, "M_tilde": None, "ratio": None}
    try:
        if k < 1 or k > n:
            raise KwiseError("k exceeds n" if k > n else "k must be positive")
        spec = BinomialSpec(n, p)
        cert = compute_M_primal(spec, k)
        row["M"] = format_rational(cert.value)
        row["degenerate"] = "true" if cert.degenerate else "false"
        vals["M"] = cert.value
        if k % 2 == 0:
            rep = sandwich_report(spec, k, cert.value, cert.degenerate)
            row.update(M_tilde=format_rational(rep.M_tilde), ratio=format_rational(rep.ratio), regime=rep.regime)
            vals.update(M_tilde=rep.M_tilde, ratio=rep.ratio)
        else:
            row["status"] = "ok: no closed-form M_tilde for odd k"
    except (KwiseError, ConsistencyError, BudgetExceeded) as exc:
        row["status"] = f"error: {exc}"
    return row, vals


def cmd_scan(args) -> int:
    ns, ks, ps = args.n, args.k, args.p
    if not ns or not ks or not ps:
        raise UsageError("scan ranges must be nonempty")
    jobs = [(n, k, p, args.max_candidates) for n in ns for k in ks for p in ps]
    workers = _threads(args)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_scan_row, jobs))
    else:
        results = [_scan_row(j) for j in jobs]
    cols = ["n", "k", "p", "M", "M_tilde", "ratio", "degenerate", "regime", "status"]
    if args.decimal:
        cols += ["M_decimal", "M_tilde_decimal", "ratio_decimal"]
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
    writer.writeheader()
    for row, vals in results:
        if args.decimal:
            with mpmath.workprec(256):
                row["M_decimal"] = _dec(vals["M"])
                row["M_tilde_decimal"] = _dec(vals["M_tilde"])
                row["ratio_decimal"] = _dec(vals["ratio"])
        writer.writerow(row)
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def cmd_poly(args) -> int:
    _check_nk(args.n, args.k)
    if args.samples < 2:
        raise UsageError("need at least 2 samples")
    spec = BinomialSpec(args.n, args.p)
    if args.k % 2 == 0 and args.k <= args.n - 1:
        cert = compute_M_dual_search(spec, args.k, args.max_candidates, _threads(args))
    else:
        cert = compute_M_primal(spec, args.k)
    P = cert.dual_poly
    buf = io.StringIO()
    buf.write("# zeros: " + " ".join(str(z) for z in cert.dual_zeros) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["x", "P"])
    last = args.samples - 1
    for i in range(args.samples):
        x = Fraction(args.n * i, last)
        writer.writerow([format_rational(x), format_rational(P(x))])
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return format_rational(obj)
    if isinstance(obj, mpmath.mpf):
        return mpmath.nstr(obj, 30)
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    return obj


def cmd_verify(args) -> int:
    name = args.suite
    if name not in suites.SUITES:
        raise UsageError(f"unknown suite {name!r}; choose from {', '.join(sorted(suites.SUITES))}")
    kw = {}
    if name == "chebyshev":
        kw = {"max_m": args.max_m or 40, "max_d": args.max_d or 10, "samples": args.samples, "seed": args.seed}
    elif name == "perturbation":
        kw = {"max_n": args.max_n or 60, "configs_per_cell": args.configs_per_cell, "seed": args.seed}
        if args.ks:
            kw["ks"] = args.ks
        if args.ps:
            kw["ps"] = args.ps
    elif name == "probshift":
        kw = {"max_n": args.max_n or 200}
        if args.ps:
            kw["ps"] = args.ps
    elif name == "duality":
        kw = {"max_n": args.max_n or 14, "workers": _threads(args)}
        if args.ks:
            kw["ks"] = args.ks
        if args.ps:
            kw["ps"] = args.ps
    elif name == "kwise":
        kw = {"max_n": args.max_n or 10}
        if args.ks:
            kw["ks"] = args.ks
        if args.ps:
            kw["ps"] = args.ps
    elif name == "relaxed":
        if args.ks:
            kw["ks"] = args.ks
        if args.ps:
            kw["ps"] = args.ps
    records = suites.SUITES[name](**kw)
    _emit(json.dumps(_jsonable(records), indent=1) + "\n", args.out)
    return EXIT_OK if suites.all_pass(records) else EXIT_INCONSISTENT


def cmd_sample(args) -> int:
    _check_nk(args.n, args.k)
    if args.count < 1:
        raise UsageError("count must be positive")
    cert = compute_M_primal(BinomialSpec(args.n, args.p), args.k)
    lines = sample(lift_to_joint(cert.distribution), args.seed, args.count)
    _emit("".join(b + "\n" for b in lines), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kwisebound", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, nkp=True):
        if nkp:
            sp.add_argument("--n", type=int, required=True)
            sp.add_argument("--k", type=int, required=True)
            sp.add_argument("--p", type=_p_arg, required=True, help="exact rational, e.g. 1/2 or 0.3")
        sp.add_argument("--out", help="write to this file instead of stdout")
        sp.add_argument("--threads", type=int, default=None, help="worker cap (default: $KWISE_THREADS or 1)")
        sp.add_argument("--max-candidates", type=int, default=DEFAULT_MAX_CANDIDATES)

    sp = sub.add_parser("compute", help="exact M(n,k,p) with certificate JSON")
    common(sp)
    sp.add_argument("--method", choices=("primal", "dual", "both"), default="primal")
    sp.set_defaults(func=cmd_compute)

    sp = sub.add_parser("scan", help="CSV of M, M~ and their ratio over parameter ranges")
    sp.add_argument("--n", type=_int_list, required=True, help="e.g. 3,4 or 3-10")
    sp.add_argument("--k", type=_int_list, required=True)
    sp.add_argument("--p", type=_p_list, required=True, help="comma separated rationals")
    sp.add_argument("--decimal", action="store_true", help="add 15-digit decimal columns")
    common(sp, nkp=False)
    sp.set_defaults(func=cmd_scan)

    sp = sub.add_parser("poly", help="optimal dual polynomial sampled on [0, n]")
    common(sp)
    sp.add_argument("--samples", type=int, default=401)
    sp.set_defaults(func=cmd_poly)

    sp = sub.add_parser("verify", help="run a property suite; JSON report")
    sp.add_argument("--suite", required=True)
    sp.add_argument("--max-m", type=int)
    sp.add_argument("--max-d", type=int)
    sp.add_argument("--max-n", type=int)
    sp.add_argument("--ks", type=_int_list)
    sp.add_argument("--ps", type=_p_list)
    sp.add_argument("--configs-per-cell", type=int, default=200)
    sp.add_argument("--samples", type=int, default=500)
    sp.add_argument("--seed", type=int, default=0)
    common(sp, nkp=False)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("sample", help="bitstrings from the extremal k-wise independent law")
    common(sp)
    sp.add_argument("--count", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_sample)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, KwiseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ConsistencyError as exc:
        print(f"consistency failure: {exc}", file=sys.stderr)
        return EXIT_INCONSISTENT


if __name__ == "__main__":
    sys.exit(main())
