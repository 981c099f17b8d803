"""Property suites behind ``kwisebound verify``.

Each suite returns a list of ``{"check", "params", "pass"}`` records (some
carry an extra ``"value"``).  A suite passes iff every record passes.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction
from typing import Iterable, List, Sequence

import mpmath

from . import chebyshev as cheb
from . import perturbation_lab as lab
from .exact_core import BinomialSpec, expectation_int, format_rational, int_poly_from_roots
from .extremal import (
    compute_M_dual_search,
    compute_M_primal,
    verify_certificate,
    zeros_form_pairs,
)
from .kwise_dist import lift_to_joint, verify_kwise
from .relaxed import check_tilde_estimates, tilde_M

DEFAULT_PS = (Fraction(1, 2), Fraction(1, 3), Fraction(3, 10), Fraction(2, 3))
SHIFT_NS = (10, 20, 50, 100, 200)
SHIFT_PS = (Fraction(1, 2), Fraction(1, 3), Fraction(3, 10), Fraction(1, 10))


def _rec(check: str, params: dict, ok: bool, value=None) -> dict:
    out = {"check": check, "params": params, "pass": bool(ok)}
    if value is not None:
        out["value"] = value
    return out


def _p(p) -> str:
    return format_rational(p)


def all_pass(records: Iterable[dict]) -> bool:
    return all(r["pass"] for r in records)


def chebyshev_suite(max_m: int = 40, max_d: int = 10, samples: int = 500,
                    sup_max_m: int = 30, seed: int = 0) -> List[dict]:
    records = []
    for M in range(1, max_m + 1):
        dmax = min(max_d, M - 1)
        fam = cheb.ChebyshevFamily.build(M, dmax)
        vals = [fam.values(d) for d in range(dmax + 1)]
        for d, t in enumerate(fam.polys):
            records.append(_rec("leading_coefficient", {"M": M, "d": d},
                                t.degree == d and t.leading == math.comb(2 * d, d)))
            direct = sum(v * v for v in vals[d])
            records.append(_rec("norm_identity", {"M": M, "d": d},
                                direct == cheb.norm_squared_formula(M, d)))
            for e in range(d + 1, dmax + 1):
                ip = sum(a * b for a, b in zip(vals[d], vals[e]))
                records.append(_rec("orthogonality", {"M": M, "d": d, "d2": e}, ip == 0))
        for d in range(1, M // 2 + 1):
            records.append(_rec("bound_chain", {"M": M, "d": d}, cheb.check_bound_chain(M, d)))

    rng = random.Random(seed)
    for M in range(1, min(sup_max_m, max_m) + 1):
        for d in range(0, M // 2 + 1):
            ok = True
            bound = cheb.min_sup_bound(M, d)
            for _ in range(samples):
                roots = [rng.randint(-M, 2 * M) for _ in range(d)]
                sup = max(abs(math.prod(i - r for r in roots)) for i in range(M))
                if cheb.to_mpf(sup) < bound * (1 - cheb.GUARD):
                    ok = False
                    break
            records.append(_rec("monic_sup_bound", {"M": M, "d": d, "samples": samples}, ok))
    return records


def pointwise_ratio_suite(max_n: int = 60, ks: Sequence[int] = (2, 4, 6, 8),
                  configs_per_cell: int = 200, seed: int = 0) -> List[dict]:
    """Exact (g/f)^2 <= 4k at every non-zero integer of [0, n]."""
    rng = random.Random(seed)
    records = []
    for k in ks:
        h = k // 2
        for n in range(max(k, 2), max_n + 1):
            if n - h < h:
                continue
            bad = None
            four_k = 4 * k
            for _ in range(configs_per_cell):
                starts = lab.random_config(n, k, rng).starts
                for x in range(n + 1):
                    fx = gx = 1
                    for a in starts:
                        d = x - a
                        fx *= d * (d - 1)
                        gx *= d * d
                    if fx and gx * gx > four_k * fx * fx:
                        bad = (starts, x)
                        break
                if bad:
                    break
            records.append(_rec("pointwise_ratio_bound", {"n": n, "k": k, "configs": configs_per_cell},
                                bad is None, None if bad is None else {"starts": bad[0], "x": bad[1]}))
    return records


def perturbation_suite(max_n: int = 60, ks: Sequence[int] = (2, 4, 6, 8),
                       ps: Sequence = (Fraction(1, 2), Fraction(1, 3), Fraction(3, 10)),
                       configs_per_cell: int = 200, seed: int = 0,
                       witness_max_n: int = 50) -> List[dict]:
    records = pointwise_ratio_suite(max_n, ks, configs_per_cell, seed)
    rng = random.Random(seed + 1)
    worst = None
    for k in ks:
        for p in ps:
            for n in range(max(k, 2), max_n + 1):
                if n - k // 2 < k // 2:
                    continue
                spec = BinomialSpec(n, p)
                comp = lab.sandwich_comparator(spec, k)
                finite = True
                for _ in range(configs_per_cell):
                    cfg = lab.random_config(n, k, rng)
                    zs = cfg.zeros
                    ef = expectation_int(spec, int_poly_from_roots(zs))
                    eg = expectation_int(spec, int_poly_from_roots([a for a in cfg.starts for _ in (0, 1)]))
                    if ef <= 0:
                        finite = False
                        continue
                    if comp is not None:
                        m = lab.to_mpf(eg / ef) / comp
                        if worst is None or m > worst[0]:
                            worst = (m, n, k, _p(p), cfg.starts)
                records.append(_rec("expectation_ratio_finite", {"n": n, "k": k, "p": _p(p)}, finite))
    if worst is not None:
        records.append(_rec("expectation_ratio_measured_max",
                            {"n": worst[1], "k": worst[2], "p": worst[3], "starts": list(worst[4])},
                            True, mpmath.nstr(worst[0], 30)))

    # direct-sum cross-check and witness search on a smaller grid
    rng = random.Random(seed + 2)
    for k in ks:
        for p in ps:
            for n in range(max(k + 2, 6), min(max_n, witness_max_n) + 1, 4):
                spec = BinomialSpec(n, p)
                params = lab.WitnessSearchParams.for_instance(spec, k)
                cfg = lab.random_config(n, k, rng)
                pair = lab.build_pair(n, cfg)
                same = lab.ratio_expectations(spec, pair) == lab.ratio_expectations_direct(spec, pair)
                records.append(_rec("expectation_ratio_direct", {"n": n, "k": k, "p": _p(p),
                                                                  "starts": list(cfg.starts)}, same))
                ok = True
                for x in cfg.zeros:
                    w_all, r_all = lab.find_witness(spec, pair, x, mode="full")
                    try:
                        w_win, r_win = lab.find_witness(spec, pair, x, params)
                    except lab.NoWitness:
                        # window holds only zeros of f: outside the claims' hypotheses
                        w_win = r_win = None
                    if r_win is not None:
                        window = lab.witness_window(n, x, params)
                        if (w_all in window and r_all != r_win) or r_all > r_win:
                            ok = False
                    good = lab.check_good_w(pair, x, params)
                    ok = ok and good["pass"]
                records.append(_rec("witness_search", {"n": n, "k": k, "p": _p(p),
                                                       "starts": list(cfg.starts)}, ok))
                seg_ok = True
                for x in cfg.zeros:
                    for m in (1, 2, 3, 5, 8):
                        for side in ("right", "left"):
                            rep = lab.check_segment_claim(pair, x, m, 5, side)
                            if rep["applicable"] and not rep["pass"]:
                                seg_ok = False
                records.append(_rec("segment_claim", {"n": n, "k": k, "p": _p(p),
                                                      "starts": list(cfg.starts)}, seg_ok))
    return records


def probshift_suite(max_n: int = 200, ns: Sequence[int] = SHIFT_NS, ps: Sequence = SHIFT_PS) -> List[dict]:
    records = []
    for n in ns:
        if n > max_n:
            continue
        for p in ps:
            spec = BinomialSpec(n, p)
            if spec.N <= 0:
                records.append(_rec("prob_shift", {"n": n, "p": _p(p)}, True, "skipped: N <= 0"))
                continue
            for ell in lab.admissible_ells(spec):
                rep = lab.prob_shift_check(spec, ell)
                for side in ("up", "down"):
                    if rep[side]["applicable"]:
                        records.append(_rec(f"prob_shift_{side}", {"n": n, "p": _p(p), "ell": ell},
                                            rep[side]["pass"]))
    return records


def duality_suite(max_n: int = 14, ks: Sequence[int] = (2, 4, 6, 8), ps: Sequence = DEFAULT_PS,
                  workers: int = 1) -> List[dict]:
    """Primal LP vs root-pair search, certificates, pair structure, lift, sandwich."""
    records = []
    for n in range(2, max_n + 1):
        for k in ks:
            if k > n - 1:
                continue
            for p in ps:
                spec = BinomialSpec(n, p)
                params = {"n": n, "k": k, "p": _p(p)}
                primal = compute_M_primal(spec, k)
                dual = compute_M_dual_search(spec, k, workers=workers)
                records.append(_rec("primal_equals_dual", params, primal.value == dual.value,
                                    format_rational(primal.value)))
                records.append(_rec("certificate_primal", params, all(verify_certificate(primal).values())))
                records.append(_rec("certificate_dual", params, all(verify_certificate(dual).values())))
                records.append(_rec("root_pairs", params, zeros_form_pairs(dual.dual_zeros, k, n)))
                joint = lift_to_joint(dual.distribution)
                records.append(_rec("kwise_lift", params,
                                    verify_kwise(joint, k, p)["pass"] and joint.and_prob() == dual.value))
                records.append(_rec("M_le_tilde_M", params, primal.value <= tilde_M(spec, k)))
    return records


def relaxed_suite(ns: Sequence[int] = (20, 40, 100, 200), ks: Sequence[int] = (2, 4, 6, 8),
                  ps: Sequence = (Fraction(1, 2), Fraction(1, 3), Fraction(3, 10)),
                  slack=5) -> List[dict]:
    records = []
    for n in ns:
        for k in ks:
            for p in ps:
                spec = BinomialSpec(n, p)
                est = check_tilde_estimates(spec, k)
                params = {"n": n, "k": k, "p": _p(p)}
                if not est.in_regime:
                    records.append(_rec("tilde_estimate", params, True, "out-of-regime"))
                    continue
                records.append(_rec("tilde_estimate", params, est.holds(n, k, slack), mpmath.nstr(est.L, 30)))
                records.append(_rec("tilde_ge_pn", params, tilde_M(spec, k) >= spec.p**n))
    return records


def kwise_suite(max_n: int = 10, ks: Sequence[int] = (2, 4), ps: Sequence = DEFAULT_PS) -> List[dict]:
    records = []
    for n in range(2, max_n + 1):
        for k in ks:
            if k > n:
                continue
            for p in ps:
                cert = compute_M_primal(BinomialSpec(n, p), k)
                joint = lift_to_joint(cert.distribution)
                params = {"n": n, "k": k, "p": _p(p)}
                records.append(_rec("kwise_at_k", params, verify_kwise(joint, k, p)["pass"]))
                records.append(_rec("and_prob_equals_M", params, joint.and_prob() == cert.value))
                if k < n:
                    above = verify_kwise(joint, k + 1, p)["pass"]
                    # passing at k+1 is not a failure: it flags M(n,k) = M(n,k+1)
                    records.append(_rec("kwise_at_k_plus_1", params, True,
                                        "review: also (k+1)-wise" if above else "fails as expected"))
    return records


SUITES = {
    "chebyshev": chebyshev_suite,
    "perturbation": perturbation_suite,
    "probshift": probshift_suite,
    "duality": duality_suite,
    "relaxed": relaxed_suite,
    "kwise": kwise_suite,
}
