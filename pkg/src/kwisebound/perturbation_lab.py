"""Root-pair perturbation: f = prod (x-a)(x-a-1) versus g = prod (x-a)^2.

Collapsing each adjacent root pair of f into a double root gives g, which is
nonnegative on the whole real line.  This module measures how much the
Bin(n, p) expectation moves, checks the pointwise ratio bound g/f <= 2 sqrt(k)
away from the zeros of f, and searches for witness points w where f is large
relative to g at a zero x of f.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Tuple

import mpmath

from .exact_core import BinomialSpec, KwiseError, Polynomial, expectation
from .extremal import ConsistencyError, RootPairConfig
from .relaxed import DEFAULT_PREC, V, sandwich_comparator, to_mpf

GUARD = mpmath.mpf(10) ** -12


class NoWitness(LookupError):
    """No admissible w inside the search window."""


@dataclass(frozen=True)
class PerturbationPair:
    config: RootPairConfig
    f: Polynomial
    g: Polynomial

    @property
    def k(self) -> int:
        return self.config.k

    @property
    def starts(self) -> Tuple[int, ...]:
        return self.config.starts

    def f_at(self, x: int) -> int:
        return math.prod((x - a) * (x - a - 1) for a in self.starts)

    def g_at(self, x: int) -> int:
        return math.prod((x - a) ** 2 for a in self.starts)


def build_pair(n: int, config) -> PerturbationPair:
    if not isinstance(config, RootPairConfig):
        config = RootPairConfig(tuple(config))
    config.check_fits(n)
    f = Polynomial.from_roots(config.zeros)
    g = Polynomial.from_roots([a for a in config.starts for _ in range(2)])
    return PerturbationPair(config, f, g)


def random_config(n: int, k: int, rng: random.Random) -> RootPairConfig:
    """Uniform over valid configurations with starts in [0, n - 2]."""
    h = k // 2
    slots = n - h
    if slots < h:
        raise KwiseError(f"{h} root pairs do not fit below n={n}")
    b = sorted(rng.sample(range(slots), h))
    return RootPairConfig(tuple(bi + i for i, bi in enumerate(b)))


def ratio_expectations(spec: BinomialSpec, pair: PerturbationPair) -> Fraction:
    """E[g] / E[f] under Bin(n, p)."""
    ef = expectation(spec, pair.f)
    if ef <= 0:
        raise ConsistencyError("E[f] must be positive")
    return expectation(spec, pair.g) / ef


def ratio_expectations_direct(spec: BinomialSpec, pair: PerturbationPair) -> Fraction:
    pmf = spec.pmf_table
    xs = range(spec.n + 1)
    return sum(pmf[x] * pair.g_at(x) for x in xs) / sum(pmf[x] * pair.f_at(x) for x in xs)


def expectation_ratio_report(spec: BinomialSpec, pair: PerturbationPair, prec: int = DEFAULT_PREC) -> dict:
    ratio = ratio_expectations(spec, pair)
    comp = sandwich_comparator(spec, pair.k, prec)
    with mpmath.workprec(prec):
        measured = to_mpf(ratio) / comp if comp is not None else None
    return {"k": pair.k, "N": spec.N, "ratio": ratio, "comparator": comp, "measured": measured}


def pointwise_ratio(pair: PerturbationPair, x: int) -> Fraction:
    fx = pair.f_at(x)
    if fx == 0:
        raise KwiseError(f"x={x} is a zero of f; use the witness search instead")
    return Fraction(pair.g_at(x), fx)


def pointwise_ratio_within_bound(pair: PerturbationPair, x: int) -> bool:
    """(g(x)/f(x))^2 <= 4k in integer arithmetic; f(x) > 0 off its zeros."""
    fx = pair.f_at(x)
    return pair.g_at(x) ** 2 <= 4 * pair.k * fx * fx


def pointwise_ratio_check(pair: PerturbationPair, x: int) -> Fraction:
    r = pointwise_ratio(pair, x)
    if r * r > 4 * pair.k:
        raise ConsistencyError(f"g/f = {r} exceeds 2 sqrt(k) at x={x} for {pair.starts}")
    return r


@dataclass(frozen=True)
class WitnessSearchParams:
    tau: mpmath.mpf
    Z: int
    K: int

    @classmethod
    def make(cls, k: int, tau=None, Z: Optional[int] = None, prec: int = DEFAULT_PREC) -> "WitnessSearchParams":
        with mpmath.workprec(prec):
            tau = mpmath.exp(12) if tau is None else mpmath.mpf(tau) if not isinstance(tau, Fraction) else to_mpf(tau)
            if tau <= 4:
                raise KwiseError("tau must exceed 4")
            if Z is None:
                Z = int(mpmath.ceil(k / tau))
            if Z < 1:
                raise KwiseError("Z must be a positive integer")
            base = int(mpmath.floor(mpmath.log(tau) / 6))
            if base < 2:
                raise KwiseError("floor(log(tau)/6) must be at least 2 for K to exist")
            # smallest K >= 1 with base^((K-1)/2) >= k/Z, i.e. base^(K-1) Z^2 >= k^2
            K = 1
            while base ** (K - 1) * Z * Z < k * k:
                K += 1
            return cls(tau, Z, K)

    @classmethod
    def for_instance(cls, spec: BinomialSpec, k: int, prec: int = DEFAULT_PREC) -> "WitnessSearchParams":
        """tau = V(N/k)/100 when that reaches e^12, otherwise tau = e^12."""
        tau = None
        if spec.N > 0:
            with mpmath.workprec(prec):
                v = V(Fraction(spec.N) / k, prec)
                if v is not None and v / 100 >= mpmath.exp(12):
                    tau = v / 100
        return cls.make(k, tau, prec=prec)

    def reach(self) -> mpmath.mpf:
        return 9 * self.Z * self.tau**self.K


def witness_window(n: int, x: int, params: WitnessSearchParams) -> list:
    near = 3 * params.Z
    reach = params.reach()
    lo = max(0, int(mpmath.ceil(x - reach)))
    hi = min(n, int(mpmath.floor(x + reach)))
    return [w for w in range(lo, hi + 1) if abs(w - x) >= near]


def find_witness(spec: BinomialSpec, pair: PerturbationPair, x: int,
                 params: Optional[WitnessSearchParams] = None, mode: str = "window") -> Tuple[int, Fraction]:
    """w minimizing Pr[x] g(x) / (Pr[w] f(w)) with f(w) != 0.

    ``mode="window"`` searches 3Z <= |w - x| <= 9 Z tau^K inside [0, n];
    ``mode="full"`` searches all of [0, n] (including w = x).
    """
    n = spec.n
    if not 0 <= x <= n:
        raise KwiseError(f"x={x} outside [0, {n}]")
    if mode == "full":
        cands = range(n + 1)
    elif mode == "window":
        if params is None:
            params = WitnessSearchParams.for_instance(spec, pair.k)
        cands = witness_window(n, x, params)
    else:
        raise KwiseError(f"unknown search mode {mode!r}")
    pmf = spec.pmf_table
    num = pmf[x] * pair.g_at(x)
    best = None
    for w in cands:
        fw = pair.f_at(w)
        if fw == 0:
            continue
        r = num / (pmf[w] * fw)
        if best is None or r < best[1]:
            best = (w, r)
    if best is None:
        raise NoWitness(f"no w with f(w) != 0 in the window around x={x}")
    return best


def _between(z, lo, hi, lo_closed, hi_closed) -> bool:
    above = z >= lo if lo_closed else z > lo
    below = z <= hi if hi_closed else z < hi
    return above and below


def segment_zero_census(pair: PerturbationPair, x: int, m: int, tau) -> Tuple[int, int, int, int]:
    """Counts of zeros of f in [x+m, x+tau m), (x, x+m/tau), (x-tau m, x-m], (x-m/tau, x)."""
    if m < 1:
        raise KwiseError("m must be at least 1")
    tau = tau if isinstance(tau, (Fraction, mpmath.mpf)) else Fraction(tau)
    if tau <= 4:
        raise KwiseError("tau must exceed 4")
    zs = pair.config.zeros
    R_right = sum(_between(z, x + m, x + tau * m, True, False) for z in zs)
    L_right = sum(_between(z, x, x + m / tau, False, False) for z in zs)
    R_left = sum(_between(z, x - tau * m, x - m, False, True) for z in zs)
    L_left = sum(_between(z, x - m / tau, x, False, False) for z in zs)
    return R_right, L_right, R_left, L_left


def segment_claim_bound(k: int, tau, R: int, L: int, prec: int = DEFAULT_PREC) -> mpmath.mpf:
    """8 exp(12k/tau + 6R - L log tau)."""
    with mpmath.workprec(prec):
        t = to_mpf(tau) if isinstance(tau, Fraction) else mpmath.mpf(tau)
        return 8 * mpmath.exp(12 * k / t + 6 * R - L * mpmath.log(t))


def check_segment_claim(pair: PerturbationPair, x: int, m: int, tau, side: str = "right",
                        prec: int = DEFAULT_PREC) -> dict:
    """Few-zeros segment claim, with R and L taken from the zero census.

    When m >= 2R the claim promises an integer w in [x+2m, x+3m] (mirrored on
    the left) with g(x)/f(w) <= 8 exp(12k/tau + 6R - L log tau).  w is not
    restricted to [0, n].
    """
    R_r, L_r, R_l, L_l = segment_zero_census(pair, x, m, tau)
    R, L = (R_r, L_r) if side == "right" else (R_l, L_l)
    out = {"x": x, "m": m, "side": side, "R": R, "L": L, "applicable": m >= 2 * R}
    if not out["applicable"]:
        return out
    ws = range(x + 2 * m, x + 3 * m + 1) if side == "right" else range(x - 3 * m, x - 2 * m + 1)
    gx = pair.g_at(x)
    best = min((Fraction(gx, pair.f_at(w)) for w in ws if pair.f_at(w) != 0), default=None)
    bound = segment_claim_bound(pair.k, tau, R, L, prec)
    with mpmath.workprec(prec):
        out["ratio"] = best
        out["bound"] = bound
        out["pass"] = best is not None and to_mpf(best) <= bound * (1 + GUARD)
    return out


def check_good_w(pair: PerturbationPair, x: int, params: WitnessSearchParams,
                 prec: int = DEFAULT_PREC) -> dict:
    """Both-sided witness with 3Z <= |w - x| <= 9 Z tau^K and g(x)/f(w) <= 8 exp(12k/tau + 6Z).

    Scans outward from distance 3Z and stops at the first qualifying w; f grows
    without bound away from its roots, so the scan terminates.
    """
    gx = pair.g_at(x)
    reach = params.reach()
    with mpmath.workprec(prec):
        bound = 8 * mpmath.exp(12 * pair.k / params.tau + 6 * params.Z)
        out = {"x": x, "bound": bound}
        for side, sign in (("right", 1), ("left", -1)):
            dist = 3 * params.Z
            found = None
            while dist <= reach:
                w = x + sign * dist
                fw = pair.f_at(w)
                if fw and to_mpf(Fraction(gx, fw)) <= bound * (1 + GUARD):
                    found = w
                    break
                dist += 1
            out[side] = found
        out["pass"] = out["right"] is not None and out["left"] is not None
    return out


def prob_shift_check(spec: BinomialSpec, ell: int, prec: int = DEFAULT_PREC) -> dict:
    """Binomial shift estimates around mu = floor(pn).

    Pr[mu] <= exp(3 ell^2 / 2N) Pr[mu + ell]   when ell <= (n - mu)/2,
    Pr[mu] <= exp(8 ell^2 / N)  Pr[mu - ell]   when ell <= mu/2.
    """
    if ell < 1:
        raise KwiseError("ell must be at least 1")
    n, N = spec.n, spec.N
    mu = math.floor(spec.p * n)
    out = {"n": n, "p": spec.p, "ell": ell, "mu": mu}
    if N <= 0:
        out["up"] = out["down"] = {"applicable": False}
        return out
    pmf = spec.pmf_table
    with mpmath.workprec(prec):
        Nf = to_mpf(N)
        cases = (
            ("up", 2 * ell <= n - mu, mu + ell, 3 * mpmath.mpf(ell) ** 2 / (2 * Nf)),
            ("down", 2 * ell <= mu, mu - ell, 8 * mpmath.mpf(ell) ** 2 / Nf),
        )
        for name, ok, target, expo in cases:
            if not ok:
                out[name] = {"applicable": False}
                continue
            lhs = to_mpf(pmf[mu])
            rhs = mpmath.exp(expo) * to_mpf(pmf[target])
            out[name] = {"applicable": True, "lhs": lhs, "rhs": rhs, "pass": lhs <= rhs * (1 + GUARD)}
    return out


def admissible_ells(spec: BinomialSpec) -> Sequence[int]:
    mu = math.floor(spec.p * spec.n)
    top = max((spec.n - mu) // 2, mu // 2)
    return range(1, top + 1)
