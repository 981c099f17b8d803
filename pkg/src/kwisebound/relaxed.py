"""The relaxed bound M~(n, k, p) and its comparison with M(n, k, p).

Transcendental quantities (V, logs, exponentials) are evaluated with mpmath
at a configurable binary precision; probabilities stay exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import mpmath

from .exact_core import BinomialSpec, KwiseError, binomial_cdf
from .extremal import compute_M_primal

DEFAULT_PREC = 256
DEFAULT_SLACK = 5


def to_mpf(q) -> mpmath.mpf:
    q = Fraction(q)
    return mpmath.mpf(q.numerator) / q.denominator


def tilde_M(spec: BinomialSpec, k: int) -> Fraction:
    """p^n / P(Bin(n, 1 - p) <= k/2), for even k."""
    if k % 2 or k < 2:
        raise KwiseError(f"the closed form of M~ needs even k >= 2, got {k}")
    return spec.p**spec.n / binomial_cdf(spec.complement(), k // 2)


def V(a, prec: int = DEFAULT_PREC) -> Optional[mpmath.mpf]:
    """exp(sqrt(log a * log log a)); None unless a > e."""
    with mpmath.workprec(prec):
        a = to_mpf(a) if not isinstance(a, mpmath.mpf) else a
        if a <= mpmath.e:
            return None
        return +mpmath.exp(mpmath.sqrt(mpmath.log(a) * mpmath.log(mpmath.log(a))))


def sandwich_comparator(spec: BinomialSpec, k: int, prec: int = DEFAULT_PREC) -> Optional[mpmath.mpf]:
    """k * exp(k / V(N/k)), or None where V(N/k) is undefined."""
    N = spec.N
    if N <= 0:
        return None
    with mpmath.workprec(prec):
        v = V(Fraction(N) / k, prec)
        if v is None:
            return None
        return k * mpmath.exp(k / v)


def regime(spec: BinomialSpec, k: int, prec: int = DEFAULT_PREC) -> str:
    """Asymptotic regime tag for (N, k); definitions in the README."""
    N = spec.N
    if N <= 0 or V(Fraction(N) / k, prec) is None:
        return "outside"
    with mpmath.workprec(prec):
        logN = mpmath.log(to_mpf(N))
        if logN > 0 and k <= logN**2:
            return "polylog"
        if k <= mpmath.sqrt(to_mpf(N)):
            return "power"
        return "linear"


@dataclass
class TildeEstimate:
    L: mpmath.mpf
    upper_excess: mpmath.mpf  # L - k^2/(2n)
    in_regime: bool

    def holds(self, n: int, k: int, slack=DEFAULT_SLACK) -> bool:
        return -slack <= self.L <= mpmath.mpf(k * k) / (2 * n) + slack


def check_tilde_estimates(spec: BinomialSpec, k: int, prec: int = DEFAULT_PREC) -> TildeEstimate:
    """Log-gap between M~ and sqrt(k) (pk / (2e(1-p)n))^(k/2)."""
    n, p = spec.n, spec.p
    in_regime = k <= n * (1 - p)
    with mpmath.workprec(prec):
        base = to_mpf(p * k) / (2 * mpmath.e * to_mpf((1 - p) * n))
        ref = (mpmath.mpf(k) / 2) * mpmath.log(base) + mpmath.log(k) / 2
        L = mpmath.log(to_mpf(tilde_M(spec, k))) - ref
        return TildeEstimate(+L, L - mpmath.mpf(k * k) / (2 * n), in_regime)


@dataclass
class SandwichReport:
    spec: BinomialSpec
    k: int
    M: Fraction
    M_tilde: Fraction
    ratio: Fraction
    V_value: Optional[mpmath.mpf]
    measured: Optional[mpmath.mpf]  # ratio / (k exp(k / V(N/k)))
    regime: str
    degenerate: bool


def sandwich_report(spec: BinomialSpec, k: int, M: Optional[Fraction] = None,
                    degenerate: bool = False, prec: int = DEFAULT_PREC) -> SandwichReport:
    if M is None:
        cert = compute_M_primal(spec, k)
        M, degenerate = cert.value, cert.degenerate
    Mt = tilde_M(spec, k)
    ratio = Mt / M
    comp = sandwich_comparator(spec, k, prec)
    v = V(Fraction(spec.N) / k, prec) if spec.N > 0 else None
    with mpmath.workprec(prec):
        measured = to_mpf(ratio) / comp if comp is not None else None
    return SandwichReport(spec, k, M, Mt, ratio, v, measured, regime(spec, k, prec), degenerate)
