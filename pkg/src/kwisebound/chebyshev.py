"""Discrete Chebyshev polynomials for the uniform measure on {0, ..., M-1}.

t_d(x) = d! * (d-fold forward difference of) C(x, d) C(x - M, d), built with
exact coefficients.  No three-term recurrence is used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Sequence

import mpmath

from .exact_core import KwiseError, Polynomial, finite_difference, poly_choose
from .relaxed import DEFAULT_PREC, to_mpf

GUARD = mpmath.mpf(10) ** -12


def chebyshev_poly(M: int, d: int) -> Polynomial:
    if not 0 <= d <= M - 1:
        raise KwiseError(f"need 0 <= d <= M - 1, got d={d}, M={M}")
    x = Polynomial.x()
    prod = poly_choose(x, d) * poly_choose(x - M, d)
    return finite_difference(prod, d).scale(math.factorial(d))


@dataclass
class ChebyshevFamily:
    M: int
    polys: List[Polynomial]

    @classmethod
    def build(cls, M: int, dmax: int) -> "ChebyshevFamily":
        return cls(M, [chebyshev_poly(M, d) for d in range(dmax + 1)])

    def values(self, d: int) -> List[Fraction]:
        return [self.polys[d](i) for i in range(self.M)]


def inner_product(M: int, P: Polynomial, Q: Polynomial) -> Fraction:
    return sum((P(i) * Q(i) for i in range(M)), Fraction(0))


def verify_orthogonality(M: int, dmax: int) -> Dict[tuple, bool]:
    """{(d, d'): sum_i t_d(i) t_d'(i) == 0} for every pair d < d' <= dmax."""
    if dmax > M - 1:
        raise KwiseError("dmax must not exceed M - 1")
    fam = ChebyshevFamily.build(M, dmax)
    vals = [fam.values(d) for d in range(dmax + 1)]
    return {
        (d, e): sum(a * b for a, b in zip(vals[d], vals[e])) == 0
        for d in range(dmax + 1)
        for e in range(d + 1, dmax + 1)
    }


def norm_squared_formula(M: int, d: int) -> Fraction:
    """M (M^2 - 1^2) ... (M^2 - d^2) / (2d + 1)."""
    return Fraction(M * math.prod(M * M - i * i for i in range(1, d + 1)), 2 * d + 1)


def norm_squared(M: int, d: int) -> Fraction:
    """Closed-form squared norm, cross-checked against the direct sum."""
    if not 0 <= d <= M - 1:
        raise KwiseError(f"need 0 <= d <= M - 1, got d={d}, M={M}")
    closed = norm_squared_formula(M, d)
    t = chebyshev_poly(M, d)
    direct = inner_product(M, t, t)
    if direct != closed:
        raise ArithmeticError(f"norm identity fails at M={M}, d={d}: {direct} != {closed}")
    return closed


def min_sup_bound(M: int, d: int, prec: int = DEFAULT_PREC) -> mpmath.mpf:
    """Lower bound M^d / 4^(d + 1/2) * exp(-d^3 / M^2) on max |G| for monic G."""
    if d < 0 or 2 * d > M:
        raise KwiseError(f"bound requires 0 <= d <= M/2, got d={d}, M={M}")
    with mpmath.workprec(prec):
        return +(mpmath.mpf(M) ** d / mpmath.mpf(4) ** (d + mpmath.mpf(1) / 2)
                 * mpmath.exp(-mpmath.mpf(d) ** 3 / M**2))


def sup_on_grid(G: Polynomial, M: int) -> Fraction:
    return max(abs(G(i)) for i in range(M))


def check_min_sup(G: Polynomial, M: int, prec: int = DEFAULT_PREC) -> bool:
    """max over {0..M-1} of |G| >= bound * (1 - 1e-12), for monic G."""
    if G.leading != 1:
        raise KwiseError("G must be monic")
    d = G.degree
    with mpmath.workprec(prec):
        return to_mpf(sup_on_grid(G, M)) >= min_sup_bound(M, d, prec) * (1 - GUARD)


def monic_from_roots(roots: Sequence[int]) -> Polynomial:
    return Polynomial.from_roots(roots)


def l2_lower_bound(M: int, d: int) -> Fraction:
    """Exact C(2d, d)^-2 * ||t_d||^2: the least sum of G(i)^2 over monic G."""
    return norm_squared_formula(M, d) / math.comb(2 * d, d) ** 2


def simplified_l2_bound(M: int, d: int, prec: int = DEFAULT_PREC) -> mpmath.mpf:
    """(M/4)^(2d+1) * exp(-2 d^3 / M^2), valid for 1 <= d <= M/2."""
    with mpmath.workprec(prec):
        return +((mpmath.mpf(M) / 4) ** (2 * d + 1) * mpmath.exp(-2 * mpmath.mpf(d) ** 3 / M**2))


def check_bound_chain(M: int, d: int, prec: int = DEFAULT_PREC) -> bool:
    """The exact squared-norm bound dominates its simplified exponential form."""
    if not 1 <= d or 2 * d > M:
        raise KwiseError("chain applies for 1 <= d <= M/2")
    with mpmath.workprec(prec):
        return to_mpf(l2_lower_bound(M, d)) >= simplified_l2_bound(M, d, prec) * (1 - GUARD)
