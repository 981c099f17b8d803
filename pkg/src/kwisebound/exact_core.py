"""Exact rational scalars, binomial combinatorics and polynomial algebra.

Every quantity here is a :class:`fractions.Fraction` (or a plain ``int``,
which mixes with ``Fraction`` losslessly).  Floats are refused at the
boundary: an LP certificate is only as exact as its inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

Rational = Fraction


class KwiseError(ValueError):
    """Raised for out-of-range parameters anywhere in the package."""


def parse_rational(value) -> Fraction:
    """Parse ``"a/b"``, a finite decimal string, an int or a Fraction.

    >>> parse_rational("0.3")
    Fraction(3, 10)
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, float):
        raise TypeError("floating point values are rejected; pass 'a/b' or a decimal string")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if not text:
            raise KwiseError("empty rational string")
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise KwiseError(f"cannot parse rational {value!r}") from exc
    raise TypeError(f"unsupported rational input {type(value).__name__}")


def format_rational(q) -> str:
    """Lowest-terms ``num/den`` string; integers print bare (``"6"``)."""
    return str(Fraction(q))


@dataclass(frozen=True)
class BinomialSpec:
    """The reference measure Bin(n, p)."""

    n: int
    p: Fraction

    def __post_init__(self):
        if isinstance(self.n, bool) or not isinstance(self.n, int):
            raise TypeError("n must be an int")
        if self.n < 1:
            raise KwiseError(f"n must be positive, got {self.n}")
        p = parse_rational(self.p)
        if not 0 < p < 1:
            raise KwiseError(f"p must lie strictly between 0 and 1, got {p}")
        object.__setattr__(self, "p", p)

    @property
    def q(self) -> Fraction:
        return 1 - self.p

    @property
    def N(self) -> Fraction:
        """Scale parameter n p (1 - p) - 1."""
        return self.n * self.p * (1 - self.p) - 1

    def complement(self) -> "BinomialSpec":
        return BinomialSpec(self.n, 1 - self.p)

    @cached_property
    def pmf_table(self) -> tuple:
        return tuple(binomial_pmf(self, x) for x in range(self.n + 1))


def binomial_coefficient(n: int, j: int) -> Fraction:
    if n < 0 or j < 0:
        raise KwiseError("binomial_coefficient takes nonnegative arguments")
    return Fraction(math.comb(n, j))


def binomial_pmf(spec: BinomialSpec, x: int) -> Fraction:
    if not 0 <= x <= spec.n:
        raise KwiseError(f"x={x} outside [0, {spec.n}]")
    return math.comb(spec.n, x) * spec.p**x * spec.q ** (spec.n - x)


def binomial_cdf(spec: BinomialSpec, x) -> Fraction:
    """P(X <= x) for X ~ Bin(n, p); ``x`` may be any real-valued rational."""
    top = math.floor(x)
    if top < 0:
        return Fraction(0)
    if top >= spec.n:
        return Fraction(1)
    return sum((binomial_pmf(spec, i) for i in range(top + 1)), Fraction(0))


def falling_factorial(n: int, j: int) -> int:
    """n (n-1) ... (n-j+1); zero once j exceeds a nonnegative n."""
    out = 1
    for i in range(j):
        out *= n - i
    return out


def factorial_moment(spec: BinomialSpec, j: int) -> Fraction:
    if j < 0:
        raise KwiseError("moment order must be nonnegative")
    if j > spec.n:
        return Fraction(0)
    return falling_factorial(spec.n, j) * spec.p**j


def raw_moment(spec: BinomialSpec, j: int) -> Fraction:
    """E[X^j], via Stirling numbers of the second kind."""
    return sum(
        (stirling2(j, i) * factorial_moment(spec, i) for i in range(j + 1)),
        Fraction(0),
    )


def stirling2(j: int, i: int) -> int:
    if j == i:
        return 1
    if i == 0 or i > j:
        return 0
    row = [1] + [0] * i
    for m in range(1, j + 1):
        new = [0] * (i + 1)
        for r in range(1, min(m, i) + 1):
            new[r] = r * row[r] + row[r - 1]
        row = new
    return row[i]


class Polynomial:
    """Immutable univariate polynomial with exact rational coefficients.

    Coefficients are stored in ascending degree order with trailing zeros
    stripped, so the zero polynomial has an empty coefficient tuple and
    degree -1.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [parse_rational(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    @classmethod
    def constant(cls, c) -> "Polynomial":
        return cls([c])

    @classmethod
    def x(cls) -> "Polynomial":
        return cls([0, 1])

    @classmethod
    def from_roots(cls, roots: Iterable, lead=1) -> "Polynomial":
        out = cls([lead])
        for r in roots:
            out = out * cls([-parse_rational(r), 1])
        return out

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, x) -> Fraction:
        return poly_eval(self, x)

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == Polynomial([other]).coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"Polynomial([{', '.join(format_rational(c) for c in self.coeffs)}])"

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            return other
        return Polynomial([other])

    def __add__(self, other):
        other = self._coerce(other)
        size = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (size - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (size - len(other.coeffs))
        return Polynomial(x + y for x, y in zip(a, b))

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(-c for c in self.coeffs)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            c = parse_rational(other)
            return Polynomial(c * a for a in self.coeffs)
        if self.is_zero() or other.is_zero():
            return Polynomial()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return Polynomial(out)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        out = Polynomial([1])
        for _ in range(e):
            out = out * self
        return out

    def scale(self, c) -> "Polynomial":
        return self * parse_rational(c)

    def shift(self, c) -> "Polynomial":
        """Return x -> P(x + c) (Taylor shift by Horner's scheme)."""
        c = parse_rational(c)
        out = Polynomial()
        step = Polynomial([c, 1])
        for a in reversed(self.coeffs):
            out = out * step + a
        return out

    def divmod_linear(self, r) -> tuple["Polynomial", Fraction]:
        """Synthetic division by (x - r): returns (quotient, remainder)."""
        r = parse_rational(r)
        if self.is_zero():
            return Polynomial(), Fraction(0)
        quot = []
        acc = Fraction(0)
        for a in reversed(self.coeffs):
            acc = acc * r + a
            quot.append(acc)
        remainder = quot.pop()
        return Polynomial(reversed(quot)), remainder

    def falling_factorial_coeffs(self) -> list:
        """Coefficients c_j with P(x) = sum_j c_j x(x-1)...(x-j+1)."""
        out = []
        cur = self
        j = 0
        while not cur.is_zero():
            cur, rem = cur.divmod_linear(j)
            out.append(rem)
            j += 1
        return out

    def integer_zeros(self, lo: int, hi: int) -> list:
        """Integers z in [lo, hi] with P(z) == 0."""
        return [z for z in range(lo, hi + 1) if self(z) == 0]


def poly_eval(P: Polynomial, x) -> Fraction:
    acc = Fraction(0)
    for a in reversed(P.coeffs):
        acc = acc * x + a
    return acc


def finite_difference(P: Polynomial, order: int = 1) -> Polynomial:
    """Forward difference G(x+1) - G(x), applied ``order`` times."""
    if order < 0:
        raise KwiseError("difference order must be nonnegative")
    for _ in range(order):
        P = P.shift(1) - P
    return P


def poly_choose(P: Polynomial, d: int) -> Polynomial:
    """Generalized binomial C(P(x), d) = P (P-1) ... (P-d+1) / d!."""
    out = Polynomial([1])
    for i in range(d):
        out = out * (P - i)
    return out.scale(Fraction(1, math.factorial(d)))


def expectation(spec: BinomialSpec, P: Polynomial) -> Fraction:
    """E[P(X)] for X ~ Bin(n, p) through the falling-factorial basis."""
    total = Fraction(0)
    for j, c in enumerate(P.falling_factorial_coeffs()):
        if c and j <= spec.n:
            total += c * factorial_moment(spec, j)
    return total


def int_poly_from_roots(roots: Iterable[int]) -> list:
    """Ascending integer coefficients of prod (x - r)."""
    cs = [1]
    for r in roots:
        nxt = [0] * (len(cs) + 1)
        for i, c in enumerate(cs):
            nxt[i + 1] += c
            nxt[i] -= r * c
        cs = nxt
    return cs


def expectation_int(spec: BinomialSpec, coeffs: Sequence[int]) -> Fraction:
    """E[P(X)] for integer-coefficient P, in integer arithmetic until the end."""
    # falling-factorial coefficients by synthetic division by x, x-1, ...
    cur = list(coeffs)
    ff = []
    j = 0
    while cur:
        acc = 0
        quot = []
        for a in reversed(cur):
            acc = acc * j + a
            quot.append(acc)
        ff.append(quot.pop())
        cur = quot[::-1]
        while cur and cur[-1] == 0:
            cur.pop()
        j += 1
    if not ff:
        return Fraction(0)
    a, b = spec.p.numerator, spec.p.denominator
    top = min(len(ff) - 1, spec.n)
    num = 0
    for j in range(top + 1):
        if ff[j]:
            num += ff[j] * falling_factorial(spec.n, j) * a**j * b ** (top - j)
    return Fraction(num, b**top)


def expectation_direct(spec: BinomialSpec, P: Polynomial) -> Fraction:
    """E[P(X)] by summing pmf(x) P(x) over the support."""
    pmf = spec.pmf_table
    return sum((pmf[x] * P(x) for x in range(spec.n + 1)), Fraction(0))


def solve_linear_system(A: Sequence[Sequence], b: Sequence) -> list:
    """Solve a square nonsingular system exactly by Gauss-Jordan elimination."""
    m = len(A)
    rows = [[Fraction(v) for v in A[i]] + [Fraction(b[i])] for i in range(m)]
    for col in range(m):
        piv = next((r for r in range(col, m) if rows[r][col] != 0), None)
        if piv is None:
            raise KwiseError("singular linear system")
        rows[col], rows[piv] = rows[piv], rows[col]
        inv = 1 / rows[col][col]
        rows[col] = [v * inv for v in rows[col]]
        for r in range(m):
            if r != col and rows[r][col] != 0:
                f = rows[r][col]
                rows[r] = [a - f * c for a, c in zip(rows[r], rows[col])]
    return [rows[i][m] for i in range(m)]
