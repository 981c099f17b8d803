"""Exact M(n, k, p) and m(n, k, p) with optimality certificates.

Two independent routes reach M for even k:

* the primal moment LP, whose dual multipliers give the dual polynomial;
* a search over dual polynomials f(x) = prod (x - a)(x - a - 1) with
  disjoint adjacent root pairs below n, minimizing E[f] / f(n).

The optimal count distribution is then recovered from the dual zero set
by solving the (Vandermonde) moment equations.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .exact_core import (
    BinomialSpec,
    KwiseError,
    Polynomial,
    expectation,
    format_rational,
    raw_moment,
)
from .lp_solver import OPTIMAL, EQ, StandardFormLP, moment_lp, solve_lp

DEFAULT_MAX_CANDIDATES = 10**7


class BudgetExceeded(RuntimeError):
    """Dual search would enumerate more configurations than allowed."""


class ConsistencyError(RuntimeError):
    """Two routes that must agree exactly did not."""


@dataclass(frozen=True)
class MomentDistribution:
    n: int
    support: Tuple[int, ...]
    masses: Tuple[Fraction, ...]

    def __post_init__(self):
        support = tuple(int(s) for s in self.support)
        masses = tuple(Fraction(m) for m in self.masses)
        if len(support) != len(masses):
            raise KwiseError("support and masses differ in length")
        if any(b <= a for a, b in zip(support, support[1:])):
            raise KwiseError("support must be strictly increasing")
        if support and (support[0] < 0 or support[-1] > self.n):
            raise KwiseError(f"support must lie in [0, {self.n}]")
        if any(m <= 0 for m in masses):
            raise KwiseError("masses must be positive")
        if sum(masses) != 1:
            raise KwiseError("masses must sum to 1")
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "masses", masses)

    @classmethod
    def from_masses(cls, n: int, support: Sequence[int], masses: Sequence) -> "MomentDistribution":
        """Build from aligned lists, silently dropping zero masses."""
        pairs = sorted((s, Fraction(m)) for s, m in zip(support, masses) if m != 0)
        return cls(n, tuple(s for s, _ in pairs), tuple(m for _, m in pairs))

    @classmethod
    def binomial(cls, spec: BinomialSpec) -> "MomentDistribution":
        return cls(spec.n, tuple(range(spec.n + 1)), spec.pmf_table)

    def mass_at(self, x: int) -> Fraction:
        try:
            return self.masses[self.support.index(x)]
        except ValueError:
            return Fraction(0)

    def moment(self, j: int) -> Fraction:
        return sum((m * Fraction(s) ** j for s, m in zip(self.support, self.masses)), Fraction(0))

    def expect(self, P: Polynomial) -> Fraction:
        return sum((m * P(s) for s, m in zip(self.support, self.masses)), Fraction(0))


@dataclass(frozen=True)
class RootPairConfig:
    """Starts a_1 < ... < a_{k/2} of the adjacent root pairs {a, a + 1}."""

    starts: Tuple[int, ...]

    def __post_init__(self):
        starts = tuple(int(a) for a in self.starts)
        if not starts:
            raise KwiseError("a root-pair configuration needs at least one pair")
        if starts[0] < 0:
            raise KwiseError("pair starts must be nonnegative")
        for a, b in zip(starts, starts[1:]):
            if b < a + 2:
                raise KwiseError(f"root pairs {{{a},{a + 1}}} and {{{b},{b + 1}}} overlap or are unordered")
        object.__setattr__(self, "starts", starts)

    @property
    def k(self) -> int:
        return 2 * len(self.starts)

    @property
    def zeros(self) -> List[int]:
        return [z for a in self.starts for z in (a, a + 1)]

    def check_fits(self, n: int):
        if self.starts[-1] > n - 2:
            raise KwiseError(f"pair start {self.starts[-1]} exceeds n - 2 = {n - 2}")

    def f(self) -> Polynomial:
        return Polynomial.from_roots(self.zeros)


@dataclass
class ExtremalCertificate:
    spec: BinomialSpec
    k: int
    value: Fraction
    distribution: MomentDistribution
    dual_poly: Polynomial
    dual_zeros: List[int]
    degenerate: bool
    method: str = "primal"
    reduction: Optional[str] = None
    config: Optional[RootPairConfig] = None
    minimizers: List[RootPairConfig] = field(default_factory=list)

    def to_json(self, checks: Optional[Dict[str, bool]] = None) -> dict:
        out = {
            "n": self.spec.n,
            "k": self.k,
            "p": format_rational(self.spec.p),
            "M": format_rational(self.value),
            "support": list(self.distribution.support),
            "masses": [format_rational(m) for m in self.distribution.masses],
            "dual_zeros": list(self.dual_zeros),
            "dual_coeffs": [format_rational(c) for c in self.dual_poly.coeffs],
            "degenerate": self.degenerate,
            "method": self.method,
        }
        if self.reduction:
            out["reduction"] = self.reduction
        if checks is not None:
            out["checks"] = checks
        return out


def _check_k(spec: BinomialSpec, k: int):
    if isinstance(k, bool) or not isinstance(k, int):
        raise TypeError("k must be an int")
    if k < 1:
        raise KwiseError(f"k must be at least 1, got {k}")
    if k > spec.n:
        raise KwiseError(f"k exceeds n (k={k}, n={spec.n})")


def moment_targets(spec: BinomialSpec, k: int) -> List[Fraction]:
    return [Fraction(1)] + [raw_moment(spec, j) for j in range(1, k + 1)]


def vandermonde_solve(spec: BinomialSpec, k: int, support: Sequence[int]) -> Optional[List[Fraction]]:
    """Masses on ``support`` matching normalization and the first k moments.

    Returns the masses aligned with ``support`` or ``None`` when any mass is
    negative.  Zero masses are returned as zeros; callers flag them.

    The system is solved through Lagrange interpolation: the mass at s_j is
    E[L_j(X)] where L_j is the degree-k Lagrange basis polynomial for the
    support, since any distribution on the support with these moments
    integrates L_j to exactly its mass at s_j.
    """
    pts = [int(s) for s in support]
    if len(set(pts)) != len(pts):
        raise KwiseError("support points must be distinct")
    if len(pts) != k + 1:
        raise KwiseError(f"need exactly k + 1 = {k + 1} support points, got {len(pts)}")
    if any(not 0 <= s <= spec.n for s in pts):
        raise KwiseError(f"support points must lie in [0, {spec.n}]")
    masses = []
    for j, s in enumerate(pts):
        others = pts[:j] + pts[j + 1:]
        denom = math.prod(s - o for o in others)
        L = Polynomial.from_roots(others, lead=Fraction(1, denom))
        masses.append(expectation(spec, L))
    if any(m < 0 for m in masses):
        return None
    return masses


def _lp_certificate(spec: BinomialSpec, k: int) -> ExtremalCertificate:
    lp = moment_lp(spec, k, maximize=True)
    sol = solve_lp(lp)
    if sol.status != OPTIMAL:
        raise ConsistencyError(f"moment LP reported {sol.status}; Bin(n,p) is always feasible")
    dual = Polynomial(sol.duals)
    scale = dual(spec.n)
    if scale != 1:
        # complementary slackness on q_n > 0 forces P(n) = 1; normalize anyway
        dual = dual.scale(1 / scale)
    dist = MomentDistribution.from_masses(spec.n, range(spec.n + 1), sol.x)
    degenerate = len(dist.support) < k + 1
    return ExtremalCertificate(
        spec=spec,
        k=k,
        value=sol.value,
        distribution=dist,
        dual_poly=dual,
        dual_zeros=dual.integer_zeros(0, spec.n - 1),
        degenerate=degenerate,
        method="primal",
    )


def compute_M_primal(spec: BinomialSpec, k: int) -> ExtremalCertificate:
    """M(n, k, p) from the primal moment LP (odd k through the odd reduction)."""
    _check_k(spec, k)
    if k % 2:
        return odd_reduction(spec, k)
    return _lp_certificate(spec, k)


def count_configs(n: int, k: int) -> int:
    """Number of valid root-pair configurations with starts in [0, n - 2]."""
    h = k // 2
    return math.comb(n - h, h) if n - h >= h else 0


def iter_configs(n: int, k: int, first: Optional[int] = None):
    """Configurations in lexicographic order of starts (optionally fixing a_1)."""
    h = k // 2
    slots = n - 1 - (h - 1)  # compressed positions 0..slots-1
    if first is None:
        combos = itertools.combinations(range(slots), h)
    else:
        combos = ((first,) + rest for rest in itertools.combinations(range(first + 1, slots), h - 1))
    for b in combos:
        yield tuple(bi + i for i, bi in enumerate(b))


def _config_ratio(spec: BinomialSpec, starts: Tuple[int, ...]) -> Fraction:
    f = Polynomial.from_roots([z for a in starts for z in (a, a + 1)])
    fn = f(spec.n)
    if fn <= 0:
        raise ConsistencyError(f"f(n) must be positive for starts {starts}")
    return expectation(spec, f) / fn


def _search_partition(args):
    spec, k, firsts = args
    best, arg, ties = None, None, []
    for first in firsts:
        for starts in iter_configs(spec.n, k, first):
            r = _config_ratio(spec, starts)
            if best is None or r < best:
                best, arg, ties = r, starts, [starts]
            elif r == best:
                ties.append(starts)
    return best, arg, ties


def compute_M_dual_search(
    spec: BinomialSpec,
    k: int,
    max_candidates: int = DEFAULT_MAX_CANDIDATES,
    workers: int = 1,
) -> ExtremalCertificate:
    """M(n, k, p) as min over root-pair configurations of E[f] / f(n)."""
    n = spec.n
    if k % 2:
        raise KwiseError("dual root-pair search requires even k")
    if k < 2:
        raise KwiseError("dual root-pair search requires k >= 2")
    if k > n - 1:
        raise KwiseError(f"k/2 root pairs do not fit below n (k={k}, n={n})")
    total = count_configs(n, k)
    if total > max_candidates:
        raise BudgetExceeded(f"{total} configurations exceed the budget of {max_candidates}")

    h = k // 2
    firsts = list(range(n - 1 - (h - 1) - (h - 1)))
    if workers > 1 and len(firsts) > 1:
        chunks = [firsts[i::workers] for i in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_search_partition, [(spec, k, c) for c in chunks if c]))
    else:
        parts = [_search_partition((spec, k, firsts))]

    best = min(p[0] for p in parts if p[0] is not None)
    ties = sorted(t for p in parts if p[0] == best for t in p[2])
    config = RootPairConfig(ties[0])

    f = config.f()
    dual = f.scale(1 / f(n))
    support = config.zeros + [n]
    masses = vandermonde_solve(spec, k, support)
    if masses is None:
        raise ConsistencyError(f"optimal configuration {config.starts} yields a negative mass")
    dist = MomentDistribution.from_masses(n, support, masses)
    degenerate = len(ties) > 1 or any(m == 0 for m in masses)
    if dist.mass_at(n) != best:
        raise ConsistencyError("mass at n differs from the dual optimum")
    return ExtremalCertificate(
        spec=spec,
        k=k,
        value=best,
        distribution=dist,
        dual_poly=dual,
        dual_zeros=config.zeros,
        degenerate=degenerate,
        method="dual",
        config=config,
        minimizers=[RootPairConfig(t) for t in ties],
    )


def odd_reduction(spec: BinomialSpec, k: int, method: str = "primal", **search_kw) -> ExtremalCertificate:
    """Odd k: M(n, k, p) = p M(n - 1, k - 1, p).

    If Q is optimal for (n - 1, k - 1) then P(x) = x Q(x - 1) / n is a valid
    dual polynomial for (n, k) with E[P] = p E[Q]; the primal distribution is
    then read off its zero set.
    """
    if k % 2 == 0:
        raise KwiseError("odd_reduction requires odd k")
    _check_k(spec, k)
    n, p = spec.n, spec.p
    if k == 1:
        Q = Polynomial([1])
        inner_value = Fraction(1)
        inner_degenerate = False
    else:
        inner_spec = BinomialSpec(n - 1, p)
        if method == "dual" and k - 1 <= n - 2:
            inner = compute_M_dual_search(inner_spec, k - 1, **search_kw)
        else:
            inner = _lp_certificate(inner_spec, k - 1)
        Q, inner_value, inner_degenerate = inner.dual_poly, inner.value, inner.degenerate
    value = p * inner_value
    dual = (Polynomial.x() * Q.shift(-1)).scale(Fraction(1, n))
    zeros = dual.integer_zeros(0, n - 1)
    if len(zeros) == k:
        masses = vandermonde_solve(spec, k, zeros + [n])
        if masses is None:
            raise ConsistencyError("odd reduction produced a negative mass")
        dist = MomentDistribution.from_masses(n, zeros + [n], masses)
        degenerate = inner_degenerate or any(m == 0 for m in masses)
    else:
        # degenerate inner dual (extra zeros): fall back to the direct LP primal
        direct = solve_lp(moment_lp(spec, k))
        dist = MomentDistribution.from_masses(n, range(n + 1), direct.x)
        degenerate = True
    if dist.mass_at(n) != value:
        raise ConsistencyError("odd reduction value disagrees with its distribution")
    return ExtremalCertificate(
        spec=spec,
        k=k,
        value=value,
        distribution=dist,
        dual_poly=dual,
        dual_zeros=zeros,
        degenerate=degenerate,
        method=method,
        reduction="odd",
    )


def compute_m(spec: BinomialSpec, k: int) -> Fraction:
    """Minimum of P(S = n) over the moment polytope."""
    return compute_m_witness(spec, k)[0]


def compute_m_witness(spec: BinomialSpec, k: int) -> Tuple[Fraction, MomentDistribution]:
    _check_k(spec, k)
    sol = solve_lp(moment_lp(spec, k, maximize=False))
    if sol.status != OPTIMAL:
        raise ConsistencyError(f"moment LP (min) reported {sol.status}")
    return sol.value, MomentDistribution.from_masses(spec.n, range(spec.n + 1), sol.x)


def verify_certificate(cert: ExtremalCertificate) -> Dict[str, bool]:
    """Exact re-check of a certificate; one boolean per check."""
    spec, k, n = cert.spec, cert.k, cert.spec.n
    dist, P = cert.distribution, cert.dual_poly
    moments_ok = (
        dist.n == n
        and sum(dist.masses) == 1
        and all(m > 0 for m in dist.masses)
        and all(dist.moment(j) == raw_moment(spec, j) for j in range(1, k + 1))
    )
    dual_ok = P.degree <= k and P(n) == 1 and all(P(i) >= 0 for i in range(n))
    value_ok = expectation(spec, P) == cert.value == dist.mass_at(n)
    zero_set = set(P.integer_zeros(0, n - 1))
    support_ok = set(dist.support) <= zero_set | {n} and set(cert.dual_zeros) == zero_set
    return {
        "moments": moments_ok,
        "dual_feasible": dual_ok,
        "value": value_ok,
        "support_in_zeros": support_ok,
    }


def zeros_form_pairs(zeros: Sequence[int], k: int, n: int) -> bool:
    """True when the zeros are k/2 disjoint adjacent pairs inside [0, n - 1]."""
    zs = sorted(zeros)
    if len(zs) != k or len(set(zs)) != k:
        return False
    if zs and (zs[0] < 0 or zs[-1] > n - 1):
        return False
    return all(zs[i + 1] == zs[i] + 1 for i in range(0, k, 2))


def unique_optimum(cert: ExtremalCertificate, objective: Sequence) -> bool:
    """Re-optimize with q_n pinned at M and a tie-break objective, both ways.

    Returns True when both directions land on the certificate's distribution,
    i.e. the optimal face is the single point.
    """
    spec, k, n = cert.spec, cert.k, cert.spec.n
    base = moment_lp(spec, k)
    rows = base.rows + [[Fraction(0)] * n + [Fraction(1)]]
    rhs = base.rhs + [cert.value]
    target = [cert.distribution.mass_at(i) for i in range(n + 1)]
    for maximize in (True, False):
        lp = StandardFormLP(list(objective), rows, rhs, [EQ] * len(rows), maximize)
        sol = solve_lp(lp)
        if sol.status != OPTIMAL or sol.x != target:
            return False
    return True
