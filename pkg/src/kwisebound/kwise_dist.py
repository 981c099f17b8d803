"""Exchangeable joint laws on n bits, given by the law of the count of ones.

A bitstring of weight w gets probability P(S = w) / C(n, w).  The 2^n table
is never built; every query goes through the count distribution.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List

from .exact_core import KwiseError, parse_rational, raw_moment, BinomialSpec
from .extremal import MomentDistribution


@dataclass(frozen=True)
class SymmetricJoint:
    n: int
    count_dist: MomentDistribution

    def __post_init__(self):
        if self.count_dist.n != self.n:
            raise KwiseError("count distribution lives on a different n")

    def prob_of(self, bits: str) -> Fraction:
        if len(bits) != self.n:
            raise KwiseError("bitstring has the wrong length")
        w = bits.count("1")
        return self.count_dist.mass_at(w) / math.comb(self.n, w)

    def and_prob(self) -> Fraction:
        return self.count_dist.mass_at(self.n)


def lift_to_joint(dist: MomentDistribution) -> SymmetricJoint:
    return SymmetricJoint(dist.n, dist)


def subset_all_ones_prob(joint: SymmetricJoint, t: int) -> Fraction:
    """P(all bits of a fixed t-subset are 1)."""
    n = joint.n
    if not 0 <= t <= n:
        raise KwiseError(f"subset size {t} outside [0, {n}]")
    total = Fraction(0)
    for w, m in zip(joint.count_dist.support, joint.count_dist.masses):
        if w >= t:
            total += m * Fraction(math.comb(n - t, w - t), math.comb(n, w))
    return total


def verify_kwise(joint: SymmetricJoint, k: int, p) -> Dict[str, object]:
    """Check every t-subset (t <= k) has all-ones probability p^t, plus moments."""
    p = parse_rational(p)
    per_t = {t: subset_all_ones_prob(joint, t) == p**t for t in range(1, k + 1)}
    spec = BinomialSpec(joint.n, p)
    moments = all(joint.count_dist.moment(j) == raw_moment(spec, j) for j in range(1, k + 1))
    return {
        "subsets": per_t,
        "moments": moments,
        "pass": all(per_t.values()) and moments,
    }


def _draw_weight(dist: MomentDistribution, u: int) -> int:
    # smallest w with u < 2^64 * cumulative mass up to w
    scaled = Fraction(u, 1 << 64)
    cum = Fraction(0)
    for w, m in zip(dist.support, dist.masses):
        cum += m
        if scaled < cum:
            return w
    return dist.support[-1]


def sample(joint: SymmetricJoint, seed: int, count: int) -> List[str]:
    """``count`` bitstrings, deterministic in ``seed``.

    The weight comes from an inverse-cdf lookup of a 64-bit uniform draw
    against exact cumulative masses; the positions of the ones from a seeded
    Fisher-Yates shuffle.
    """
    if count < 0:
        raise KwiseError("count must be nonnegative")
    rng = random.Random(seed)
    n = joint.n
    out = []
    for _ in range(count):
        w = _draw_weight(joint.count_dist, rng.getrandbits(64))
        idx = list(range(n))
        for i in range(n - 1, 0, -1):
            j = rng.randrange(i + 1)
            idx[i], idx[j] = idx[j], idx[i]
        bits = ["0"] * n
        for i in idx[:w]:
            bits[i] = "1"
        out.append("".join(bits))
    return out
