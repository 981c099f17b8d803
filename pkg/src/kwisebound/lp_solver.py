"""Dense two-phase simplex over the rationals, with Bland's pivoting rule.

Also builds the moment LP: maximize (or minimize) P(S = n) over the masses
q_0..q_n of a count variable S whose first k raw moments equal those of
Bin(n, p).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Sequence

from .exact_core import BinomialSpec, KwiseError, raw_moment, solve_linear_system

EQ, LE, GE = "=", "<=", ">="
OPTIMAL, INFEASIBLE, UNBOUNDED = "optimal", "infeasible", "unbounded"


@dataclass
class StandardFormLP:
    objective: List[Fraction]
    rows: List[List[Fraction]]
    rhs: List[Fraction]
    senses: List[str] = None
    maximize: bool = True

    def __post_init__(self):
        self.objective = [Fraction(c) for c in self.objective]
        self.rows = [[Fraction(v) for v in row] for row in self.rows]
        self.rhs = [Fraction(v) for v in self.rhs]
        if self.senses is None:
            self.senses = [EQ] * len(self.rows)
        if len(self.rows) != len(self.rhs) or len(self.senses) != len(self.rows):
            raise KwiseError("row count, rhs length and senses length differ")
        for row in self.rows:
            if len(row) != len(self.objective):
                raise KwiseError("constraint row width does not match objective length")
        for s in self.senses:
            if s not in (EQ, LE, GE):
                raise KwiseError(f"unknown constraint sense {s!r}")

    @property
    def num_vars(self) -> int:
        return len(self.objective)


@dataclass
class LPSolution:
    status: str
    value: Fraction = None
    x: List[Fraction] = field(default_factory=list)
    basis: List[int] = field(default_factory=list)
    duals: List[Fraction] = field(default_factory=list)


def dual_objective(lp: StandardFormLP, sol: LPSolution) -> Fraction:
    return sum((b * y for b, y in zip(lp.rhs, sol.duals)), Fraction(0))


class _Tableau:
    """Rows of [A | b] with an explicit basis list (one basic column per row)."""

    def __init__(self, rows, rhs, basis):
        self.rows = rows
        self.rhs = rhs
        self.basis = basis

    def pivot(self, r, c):
        row = self.rows[r]
        inv = 1 / row[c]
        self.rows[r] = row = [v * inv for v in row]
        self.rhs[r] *= inv
        for i, other in enumerate(self.rows):
            f = other[c]
            if i != r and f:
                self.rows[i] = [a - f * b for a, b in zip(other, row)]
                self.rhs[i] -= f * self.rhs[r]
        self.basis[r] = c

    def reduced_costs(self, cost, allowed):
        # d_j = c_j - c_B^T B^-1 A_j, read off the current tableau
        cb = [cost[j] for j in self.basis]
        out = {}
        for j in allowed:
            d = cost[j]
            for i, row in enumerate(self.rows):
                if cb[i] and row[j]:
                    d -= cb[i] * row[j]
            out[j] = d
        return out

    def run(self, cost, allowed):
        """Maximize cost over the tableau; Bland's rule throughout."""
        allowed = sorted(allowed)
        while True:
            d = self.reduced_costs(cost, allowed)
            entering = next((j for j in allowed if d[j] > 0), None)
            if entering is None:
                return OPTIMAL
            best = None
            for i, row in enumerate(self.rows):
                a = row[entering]
                if a > 0:
                    ratio = self.rhs[i] / a
                    key = (ratio, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return UNBOUNDED
            self.pivot(best[1], entering)


def solve_lp(lp: StandardFormLP) -> LPSolution:
    """Exact optimum of ``lp``; infeasible/unbounded are statuses, not errors."""
    n = lp.num_vars
    m = len(lp.rows)
    cost = lp.objective if lp.maximize else [-c for c in lp.objective]

    # equality form with nonnegative rhs; remember row sign flips
    signs, senses, rows, rhs = [], [], [], []
    for row, b, s in zip(lp.rows, lp.rhs, lp.senses):
        sign = -1 if b < 0 else 1
        if sign < 0:
            s = {EQ: EQ, LE: GE, GE: LE}[s]
        signs.append(sign)
        senses.append(s)
        rows.append([sign * v for v in row])
        rhs.append(sign * b)

    slack_cols = {}
    ncols = n
    for i, s in enumerate(senses):
        if s != EQ:
            slack_cols[i] = ncols
            ncols += 1
    art_cols = {}
    for i, s in enumerate(senses):
        if s != LE:
            art_cols[i] = ncols
            ncols += 1

    full = []
    basis = []
    for i in range(m):
        r = rows[i] + [Fraction(0)] * (ncols - n)
        if i in slack_cols:
            r[slack_cols[i]] = Fraction(1 if senses[i] == LE else -1)
        if i in art_cols:
            r[art_cols[i]] = Fraction(1)
            basis.append(art_cols[i])
        else:
            basis.append(slack_cols[i])
        full.append(r)
    original = [list(r) for r in full]

    tab = _Tableau(full, list(rhs), basis)
    artificial = set(art_cols.values())
    if artificial:
        phase1 = [Fraction(-1) if j in artificial else Fraction(0) for j in range(ncols)]
        tab.run(phase1, range(ncols))
        if any(tab.rhs[i] > 0 for i, j in enumerate(tab.basis) if j in artificial):
            return LPSolution(status=INFEASIBLE)
        # drive zero-level artificials out; rows where that fails are redundant
        redundant = []
        for i in range(m):
            if tab.basis[i] in artificial:
                col = next(
                    (j for j in range(ncols) if j not in artificial and tab.rows[i][j] != 0),
                    None,
                )
                if col is None:
                    redundant.append(i)
                else:
                    tab.pivot(i, col)
        keep = [i for i in range(m) if i not in redundant]
    else:
        keep = list(range(m))

    tab.rows = [tab.rows[i] for i in keep]
    tab.rhs = [tab.rhs[i] for i in keep]
    tab.basis = [tab.basis[i] for i in keep]

    phase2 = list(cost) + [Fraction(0)] * (ncols - n)
    allowed = [j for j in range(ncols) if j not in artificial]
    if tab.run(phase2, allowed) == UNBOUNDED:
        return LPSolution(status=UNBOUNDED)

    x_full = [Fraction(0)] * ncols
    for i, j in enumerate(tab.basis):
        x_full[j] = tab.rhs[i]
    x = x_full[:n]
    value = sum((c * v for c, v in zip(cost, x)), Fraction(0))

    # duals: B^T y = c_B on the kept rows of the equality-form matrix
    B_T = [[original[keep[i]][j] for i in range(len(keep))] for j in tab.basis]
    y = solve_linear_system(B_T, [phase2[j] for j in tab.basis]) if keep else []
    duals = [Fraction(0)] * m
    for idx, i in enumerate(keep):
        duals[i] = signs[i] * y[idx]
    if not lp.maximize:
        value = -value
        duals = [-d for d in duals]
    return LPSolution(
        status=OPTIMAL,
        value=value,
        x=x,
        basis=sorted(j for j in tab.basis if j < n),
        duals=duals,
    )


def moment_lp(spec: BinomialSpec, k: int, maximize: bool = True) -> StandardFormLP:
    """Moment LP over q_0..q_n: normalization plus raw moments 1..k of Bin(n, p)."""
    n = spec.n
    if not 1 <= k <= n:
        raise KwiseError(f"k must satisfy 1 <= k <= n, got k={k}, n={n}")
    return _moment_lp(spec, k, maximize)


def _moment_lp(spec: BinomialSpec, k: int, maximize: bool) -> StandardFormLP:
    n = spec.n
    rows = [[Fraction(i) ** j for i in range(n + 1)] for j in range(k + 1)]
    rhs = [Fraction(1)] + [raw_moment(spec, j) for j in range(1, k + 1)]
    objective = [Fraction(0)] * n + [Fraction(1)]
    return StandardFormLP(objective, rows, rhs, [EQ] * (k + 1), maximize)


def check_feasible(lp: StandardFormLP, x: Sequence[Fraction]) -> bool:
    if any(v < 0 for v in x):
        return False
    for row, b, s in zip(lp.rows, lp.rhs, lp.senses):
        lhs = sum((a * v for a, v in zip(row, x)), Fraction(0))
        if (s == EQ and lhs != b) or (s == LE and lhs > b) or (s == GE and lhs < b):
            return False
    return True
