import random
from fractions import Fraction

import numpy as np
import pytest
from scipy.optimize import linprog

from kwisebound.exact_core import BinomialSpec, KwiseError
from kwisebound.lp_solver import (
    EQ,
    GE,
    INFEASIBLE,
    LE,
    OPTIMAL,
    UNBOUNDED,
    StandardFormLP,
    check_feasible,
    dual_objective,
    moment_lp,
    solve_lp,
)

HALF = Fraction(1, 2)
PS = [HALF, Fraction(1, 3), Fraction(3, 10), Fraction(2, 3)]


def test_moment_lp_n3_k2():
    lp = moment_lp(BinomialSpec(3, HALF), 2)
    assert lp.rhs == [1, Fraction(3, 2), 3]
    sol = solve_lp(lp)
    assert sol.status == OPTIMAL
    assert sol.value == Fraction(1, 4)
    assert sol.x == [0, Fraction(3, 4), 0, Fraction(1, 4)]


def test_moment_lp_shape():
    lp = moment_lp(BinomialSpec(2, HALF), 2)
    assert lp.num_vars == 3 and len(lp.rows) == 3
    assert lp.senses == [EQ] * 3


def test_moment_lp_n4_value():
    assert solve_lp(moment_lp(BinomialSpec(4, HALF), 2)).value == Fraction(1, 6)


def test_moment_lp_k_range():
    with pytest.raises(KwiseError):
        moment_lp(BinomialSpec(3, HALF), 4)
    with pytest.raises(KwiseError):
        moment_lp(BinomialSpec(3, HALF), 0)


def test_infeasible():
    lp = StandardFormLP([1], [[1], [1]], [1, 2], [LE, GE])
    assert solve_lp(lp).status == INFEASIBLE


def test_unbounded():
    assert solve_lp(StandardFormLP([1], [], [])).status == UNBOUNDED


def test_small_textbook_lp():
    # max 3x + 2y, x + y <= 4, x + 3y <= 6, x <= 3  ->  x=3, y=1, value 11
    lp = StandardFormLP([3, 2], [[1, 1], [1, 3], [1, 0]], [4, 6, 3], [LE, LE, LE])
    sol = solve_lp(lp)
    assert sol.value == 11 and sol.x == [3, 1]
    assert dual_objective(lp, sol) == 11


def test_negative_rhs_and_min():
    # min x + y with x + y >= 2, -x <= -1/2
    lp = StandardFormLP([1, 1], [[1, 1], [-1, 0]], [2, Fraction(-1, 2)], [GE, LE], maximize=False)
    sol = solve_lp(lp)
    assert sol.value == 2
    assert dual_objective(lp, sol) == 2
    assert check_feasible(lp, sol.x)


def test_redundant_rows():
    lp = StandardFormLP([1, 2], [[1, 1], [2, 2]], [1, 2], [EQ, EQ])
    sol = solve_lp(lp)
    assert sol.status == OPTIMAL and sol.value == 2
    assert dual_objective(lp, sol) == 2


def _scipy_value(lp):
    c = np.array([float(v) for v in lp.objective])
    A = np.array([[float(v) for v in r] for r in lp.rows])
    b = np.array([float(v) for v in lp.rhs])
    res = linprog(-c if lp.maximize else c, A_eq=A, b_eq=b, bounds=(0, None), method="highs")
    return -res.fun if lp.maximize else res.fun


@pytest.mark.parametrize("n", range(2, 11))
@pytest.mark.parametrize("p", PS)
def test_moment_lp_strong_duality_and_float_oracle(n, p):
    spec = BinomialSpec(n, p)
    for k in range(1, min(n, 6) + 1):
        values = {}
        for maximize in (True, False):
            lp = moment_lp(spec, k, maximize)
            sol = solve_lp(lp)
            assert sol.status == OPTIMAL
            assert check_feasible(lp, sol.x)
            assert sum(c * x for c, x in zip(lp.objective, sol.x)) == sol.value
            assert dual_objective(lp, sol) == sol.value
            if maximize:
                assert dual_feasible(lp, sol.duals)
            assert abs(float(sol.value) - _scipy_value(lp)) < 1e-7
            values[maximize] = sol.value
        assert values[True] >= values[False]


@pytest.mark.parametrize("seed", range(5))
def test_row_permutation_invariance(seed):
    rng = random.Random(seed)
    spec = BinomialSpec(rng.randint(5, 10), rng.choice(PS))
    k = rng.randint(2, 4)
    base = moment_lp(spec, k)
    order = list(range(len(base.rows)))
    rng.shuffle(order)
    perm = StandardFormLP(base.objective, [base.rows[i] for i in order], [base.rhs[i] for i in order])
    assert solve_lp(perm).value == solve_lp(base).value


def dual_feasible(lp, y):
    """A^T y >= c with sign rules for a maximization LP."""
    for j in range(lp.num_vars):
        if sum(row[j] * yi for row, yi in zip(lp.rows, y)) < lp.objective[j]:
            return False
    for s, yi in zip(lp.senses, y):
        if (s == LE and yi < 0) or (s == GE and yi > 0):
            return False
    return True


def test_degenerate_random_lps_terminate():
    rng = random.Random(3)
    for _ in range(30):
        m, n = rng.randint(1, 4), rng.randint(1, 5)
        rows = [[rng.randint(-2, 2) for _ in range(n)] for _ in range(m)]
        rhs = [rng.randint(-1, 2) for _ in range(m)]
        senses = [rng.choice([EQ, LE, GE]) for _ in range(m)]
        lp = StandardFormLP([rng.randint(-2, 2) for _ in range(n)], rows, rhs, senses)
        sol = solve_lp(lp)
        assert sol.status in (OPTIMAL, INFEASIBLE, UNBOUNDED)
        if sol.status == OPTIMAL:
            assert check_feasible(lp, sol.x)
            assert dual_objective(lp, sol) == sol.value
            assert dual_feasible(lp, sol.duals)


def test_malformed_lp():
    with pytest.raises(KwiseError):
        StandardFormLP([1, 2], [[1]], [1])
