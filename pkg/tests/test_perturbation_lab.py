import math
import random
from fractions import Fraction

import mpmath
import pytest

from kwisebound.exact_core import BinomialSpec, KwiseError, Polynomial, raw_moment
from kwisebound.extremal import RootPairConfig
from kwisebound.perturbation_lab import (
    NoWitness,
    WitnessSearchParams,
    admissible_ells,
    build_pair,
    check_good_w,
    check_segment_claim,
    find_witness,
    pointwise_ratio_within_bound,
    pointwise_ratio,
    pointwise_ratio_check,
    prob_shift_check,
    random_config,
    ratio_expectations,
    ratio_expectations_direct,
    segment_claim_bound,
    segment_zero_census,
    expectation_ratio_report,
)

HALF = Fraction(1, 2)

# largest (E[g]/E[f]) / (k exp(k / V(N/k))) seen by the default perturbation
# sweep (n <= 60, k in 2..8, p in {1/2, 1/3, 3/10}, 200 configs, seed 0)
RECORDED_MEASURED_MAX = mpmath.mpf("0.302461579092466736895516987715")


def test_build_pair_definitions():
    pair = build_pair(5, (1,))
    assert pair.f == Polynomial.from_roots([1, 2])
    assert pair.g == Polynomial.from_roots([1, 1])
    pair = build_pair(6, (0, 2))
    assert pair.f == Polynomial.from_roots([0, 1, 2, 3])
    assert pair.g == Polynomial.from_roots([0, 0, 2, 2])
    with pytest.raises(KwiseError):
        build_pair(6, (0, 1))
    with pytest.raises(KwiseError):
        build_pair(4, (3,))


def test_int_evaluators_match_polynomials():
    pair = build_pair(20, (2, 7, 11))
    for x in range(-5, 25):
        assert pair.f_at(x) == pair.f(x)
        assert pair.g_at(x) == pair.g(x)


def test_ratio_examples():
    s4 = BinomialSpec(4, HALF)
    assert ratio_expectations(s4, build_pair(4, (0,))) == Fraction(5, 3)
    assert ratio_expectations(BinomialSpec(3, HALF), build_pair(3, (1,))) == 2
    # via raw moments: E f = E X^2 - 5 E X + 6, E g = E X^2 - 4 E X + 4
    m1, m2 = raw_moment(s4, 1), raw_moment(s4, 2)
    assert m2 - 5 * m1 + 6 == 1 and m2 - 4 * m1 + 4 == 1
    assert ratio_expectations(s4, build_pair(4, (2,))) == 1


def test_ratio_matches_direct_sum():
    rng = random.Random(2)
    for _ in range(60):
        n = rng.randint(4, 40)
        k = rng.choice([2, 4, 6])
        if n - k // 2 < k // 2:
            continue
        spec = BinomialSpec(n, rng.choice([HALF, Fraction(1, 3), Fraction(3, 10)]))
        pair = build_pair(n, random_config(n, k, rng))
        assert ratio_expectations(spec, pair) == ratio_expectations_direct(spec, pair)


def test_expectation_ratio_report():
    rep = expectation_ratio_report(BinomialSpec(400, HALF), build_pair(400, (198,)))
    assert rep["k"] == 2 and rep["N"] == 99
    assert rep["comparator"] is not None and rep["measured"] > 0
    assert expectation_ratio_report(BinomialSpec(4, HALF), build_pair(4, (0,)))["comparator"] is None


def test_pointwise_examples():
    assert pointwise_ratio_check(build_pair(10, (1,)), 4) == Fraction(3, 2)
    assert Fraction(9, 4) <= 8
    assert pointwise_ratio_check(build_pair(1001, (0,)), 1000) == Fraction(1000, 999)
    assert pointwise_ratio_check(build_pair(10, (5,)), 0) == Fraction(5, 6)
    with pytest.raises(KwiseError):
        pointwise_ratio(build_pair(10, (5,)), 6)


def test_pointwise_product_formula():
    pair = build_pair(30, (3, 9, 20))
    for x in range(31):
        if pair.f_at(x):
            product = math.prod(Fraction(a - x, a + 1 - x) for a in pair.starts)
            assert pointwise_ratio(pair, x) == product
            assert pointwise_ratio_within_bound(pair, x)


def test_worst_case_pointwise_ratio_below_bound():
    # all pairs just below x: the product (1 + 1/(2i-1)) is the extremal case
    for h in range(1, 8):
        starts = tuple(2 * i for i in range(h))
        pair = build_pair(2 * h + 1, starts)
        x = 2 * h
        assert pointwise_ratio_within_bound(pair, x)


def test_witness_params():
    params = WitnessSearchParams.make(2)
    assert params.Z == 1 and params.K == 3
    assert WitnessSearchParams.make(8).K == 7
    with pytest.raises(KwiseError):
        WitnessSearchParams.make(2, tau=4)
    with pytest.raises(KwiseError):
        WitnessSearchParams.make(2, tau=100)  # floor(log(100)/6) = 0


def test_find_witness_n30():
    spec = BinomialSpec(30, HALF)
    pair = build_pair(30, (14,))
    for x in (14, 15):
        w, r = find_witness(spec, pair, x)
        assert r <= 10
        assert abs(w - x) >= 3
        # exhaustive oracle over every admissible w in [0, n]
        pmf = spec.pmf_table
        brute = min(pmf[x] * pair.g_at(x) / (pmf[v] * pair.f_at(v)) for v in range(31)
                    if pair.f_at(v) and abs(v - x) >= 3)
        assert r == brute


def test_find_witness_full_mode_bounded_by_pointwise():
    spec = BinomialSpec(25, Fraction(1, 3))
    pair = build_pair(25, (4, 10))
    for x in range(26):
        if pair.f_at(x):
            _, r = find_witness(spec, pair, x, mode="full")
            assert r <= pointwise_ratio(pair, x)


def test_window_equals_full_when_argmin_inside():
    spec = BinomialSpec(40, Fraction(1, 3))
    pair = build_pair(40, (10, 12))
    w_full, r_full = find_witness(spec, pair, 11, mode="full")
    w_win, r_win = find_witness(spec, pair, 11)
    assert abs(w_full - 11) >= 3
    assert (w_full, r_full) == (w_win, r_win)


def test_no_witness_reported():
    spec = BinomialSpec(6, HALF)
    pair = build_pair(6, (0, 2))
    params = WitnessSearchParams.make(4)
    # every w with |w - 6| >= 3 inside [0, 6] is a zero of f
    with pytest.raises(NoWitness):
        find_witness(spec, pair, 6, params)


def test_census_examples():
    assert segment_zero_census(build_pair(10, (5,)), 0, 2, 5)[:2] == (2, 0)
    assert segment_zero_census(build_pair(20, (15,)), 0, 1, 5) == (0, 0, 0, 0)
    assert segment_zero_census(build_pair(10, (1, 3)), 0, 1, 8)[:2] == (4, 0)
    # left side mirrors: zeros {5,6} seen from x=10 with m=2, tau=5 -> (10-10, 8]
    assert segment_zero_census(build_pair(10, (5,)), 10, 2, 5)[2] == 2


def test_segment_claim_on_sweep():
    rng = random.Random(4)
    checked = 0
    for _ in range(80):
        n = rng.randint(10, 60)
        k = rng.choice([2, 4, 6, 8])
        if n - k // 2 < k // 2:
            continue
        pair = build_pair(n, random_config(n, k, rng))
        for x in pair.config.zeros:
            for m in (1, 2, 4, 7, 12):
                for tau in (5, Fraction(17, 2), 30):
                    for side in ("right", "left"):
                        rep = check_segment_claim(pair, x, m, tau, side)
                        if rep["applicable"]:
                            checked += 1
                            assert rep["pass"], rep
    assert checked > 1000


def test_segment_bound_formula():
    with mpmath.workprec(256):
        b = segment_claim_bound(4, 5, 1, 2)
        assert mpmath.almosteq(b, 8 * mpmath.exp(mpmath.mpf(48) / 5 + 6 - 2 * mpmath.log(5)))


def test_good_w_claim():
    rng = random.Random(8)
    for _ in range(30):
        n = rng.randint(10, 50)
        k = rng.choice([2, 4, 6, 8])
        if n - k // 2 < k // 2:
            continue
        pair = build_pair(n, random_config(n, k, rng))
        params = WitnessSearchParams.make(k)
        for x in pair.config.zeros:
            rep = check_good_w(pair, x, params)
            assert rep["pass"]
            assert rep["right"] - x >= 3 * params.Z and x - rep["left"] >= 3 * params.Z


def test_prob_shift_examples():
    spec = BinomialSpec(10, HALF)
    pmf = spec.pmf_table
    assert pmf[5] / pmf[6] == Fraction(252, 210) == Fraction(6, 5)
    assert pmf[5] / pmf[4] == Fraction(6, 5)
    rep = prob_shift_check(spec, 1)
    assert rep["mu"] == 5
    assert rep["up"]["pass"] and rep["down"]["pass"]
    with mpmath.workprec(256):
        assert mpmath.almosteq(rep["up"]["rhs"] / mpmath.mpf(pmf[6].numerator) * pmf[6].denominator, mpmath.e)
    with pytest.raises(KwiseError):
        prob_shift_check(spec, 0)


def test_prob_shift_skips_out_of_hypothesis():
    rep = prob_shift_check(BinomialSpec(10, Fraction(1, 10)), 1)
    assert not rep["up"]["applicable"] and not rep["down"]["applicable"]
    spec = BinomialSpec(20, HALF)
    rep = prob_shift_check(spec, 6)
    assert not rep["up"]["applicable"] and not rep["down"]["applicable"]
    assert list(admissible_ells(spec)) == [1, 2, 3, 4, 5]


def test_random_config_uniform_support():
    rng = random.Random(0)
    seen = {random_config(8, 4, rng).starts for _ in range(2000)}
    expected = {c for c in __import__("itertools").combinations(range(7), 2) if c[1] >= c[0] + 2}
    assert seen == expected
    assert all(isinstance(RootPairConfig(s), RootPairConfig) for s in seen)


def test_measured_maximum_regression():
    from kwisebound.suites import perturbation_suite

    records = perturbation_suite(witness_max_n=0)
    worst = next(r for r in records if r["check"] == "expectation_ratio_measured_max")
    assert all(r["pass"] for r in records)
    with mpmath.workprec(256):
        assert mpmath.almosteq(mpmath.mpf(worst["value"]), RECORDED_MEASURED_MAX, rel_eps=mpmath.mpf(10) ** -25)
