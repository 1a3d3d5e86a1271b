import random
from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, strategies as st

from majq import exact
from majq.qnum import QPoly, maj, q_binomial, q_factorial
from majq.stats import count_k_cycles, count_pattern, expected_pattern_count
from oracles import all_perms, expectation, fixed_points, maj_of, pattern_count_brute, two_cycles

QS = [Fraction(1, 3), Fraction(1, 2), Fraction(2, 3)]

# frozen from the brute-force oracle in oracles.py
E_C1 = {
    (5, Fraction(1, 3)): Fraction(33661, 15730),
    (5, Fraction(1, 2)): Fraction(1709, 1085),
    (8, Fraction(1, 2)): Fraction(33790906, 21082635),
    (8, Fraction(2, 3)): Fraction(464464868442, 364313725685),
}
E_C2 = {
    (5, Fraction(1, 3)): Fraction(11, 40),
    (5, Fraction(1, 2)): Fraction(16, 45),
    (8, Fraction(1, 2)): Fraction(67114, 187425),
    (8, Fraction(1, 3)): Fraction(2705197, 9700600),
}
# series value with 30-digit arithmetic is 2.74403388875948836...
VAR_C1_LIMIT_HALF = 2.744033888759488


def test_enumeration_small_cases():
    d1 = exact.enumerate_maj(1)
    assert d1.perms == ((1,),) and d1.total_weight() == QPoly((1,))
    d3 = exact.enumerate_maj(3)
    expected = {(1, 2, 3): 0, (1, 3, 2): 2, (2, 1, 3): 1, (2, 3, 1): 2, (3, 1, 2): 1, (3, 2, 1): 3}
    assert {p: w for p, w in d3.weights.items()} == {p: QPoly.monomial(m) for p, m in expected.items()}
    assert d3.total_weight() == QPoly((1, 2, 2, 1))


@pytest.mark.parametrize("n", range(1, 9))
def test_enumeration_normalizer(n):
    d = exact.enumerate_maj(n)
    assert len(d.perms) == len(set(d.perms)) == len(all_perms(n))
    assert d.total_weight() == q_factorial(n)


def test_enumeration_guard():
    with pytest.raises(exact.EnumerationTooLarge):
        exact.enumerate_maj(10)


def test_exact_expectation_examples():
    half = Fraction(1, 2)
    assert exact.exact_expectation(2, lambda p: count_k_cycles(p, 1), half) == Fraction(4, 3)
    assert exact.exact_expectation(6, lambda p: 1, Fraction(2, 7)) == 1
    # uniform mean of the maj values 0, 2, 1, 2, 1, 3
    assert exact.exact_expectation(3, maj, 1) == Fraction(3, 2)
    assert expectation(3, maj_of, 1) == Fraction(3, 2)


@pytest.mark.parametrize("n", range(1, 8))
@pytest.mark.parametrize("q", QS)
def test_exact_expectation_matches_oracle(n, q):
    assert exact.exact_expectation(n, lambda p: count_k_cycles(p, 1), q) == expectation(n, fixed_points, q)


def test_closed_form_means_frozen_values():
    for (n, q), v in E_C1.items():
        assert exact.closed_form_e_c1(n, q) == v
    for (n, q), v in E_C2.items():
        assert exact.closed_form_e_c2(n, q) == v


def test_closed_form_mean_examples():
    for n in (1, 4, 9):
        assert exact.closed_form_e_c1(n, 1) == 1
    assert exact.closed_form_e_c1(2, Fraction(1, 2)) == Fraction(4, 3)
    for n in (2, 5, 8):
        assert exact.closed_form_e_c2(n, 1) == Fraction(1, 2)
    for n in (2, 3):
        assert exact.closed_form_e_c2(n, Fraction(1, 2)) == Fraction(1, 3)
    assert exact.closed_form_e_c2(1, Fraction(1, 2)) == 0


@pytest.mark.parametrize("n", range(1, 7))
@pytest.mark.parametrize("q", QS)
def test_closed_form_means_match_brute_oracle(n, q):
    assert exact.closed_form_e_c1(n, q) == expectation(n, fixed_points, q)
    assert exact.closed_form_e_c2(n, q) == expectation(n, two_cycles, q)


def test_var_limit_series():
    value, terms = exact.closed_form_var_c1_limit(0.5, 1e-12)
    assert abs(value - VAR_C1_LIMIT_HALF) < 1e-12
    assert terms == 46
    assert exact.closed_form_var_c1_limit(0.5, 1e-12) == (value, terms)
    partial = [exact.closed_form_var_c1_limit(0.5, tol)[0] for tol in (1e-2, 1e-4, 1e-8)]
    assert partial == sorted(partial) and partial[-1] < value
    with pytest.raises(ValueError):
        exact.closed_form_var_c1_limit(1.0)


def test_fp_polynomial_examples():
    assert exact.fp_polynomial(1) == QPoly((1,))
    assert exact.fp_polynomial(2) == QPoly((2,))
    assert exact.fp_polynomial(3) == QPoly((3, 1, 1, 1))


def test_fp_recurrence():
    report = exact.verify_fp_recurrence(8)
    assert report.ok and sorted(report.passed) == list(range(1, 8))
    # the variant with the product running to n + 1 fails at every step
    assert not any(report.upper_n_plus_1.values())
    with pytest.raises(ValueError):
        exact.verify_fp_recurrence(9)


@pytest.mark.parametrize("n", range(1, 8))
def test_fp_at_q_one_is_factorial(n):
    from math import factorial
    assert exact.fp_polynomial(n)(1) == factorial(n)


def test_shuffle_set_examples():
    assert sorted(exact.shuffle_set((1,), (2,))) == [(1, 2), (2, 1)]
    assert len(exact.shuffle_set((1, 3), (2,))) == 3
    assert sorted(exact.shuffle_set((1, 3), (2,))) == [(1, 2, 3), (1, 3, 2), (2, 1, 3)]
    for bad in [((1, 2), (2,)), ((1,), (3,))]:
        with pytest.raises(ValueError):
            exact.shuffle_set(*bad)


@given(st.integers(1, 7).flatmap(lambda t: st.permutations(range(1, t + 1))), st.data())
def test_shuffles_contain_both_words(perm, data):
    m = data.draw(st.integers(0, len(perm)))
    a, b = tuple(perm[:m]), tuple(perm[m:])
    out = exact.shuffle_set(a, b)
    assert len(out) == len(set(out)) == comb(len(perm), m)
    for tau in out:
        assert tuple(v for v in tau if v in a) == a
        assert tuple(v for v in tau if v in b) == b


def test_shuffle_identity_by_hand():
    check = exact.verify_shuffle_identity((1,), (2,))
    assert check.ok and check.lhs == QPoly((1, 1))
    assert check.rhs == q_binomial(2, 1)


@pytest.mark.parametrize("total", range(1, 7))
def test_shuffle_identity_exhaustive(total):
    for a, b in exact.all_shuffle_pairs(total):
        check = exact.verify_shuffle_identity(a, b, q=Fraction(2, 5))
        assert check.ok, (a, b)
        assert check.lhs(1) == comb(total, len(a)) == check.size


def test_shuffle_identity_random_pairs():
    rng = random.Random(17)
    for total in (7, 8):
        for _ in range(100):
            assert exact.verify_shuffle_identity(*exact.random_shuffle_pair(total, rng)).ok


def test_plancherel_moments():
    assert exact.plancherel_moments(1, 1, 0.5)[:2] == (0.5, 0.25)
    assert exact.plancherel_moments(1, 2, 0.5)[2] == pytest.approx(-0.125)
    for q in (0.1, 0.5, 0.9):
        for i in range(1, 6):
            assert exact.plancherel_moments(i, i, q)[1] > 0


def test_greene_brute_force_guard():
    with pytest.raises(ValueError):
        exact.greene_prefix_sums(tuple(range(1, 14)), 2)


@pytest.mark.parametrize("n", range(2, 7))
def test_pattern_law_and_means(n):
    for q in QS:
        assert exact.verify_pattern_law(n, q).ok


def test_pattern_expectation_matches_oracle():
    q = Fraction(2, 3)
    for sigma in [(1, 3, 2), (3, 1, 2), (2, 1)]:
        got = exact.exact_expectation(6, lambda p: count_pattern(p, sigma), q)
        assert got == expected_pattern_count(6, sigma, q)
        assert got == expectation(6, lambda p: pattern_count_brute(p, sigma), q)
