from fractions import Fraction
from math import factorial

import pytest
from hypothesis import given, strategies as st

from majq.qnum import (Permutation, QPoly, as_rational, cycle_type, cycles, descent_set,
                       inverse, maj, prob_mass, q_binomial, q_factorial, q_int)
from oracles import all_perms, maj_coefficients, q_factorial_coefficients

EXAMPLE = Permutation.parse("7134265")
perms = st.integers(1, 9).flatmap(lambda n: st.permutations(range(1, n + 1)))
small_coeffs = st.lists(st.integers(-20, 20), max_size=6)


def test_qpoly_trims_trailing_zeros():
    assert QPoly((1, 2, 0, 0)).coeffs == (1, 2)
    assert QPoly((0, 0)).coeffs == ()
    assert QPoly(()).degree == -1


@given(small_coeffs, small_coeffs, st.fractions(min_value=-3, max_value=3))
def test_qpoly_ring_ops_match_evaluation(a, b, x):
    pa, pb = QPoly(a), QPoly(b)
    assert (pa + pb)(x) == pa(x) + pb(x)
    assert (pa - pb)(x) == pa(x) - pb(x)
    assert (pa * pb)(x) == pa(x) * pb(x)
    assert (pa ** 2)(x) == pa(x) ** 2


@given(small_coeffs)
def test_qpoly_json_round_trip(a):
    p = QPoly(a)
    assert QPoly.from_json(p.to_json()) == p


def test_qpoly_big_coefficients_stay_exact():
    p = QPoly((1, 1)) ** 80
    assert p.coeffs[40] == 107507208733336176461620
    assert p(1) == 2 ** 80


def test_q_int():
    assert q_int(1) == QPoly((1,))
    assert q_int(3) == QPoly((1, 1, 1))
    assert q_int(5)(1) == 5


def test_q_factorial_examples():
    assert q_factorial(0) == QPoly((1,))
    assert q_factorial(3) == QPoly((1, 2, 2, 1))
    assert q_factorial(4)(1) == 24


@pytest.mark.parametrize("n", range(13))
def test_q_factorial_at_one_is_factorial(n):
    assert q_factorial(n)(1) == factorial(n)


@pytest.mark.parametrize("n", range(1, 9))
def test_q_factorial_matches_oracle(n):
    assert list(q_factorial(n).coeffs) == q_factorial_coefficients(n)


@pytest.mark.parametrize("n", range(1, 8))
def test_q_binomial_times_factorials(n):
    for k in range(n + 1):
        assert q_binomial(n, k) * q_factorial(k) * q_factorial(n - k) == q_factorial(n)


def test_descents_and_maj_examples():
    assert descent_set(EXAMPLE) == {1, 4, 6}
    assert maj(EXAMPLE) == 11
    assert descent_set(Permutation.identity(6)) == set()
    assert maj(Permutation.identity(6)) == 0
    assert descent_set((5, 4, 3, 2, 1)) == {1, 2, 3, 4}
    assert maj((5, 4, 3, 2, 1)) == 10


@pytest.mark.parametrize("n", range(1, 9))
def test_macmahon_identity(n):
    # independent maj tally against the q-factorial
    assert maj_coefficients(n) == list(q_factorial(n).coeffs)


def test_prob_mass_examples():
    # 1 / (1 + 2/2 + 2/4 + 1/8)
    assert prob_mass((1, 2, 3), Fraction(1, 2)) == Fraction(8, 21)
    assert prob_mass((1,), Fraction(5, 3)) == 1
    assert sum(prob_mass(p, Fraction(1, 3)) for p in all_perms(4)) == 1


@pytest.mark.parametrize("n", range(1, 8))
@pytest.mark.parametrize("q", [Fraction(1, 3), Fraction(1, 2), Fraction(3, 2)])
def test_prob_mass_normalizes(n, q):
    assert sum(prob_mass(p, q) for p in all_perms(n)) == 1


def test_prob_mass_rejects_bad_q():
    with pytest.raises(ValueError):
        prob_mass((1, 2), 0)
    with pytest.raises(ValueError):
        prob_mass((1, 2), -1)
    with pytest.raises(TypeError):
        as_rational(0.5)


def test_permutation_validation_and_parsing():
    assert Permutation.parse("3 1 2") == (3, 1, 2)
    assert Permutation.parse("3,1,2") == (3, 1, 2)
    assert str(EXAMPLE) == "7 1 3 4 2 6 5"
    assert EXAMPLE(1) == 7
    for bad in [(0, 1), (1, 1), (2, 3)]:
        with pytest.raises(ValueError):
            Permutation(bad)


def test_cycles_of_example():
    # 1->7->5->2->1 is a 4-cycle; 3, 4 and 6 are fixed
    assert cycles(EXAMPLE) == [(1, 7, 5, 2), (3,), (4,), (6,)]
    assert cycle_type(EXAMPLE) == (4, 1, 1, 1)
    assert cycle_type((2, 1)) == (2,)


@given(perms)
def test_inverse_is_involution(p):
    p = Permutation(p)
    assert inverse(inverse(p)) == p
    assert inverse(Permutation.identity(len(p))) == Permutation.identity(len(p))
    assert all(p(inverse(p)(i)) == i for i in range(1, p.n + 1))


@given(perms)
def test_cycle_type_partitions_n(p):
    ct = cycle_type(p)
    assert sum(ct) == len(p)
    assert list(ct) == sorted(ct, reverse=True)
