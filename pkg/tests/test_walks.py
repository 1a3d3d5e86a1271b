import math
from fractions import Fraction
import statistics

import numpy as np
import pytest
from hypothesis import given, strategies as st

from majq.exact import closed_form_e_c2
from majq.qnum import cycles, inverse
from majq.sampler import gamma, geometric_words, make_rng
from majq.walks import (LatticeWalkFamily, diagonal_runs, diagonal_runs_lattice, fixed_runs,
                        fixed_run_sizes_batch, permuton_segments, runs, step_endpoints,
                        walk_deviation, walk_family)

EXAMPLE_WORD = (5, 2, 3, 3, 0, 1, 6)
words = st.lists(st.integers(0, 5), min_size=1, max_size=40)


def random_words(count, seed):
    """``count`` words with n <= 200 and q drawn from {0.3, 0.5, 0.9}."""
    rng = make_rng(seed)
    out = []
    for _ in range(count):
        n = int(rng.integers(1, 201))
        q = float(rng.choice([0.3, 0.5, 0.9]))
        out.append(tuple(int(g) for g in geometric_words(n, q, 1, rng)[0]))
    return out


CORPUS = random_words(1000, 2024)


def test_runs_of_example_word():
    assert runs(EXAMPLE_WORD).levels == ((5,), (6,), (2,), (3, 4), (), (1,), (7,))
    assert runs((0, 0, 0)).levels == ((1, 2, 3),)


@given(words)
def test_runs_partition_indices(w):
    flat = sorted(i for lv in runs(w).levels for i in lv)
    assert flat == list(range(1, len(w) + 1))


def test_all_zero_word_has_one_full_walk():
    fam = walk_family((0,) * 5)
    assert fam.truncation == 1
    assert fam.walk(0).tolist() == [0, 1, 2, 3, 4, 5]
    assert fam.walk(3).tolist() == [0] * 6


def test_example_word_level_three():
    fam = walk_family(EXAMPLE_WORD)
    l3 = fam.walk(3)
    assert l3[0] == 2
    steps = [y for y in range(1, 8) if l3[y] - l3[y - 1] == 1]
    assert steps == [3, 4]


def check_family_invariants(w):
    n = len(w)
    fam = walk_family(w)
    sizes = runs(w).sizes
    starts = fam.starts()
    assert starts[0] == n - sizes[0]
    for i in range(1, fam.truncation):
        assert starts[i] == starts[i - 1] - sizes[i]
    inc = np.diff(fam.walks, axis=1)
    assert set(np.unique(inc)) <= {0, 1}
    assert int(inc.sum()) == n
    for i in range(fam.truncation):
        assert fam.walks[i, -1] - fam.walks[i, 0] == sizes[i]
    # each diagram point (x, pi(x)) ends exactly one upright step
    pi = gamma(w)
    ends = step_endpoints(w, fam)
    assert sorted(ends) == sorted((x, pi(x)) for x in range(1, n + 1))
    pinv = inverse(pi)
    for x, y in ends:
        assert x == pinv(y)


def test_walk_family_invariants_on_corpus():
    for w in CORPUS:
        check_family_invariants(w)


@given(words)
def test_walk_family_invariants_property(w):
    check_family_invariants(w)


def test_fixed_runs_examples():
    assert fixed_runs((0,) * 6) == [6]
    assert fixed_runs((0, 1, 2)) == [0, 1, 0]
    assert fixed_runs(EXAMPLE_WORD) == [0, 1, 0, 2, 0, 0, 0]


def test_fixed_runs_are_intervals_and_count_fixed_points():
    for w in CORPUS:
        pi = gamma(w)
        sizes = fixed_runs(w)  # asserts the interval property itself
        assert sum(sizes) == sum(1 for i in range(1, len(w) + 1) if pi(i) == i)


def test_fixed_run_batch_matches_scalar():
    w = geometric_words(30, 0.5, 200, make_rng(3))
    perms = np.array([gamma(r) for r in w.tolist()])
    batch = fixed_run_sizes_batch(w, perms, 3)
    for row, sizes in zip(w.tolist(), batch.tolist()):
        assert sizes == (fixed_runs(row) + [0, 0, 0])[:3]


def test_diagonal_runs_examples():
    assert diagonal_runs((0, 0, 0, 0)) == {}
    assert gamma((0, 1)) == (2, 1)
    assert diagonal_runs((0, 1)) == {(0, 1): 1}
    assert diagonal_runs((1, 0)) == {}


def test_diagonal_runs_lattice_matches_cycles():
    for w in CORPUS:
        if len(w) <= 50:
            assert diagonal_runs_lattice(w) == diagonal_runs(w)
            total = sum(1 for c in cycles(gamma(w)) if len(c) == 2)
            assert sum(diagonal_runs(w).values()) == total


def test_two_cycle_mean_matches_closed_form():
    n, q, N = 500, 0.5, 3000
    w = geometric_words(n, q, N, make_rng(77))
    x = np.array([sum(diagonal_runs(r).values()) for r in w.tolist()], dtype=float)
    target = float(closed_form_e_c2(n, Fraction(1, 2)))
    assert abs(x.mean() - target) < 4 * x.std(ddof=1) / math.sqrt(N)


def test_joint_fixed_run_survival_factorizes():
    n, q, N = 500, 0.5, 40000
    rng = make_rng(31)
    w = geometric_words(n, q, N, rng)
    idx = np.argsort(-w, axis=1, kind="stable") + 1
    d = fixed_run_sizes_batch(w, idx, 2)
    p0, p1 = 0.5, 0.25
    for k, l in [(1, 1), (2, 1), (1, 2)]:
        target = p0 ** k * p1 ** l
        est = ((d[:, 0] >= k) & (d[:, 1] >= l)).mean()
        assert abs(est - target) < 4 * math.sqrt(target * (1 - target) / N)


def test_permuton_segments():
    (seg,) = permuton_segments(0.5, 1)
    assert seg.start == (0.5, 0.0) and seg.end == (1.0, 1.0)
    seg = permuton_segments(0.5, 2)[1]
    assert seg.start == (0.25, 0.0) and seg.end == (0.5, 1.0)
    segs = permuton_segments(0.9, 3)
    assert [s.start[0] for s in segs] == pytest.approx([0.9, 0.81, 0.729])
    assert [s.end[0] for s in segs] == pytest.approx([1.0, 0.9, 0.81])
    with pytest.raises(ValueError):
        permuton_segments(1.0, 2)


def test_deviation_vanishes_for_walks_on_their_lines():
    n, q, levels = 1000, 0.5, 60
    y = np.arange(n + 1)
    walks = np.array([n * q ** (i + 1) + q ** i * (1 - q) * y for i in range(levels)])
    assert walk_deviation(LatticeWalkFamily(n, walks), q) < 1e-15


def test_deviation_is_small_and_shrinks_with_n():
    q = 0.5
    dev = lambda n, s: walk_deviation(walk_family(geometric_words(n, q, 1, make_rng(s))[0]), q)
    small = statistics.median(dev(100, s) for s in range(20))
    large = statistics.median(dev(10**4, s) for s in range(20))
    assert large < small
    assert large < 0.05
