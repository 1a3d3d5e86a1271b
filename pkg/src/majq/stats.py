"""Permutation statistics: RSK shape, LIS, cycles and pattern counts."""
from __future__ import annotations

from bisect import bisect_left
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Sequence

from majq.qnum import Permutation, as_rational, cycles, maj, q_factorial

__all__ = [
    "PatternTooLarge", "rsk_shape", "lis", "pattern_of", "pattern_at_values",
    "count_pattern", "count_all_patterns", "count_inversions",
    "pattern_probability", "expected_pattern_count", "count_k_cycles",
    "cycle_counts",
]

# refuse generic pattern scans costing more than n**k index tuples
MAX_PATTERN_COST = 10**9


class PatternTooLarge(ValueError):
    def __init__(self, n: int, k: int):
        self.cost = n ** k
        super().__init__(f"pattern scan of n={n}, k={k} costs n^k = {self.cost} > {MAX_PATTERN_COST}")


def rsk_shape(p: Sequence[int], max_rows: int | None = None) -> tuple[int, ...]:
    """Shape of the RSK insertion tableau of ``p``.

    Only the row words are kept.  With ``max_rows`` the insertion stops bumping
    past that row; the first ``max_rows`` parts are still exact because upper
    rows never see what happens below them.
    """
    rows: list[list[int]] = []
    for v in p:
        r = 0
        while True:
            if r == len(rows):
                if max_rows is None or r < max_rows:
                    rows.append([v])
                break
            row = rows[r]
            j = bisect_left(row, v)
            if j == len(row):
                row.append(v)
                break
            row[j], v = v, row[j]
            r += 1
    return tuple(len(row) for row in rows)


def lis(p: Sequence[int]) -> int:
    """Longest increasing subsequence by patience sorting."""
    piles: list[int] = []
    for v in p:
        j = bisect_left(piles, v)
        if j == len(piles):
            piles.append(v)
        else:
            piles[j] = v
    return len(piles)


def pattern_of(values: Sequence[int]) -> tuple[int, ...]:
    """Standardize distinct values to the permutation they are order-isomorphic to."""
    ranks = sorted(range(len(values)), key=values.__getitem__)
    out = [0] * len(values)
    for r, i in enumerate(ranks, start=1):
        out[i] = r
    return tuple(out)


def pattern_at_values(p: Sequence[int], values) -> tuple[int, ...]:
    """Pattern formed by the entries of ``p`` whose values lie in ``values``.

    Entries are read in position order.  Equivalently this is the inverse of
    the pattern that the positions ``values`` form in ``p^-1``.
    """
    vs = set(values)
    return pattern_of([v for v in p if v in vs])


def _check_cost(n: int, k: int) -> None:
    if n ** k > MAX_PATTERN_COST:
        raise PatternTooLarge(n, k)


def count_pattern(p: Sequence[int], sigma: Sequence[int]) -> int:
    """Occurrences of ``sigma`` among index tuples ``i1 < ... < ik`` of ``p``."""
    sigma = tuple(Permutation(sigma))
    k, n = len(sigma), len(p)
    if k > 6:
        raise ValueError("patterns are limited to k <= 6")
    if k > n:
        return 0
    if sigma == (1, 2):
        return comb(n, 2) - count_inversions(p)
    if sigma == (2, 1):
        return count_inversions(p)
    _check_cost(n, k)
    # adjacent up/down mismatches reject most tuples before standardizing
    count = 0
    for idx in combinations(range(n), k):
        vals = [p[i] for i in idx]
        ok = True
        for a in range(k - 1):
            if (vals[a] < vals[a + 1]) != (sigma[a] < sigma[a + 1]):
                ok = False
                break
        if ok and pattern_of(vals) == sigma:
            count += 1
    return count


def count_all_patterns(p: Sequence[int], k: int) -> dict[tuple[int, ...], int]:
    """Counts of every pattern of size ``k`` in one scan."""
    _check_cost(len(p), k)
    out: dict[tuple[int, ...], int] = {}
    for idx in combinations(range(len(p)), k):
        pat = pattern_of([p[i] for i in idx])
        out[pat] = out.get(pat, 0) + 1
    return out


def count_inversions(p: Sequence[int]) -> int:
    """Inversion count with a Fenwick tree, O(n log n)."""
    n = len(p)
    tree = [0] * (n + 1)
    inv = 0
    for seen, v in enumerate(p):
        # elements seen so far that are <= v
        s, i = 0, v
        while i > 0:
            s += tree[i]
            i -= i & -i
        inv += seen - s
        i = v
        while i <= n:
            tree[i] += 1
            i += i & -i
    return inv


def pattern_probability(sigma: Sequence[int], q) -> Fraction:
    """Probability that a fixed set of ``k`` entry values forms ``sigma``."""
    q = as_rational(q)
    return q ** maj(sigma) / q_factorial(len(sigma))(q)


def expected_pattern_count(n: int, sigma: Sequence[int], q) -> Fraction:
    k = len(sigma)
    if n < k:
        raise ValueError(f"need n >= k, got n={n}, k={k}")
    return comb(n, k) * pattern_probability(sigma, q)


def count_k_cycles(p: Sequence[int], k: int) -> int:
    if k == 1:
        return sum(1 for i, v in enumerate(p, start=1) if i == v)
    return sum(1 for c in cycles(p) if len(c) == k)


def cycle_counts(p: Sequence[int]) -> dict[int, int]:
    out: dict[int, int] = {}
    for c in cycles(p):
        out[len(c)] = out.get(len(c), 0) + 1
    return out
