"""Exact ground truth: enumeration of S_n and the closed forms it checks.

Everything here is exact.  Generating polynomials ``sum_pi f(pi) q^maj(pi)``
are built once per ``(n, statistic)`` and then evaluated at any rational q.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, permutations
from typing import Callable, Sequence

from majq.qnum import (Permutation, QPoly, as_rational, maj, q_binomial,
                       q_factorial, q_int)
from majq import stats

__all__ = [
    "MAX_ENUM_N", "EnumerationTooLarge", "ExactDistribution", "enumerate_maj",
    "generating_polynomial", "exact_expectation", "closed_form_e_c1",
    "closed_form_var_c1_limit", "closed_form_e_c2", "fp_polynomial",
    "FpCheck", "verify_fp_recurrence", "shuffle_set", "ShuffleCheck",
    "verify_shuffle_identity", "all_shuffle_pairs", "plancherel_moments",
    "greene_prefix_sums", "value_pattern_weights", "PatternLawCheck",
    "verify_pattern_law", "random_shuffle_pair",
]

MAX_ENUM_N = 9


class EnumerationTooLarge(ValueError):
    def __init__(self, n: int):
        super().__init__(f"enumerating S_{n} means {math.factorial(n)} permutations; "
                         f"the limit is n <= {MAX_ENUM_N}")


@dataclass(frozen=True, eq=False)
class ExactDistribution:
    """All of S_n with their major indices; ``q^maj`` is the weight."""
    n: int
    perms: tuple[Permutation, ...]
    majs: tuple[int, ...]
    normalizer: QPoly

    def weight(self, p: Sequence[int]) -> QPoly:
        return QPoly.monomial(maj(p))

    @property
    def weights(self) -> dict[Permutation, QPoly]:
        return {p: QPoly.monomial(m) for p, m in zip(self.perms, self.majs)}

    def total_weight(self) -> QPoly:
        counts = [0] * (max(self.majs) + 1)
        for m in self.majs:
            counts[m] += 1
        return QPoly(counts)


@lru_cache(maxsize=None)
def enumerate_maj(n: int) -> ExactDistribution:
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    if n > MAX_ENUM_N:
        raise EnumerationTooLarge(n)
    perms = tuple(Permutation(p) for p in permutations(range(1, n + 1)))
    dist = ExactDistribution(n, perms, tuple(maj(p) for p in perms), q_factorial(n))
    if dist.total_weight() != dist.normalizer:
        raise AssertionError(f"sum of q^maj over S_{n} is not [n]_q!")
    return dist


def generating_polynomial(n: int, statistic: Callable[[Permutation], int]) -> QPoly:
    """``sum over S_n of statistic(pi) * q^maj(pi)``."""
    dist = enumerate_maj(n)
    counts = [0] * (max(dist.majs) + 1)
    for p, m in zip(dist.perms, dist.majs):
        counts[m] += int(statistic(p))
    return QPoly(counts)


def exact_expectation(n: int, statistic: Callable[[Permutation], int], q) -> Fraction:
    q = as_rational(q)
    if q <= 0:
        raise ValueError(f"q must be positive, got {q}")
    return Fraction(generating_polynomial(n, statistic)(q)) / q_factorial(n)(q)


def closed_form_e_c1(n: int, q) -> Fraction:
    """Mean fixed-point count: ``sum_{l=1..n} (1-q)^(l-1) / [l]_q``."""
    q = as_rational(q)
    return sum((Fraction((1 - q) ** (l - 1)) / q_int(l)(q) for l in range(1, n + 1)), Fraction(0))


def closed_form_var_c1_limit(q: float, tol: float = 1e-12) -> tuple[float, int]:
    """Limiting fixed-point variance ``sum_{l>=1} l (1-q)^(l-1) / [l]_q``.

    Terms are ``t_l = l (1-q)^l / (1 - q^l)``.  Every ratio ``t_{m+1}/t_m``
    with ``m >= l`` is below ``r = (l+1)/l * (1-q)``, so once ``r < 1`` the
    tail after ``t_l`` is below ``t_l * r / (1 - r)``.  Summation stops when
    that bound drops under ``tol``.
    Returns the value and the number of terms used.
    """
    if not 0 < q < 1:
        raise ValueError(f"need 0 < q < 1, got {q}")
    total = 0.0
    l = 0
    while True:
        l += 1
        term = l * (1 - q) ** l / (1 - q ** l)
        total += term
        r = (l + 1) / l * (1 - q)
        if r < 1 and term * r / (1 - r) < tol:
            return total, l


def closed_form_e_c2(n: int, q) -> Fraction:
    """Mean 2-cycle count: ``sum_{l=1..n//2} q^l (1-q)^(2l-2) / ([l]_q [2l]_q)``."""
    q = as_rational(q)
    if n < 2:
        return Fraction(0)
    return sum((Fraction(q ** l * (1 - q) ** (2 * l - 2)) / (q_int(l)(q) * q_int(2 * l)(q))
                for l in range(1, n // 2 + 1)), Fraction(0))


def fp_polynomial(n: int) -> QPoly:
    return generating_polynomial(n, lambda p: stats.count_k_cycles(p, 1))


def _one_minus_q_product(m: int) -> QPoly:
    out = QPoly([1])
    for i in range(1, m + 1):
        out = out * (QPoly([1]) - QPoly.monomial(i))
    return out


@dataclass
class FpCheck:
    """Per-step results of the fixed-point polynomial recurrence.

    ``passed[n]`` checks ``FP(n+1) = [n+1]_q FP(n) + prod_{i<=n} (1-q^i)``.
    ``upper_n_plus_1[n]`` checks the variant whose product runs to ``n+1``;
    it is kept to document that this variant is false.
    """
    passed: dict[int, bool] = field(default_factory=dict)
    upper_n_plus_1: dict[int, bool] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.passed.values())


def verify_fp_recurrence(n_max: int) -> FpCheck:
    if n_max > 8:
        raise ValueError("verify_fp_recurrence needs n_max <= 8")
    report = FpCheck()
    prev = fp_polynomial(1)
    for n in range(1, n_max):
        nxt = fp_polynomial(n + 1)
        step = q_int(n + 1) * prev
        report.passed[n] = nxt == step + _one_minus_q_product(n)
        report.upper_n_plus_1[n] = nxt == step + _one_minus_q_product(n + 1)
        prev = nxt
    return report


def _check_disjoint(a: Sequence[int], b: Sequence[int]) -> None:
    va, vb = set(a), set(b)
    if len(va) != len(a) or len(vb) != len(b) or va & vb:
        raise ValueError("shuffle arguments need distinct, disjoint values")
    if va | vb != set(range(1, len(a) + len(b) + 1)):
        raise ValueError("shuffle arguments must cover 1..m+n")


def shuffle_set(a: Sequence[int], b: Sequence[int]) -> list[tuple[int, ...]]:
    """All interleavings of two words on complementary value sets."""
    _check_disjoint(a, b)
    m, n = len(a), len(b)
    out = []
    for slots in combinations(range(m + n), m):
        word = [0] * (m + n)
        it_a, it_b = iter(a), iter(b)
        slot_set = set(slots)
        for pos in range(m + n):
            word[pos] = next(it_a) if pos in slot_set else next(it_b)
        out.append(tuple(word))
    return out


@dataclass(frozen=True)
class ShuffleCheck:
    a: tuple[int, ...]
    b: tuple[int, ...]
    lhs: QPoly
    rhs: QPoly
    size: int
    at_q: bool = True

    @property
    def ok(self) -> bool:
        return (self.lhs == self.rhs and self.at_q
                and self.size == math.comb(len(self.a) + len(self.b), len(self.a)))


def verify_shuffle_identity(a: Sequence[int], b: Sequence[int], q=None) -> ShuffleCheck:
    """Check ``sum_{tau} q^maj(tau) = [m+n]_q! / ([m]_q! [n]_q!) q^(maj a + maj b)``.

    Both sides are compared as polynomials; when ``q`` is given the two sides
    are also evaluated there.
    """
    a, b = tuple(a), tuple(b)
    taus = shuffle_set(a, b)
    counts: dict[int, int] = {}
    for t in taus:
        counts[maj(t)] = counts.get(maj(t), 0) + 1
    lhs = sum((QPoly.monomial(m, c) for m, c in counts.items()), QPoly())
    rhs = q_binomial(len(a) + len(b), len(a)) * QPoly.monomial(maj(a) + maj(b))
    at_q = True
    if q is not None:
        q = as_rational(q)
        at_q = lhs(q) == rhs(q)
    return ShuffleCheck(a, b, lhs, rhs, len(taus), at_q)


def all_shuffle_pairs(total: int):
    """Every ordered pair of words on complementary value sets of ``1..total``."""
    values = range(1, total + 1)
    for m in range(total + 1):
        for sub in combinations(values, m):
            rest = [v for v in values if v not in sub]
            for a in permutations(sub):
                for b in permutations(rest):
                    yield a, b


def random_shuffle_pair(total: int, rng: random.Random):
    vals = list(range(1, total + 1))
    rng.shuffle(vals)
    m = rng.randint(1, total - 1)
    return tuple(vals[:m]), tuple(vals[m:])


def plancherel_moments(i: int, j: int, q: float) -> tuple[float, float, float]:
    """Limit mean of ``lambda_i/n``, limit variance of the scaled row ``i``,
    and the limit covariance of rows ``i`` and ``j``."""
    if i < 1 or j < 1:
        raise ValueError("rows are 1-indexed")
    if not 0 < q < 1:
        raise ValueError(f"need 0 < q < 1, got {q}")
    p_i = (1 - q) * q ** (i - 1)
    var_i = (1 - q) * q ** (i - 1) - (1 - q) ** 2 * q ** (2 * (i - 1))
    cov = -(1 - q) ** 2 * q ** (i + j - 2)
    return p_i, var_i, cov


def greene_prefix_sums(p: Sequence[int], i_max: int) -> list[int]:
    """Brute-force maxima of total length over ``i``-tuples of disjoint
    increasing subsequences, for ``i = 1..i_max``.

    Exhaustive over subsets (bitmasks), so only for small ``n``.
    """
    n = len(p)
    if n > 12:
        raise ValueError("brute force limited to n <= 12")
    full = (1 << n) - 1
    inc = [False] * (full + 1)
    for mask in range(full + 1):
        last, ok = 0, True
        for k in range(n):
            if mask >> k & 1:
                if p[k] < last:
                    ok = False
                    break
                last = p[k]
        inc[mask] = ok
    inc_masks = [m for m in range(full + 1) if inc[m]]
    popcount = [bin(m).count("1") for m in range(full + 1)]

    best = [0] * (full + 1)  # zero subsequences cover nothing
    out = []
    for _ in range(i_max):
        nxt = [0] * (full + 1)
        for avail in range(full + 1):
            top = 0
            for a in inc_masks:
                if a & ~avail:
                    continue
                v = popcount[a] + best[avail ^ a]
                if v > top:
                    top = v
            nxt[avail] = top
        best = nxt
        out.append(best[full])
    return out


def value_pattern_weights(n: int, k: int) -> dict[tuple[tuple[int, ...], tuple[int, ...]], QPoly]:
    """For each value set ``S`` of size ``k`` and pattern ``sigma``:
    ``sum of q^maj(pi)`` over pi in S_n whose entries ``S`` form ``sigma``."""
    dist = enumerate_maj(n)
    subsets = list(combinations(range(1, n + 1), k))
    acc: dict[tuple, list[int]] = {}
    width = max(dist.majs) + 1
    for p, m in zip(dist.perms, dist.majs):
        pos = [0] * (n + 1)
        for i, v in enumerate(p):
            pos[v] = i
        for s in subsets:
            # entries of s in position order, standardized
            order = sorted(range(k), key=lambda t: pos[s[t]])
            pat = [0] * k
            for r, t in enumerate(order):
                pat[r] = t + 1
            key = (s, tuple(pat))
            row = acc.get(key)
            if row is None:
                row = acc[key] = [0] * width
            row[m] += 1
    return {key: QPoly(row) for key, row in acc.items()}


@dataclass
class PatternLawCheck:
    n: int
    q: Fraction
    failures: list[str] = field(default_factory=list)
    checked: int = 0

    @property
    def ok(self) -> bool:
        return not self.failures


def verify_pattern_law(n: int, q, ks=(2, 3)) -> PatternLawCheck:
    """Check the fixed-value-set pattern law and the mean pattern count.

    For each size ``k``, every value set must form ``sigma`` with probability
    ``q^maj(sigma)/[k]_q!``, and the exact mean of the occurrence count must
    be ``C(n, k)`` times that.
    """
    q = as_rational(q)
    report = PatternLawCheck(n, q)
    norm = q_factorial(n)(q)
    dist = enumerate_maj(n)
    for k in ks:
        if k > n:
            continue
        sigmas = [tuple(s) for s in permutations(range(1, k + 1))]
        weights = value_pattern_weights(n, k)
        for s in combinations(range(1, n + 1), k):
            for sigma in sigmas:
                got = Fraction(weights.get((s, sigma), QPoly())(q)) / norm
                report.checked += 1
                if got != stats.pattern_probability(sigma, q):
                    report.failures.append(f"n={n} S={s} sigma={sigma}: {got}")
        totals = {sigma: [0] * (max(dist.majs) + 1) for sigma in sigmas}
        for p, m in zip(dist.perms, dist.majs):
            for pat, c in stats.count_all_patterns(p, k).items():
                totals[pat][m] += c
        for sigma in sigmas:
            mean = Fraction(QPoly(totals[sigma])(q)) / norm
            report.checked += 1
            if mean != stats.expected_pattern_count(n, sigma, q):
                report.failures.append(f"n={n} sigma={sigma}: mean {mean}")
    return report
