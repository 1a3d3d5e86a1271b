"""Seeded Monte Carlo checks against the exact and limiting formulas.

Every report is a deterministic function of its arguments and seed.  Samples
are drawn block by block through :func:`majq.sampler.map_blocks`, and the
per-block partial results are combined in block order.

Pass rules are fixed per test: the chi-square test uses the 99.9th
percentile, and moment comparisons allow 4 standard errors.
"""
from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from itertools import permutations
from typing import Callable, Sequence

import numpy as np
from scipy import stats as sps

from majq import exact, stats
from majq.qnum import Permutation, prob_mass
from majq.sampler import geometric_words, make_rng, map_blocks
from majq.walks import fixed_run_sizes_batch, walk_deviation, walk_family

__all__ = [
    "Moments", "EstimateReport", "GofReport", "MomentCheck", "LambdaReport",
    "NormalityReport", "SurvivalCheck", "SurvivalReport", "BATCH_STATISTICS",
    "batch_statistic", "estimate", "chi_square_threshold", "gof_chi_square",
    "clt_lambda_check", "normality_diagnostic", "pattern_samples",
    "lambda_rows", "fixed_run_survival", "walk_deviation_trials",
    "VarianceOrderReport", "variance_order", "report_dict",
]

TOLERANCE_SIGMAS = 4.0
GOF_PERCENTILE = 0.999
BOOTSTRAP_RESAMPLES = 200
# stream index reserved for bootstrap resampling, far from sampling blocks
BOOTSTRAP_STREAM = 2**40


@dataclass
class Moments:
    """Count, mean and centred second moment; merged with Chan's update."""
    count: int = 0
    mean: float = 0.0
    m2: float = 0.0

    @classmethod
    def of(cls, values: np.ndarray) -> "Moments":
        values = np.asarray(values, dtype=float)
        if values.size == 0:
            return cls()
        mean = float(values.mean())
        return cls(values.size, mean, float(((values - mean) ** 2).sum()))

    def merge(self, other: "Moments") -> "Moments":
        if not self.count:
            return other
        if not other.count:
            return self
        n = self.count + other.count
        delta = other.mean - self.mean
        mean = self.mean + delta * other.count / n
        m2 = self.m2 + other.m2 + delta * delta * self.count * other.count / n
        return Moments(n, mean, m2)

    @property
    def variance(self) -> float:
        return self.m2 / (self.count - 1)


@dataclass
class EstimateReport:
    statistic: str
    n: int
    q: float
    N: int
    mean: float
    variance: float
    se: float
    seed: int
    elapsed: float = field(compare=False, default=0.0)


# -- vectorised statistics over a block of permutations ------------------------

def _c1(perms, words):
    return (perms == np.arange(1, perms.shape[1] + 1)).sum(axis=1)


def _c2(perms, words):
    p0 = perms - 1
    pp = np.take_along_axis(p0, p0, axis=1)
    idx = np.arange(perms.shape[1])
    return ((pp == idx) & (p0 != idx)).sum(axis=1) // 2


def _maj(perms, words):
    desc = perms[:, :-1] > perms[:, 1:]
    return (desc * np.arange(1, perms.shape[1])).sum(axis=1)


def _rowwise(fn):
    def apply(perms, words):
        return np.array([fn(row) for row in perms.tolist()], dtype=np.int64)
    return apply


BATCH_STATISTICS: dict[str, Callable] = {
    "c1": _c1,
    "c2": _c2,
    "maj": _maj,
    "inversions": _rowwise(stats.count_inversions),
    "lis": _rowwise(stats.lis),
    "lambda1": _rowwise(lambda p: stats.rsk_shape(p, max_rows=1)[0]),
    "constant": lambda perms, words: np.ones(perms.shape[0], dtype=np.int64),
}


def batch_statistic(name: str) -> Callable:
    """Look up a block statistic; ``pattern:231`` counts that pattern."""
    if name in BATCH_STATISTICS:
        return BATCH_STATISTICS[name]
    if name.startswith("pattern:"):
        sigma = Permutation.parse(name.split(":", 1)[1])
        return _rowwise(lambda p: stats.count_pattern(p, sigma))
    raise KeyError(f"unknown statistic {name!r}")


def estimate(statistic, n: int, q: float, N: int, seed: int, threads: int = 1) -> EstimateReport:
    """Mean, variance and standard error of a statistic under the sampler.

    ``statistic`` is a name from :data:`BATCH_STATISTICS` (or ``pattern:...``)
    or a callable taking one :class:`Permutation`.
    """
    if N < 100:
        raise ValueError(f"estimate needs N >= 100, got {N}")
    if callable(statistic):
        name = getattr(statistic, "__name__", "custom")
        fn = _rowwise(lambda row: statistic(Permutation(row)))
    else:
        name, fn = statistic, batch_statistic(statistic)
    t0 = time.perf_counter()
    parts = map_blocks(lambda p, w: Moments.of(fn(p, w)), n, q, N, seed, threads)
    total = Moments()
    for part in parts:
        total = total.merge(part)
    var = total.variance
    return EstimateReport(name, n, q, N, total.mean, var, math.sqrt(var / N), seed,
                          time.perf_counter() - t0)


# -- goodness of fit ------------------------------------------------------------

@dataclass
class GofReport:
    n: int
    q: float
    N: int
    chi_square: float
    df: int
    percentile: float
    threshold: float
    passed: bool
    min_expected: float


def chi_square_threshold(df: int, percentile: float = GOF_PERCENTILE) -> float:
    return float(sps.chi2.ppf(percentile, df)) if df > 0 else 0.0


def _exact_probs(n: int, q: float) -> tuple[list[tuple[int, ...]], np.ndarray]:
    perms = list(permutations(range(1, n + 1)))
    probs = np.array([float(prob_mass(p, Fraction(q))) for p in perms])
    return perms, probs


def gof_chi_square(n: int, q: float, N: int, seed: int, reverse_ties: bool = False,
                   threads: int = 1) -> GofReport:
    """Chi-square of sampled permutation counts against the exact mass."""
    if n > 6:
        raise ValueError(f"gof needs n <= 6, got {n}")
    cells = math.factorial(n)
    if N < 100 * cells:
        raise ValueError(f"gof needs N >= 100 * n! = {100 * cells}, got {N}")
    perms, probs = _exact_probs(n, q)
    expected = N * probs
    if expected.min() < 5:
        raise ValueError(f"smallest expected cell count {expected.min():.2f} < 5; raise N")
    weights = n ** np.arange(n)
    code_to_cell = {int(np.dot(np.array(p) - 1, weights)): i for i, p in enumerate(perms)}
    lookup = np.zeros(n ** n, dtype=np.int64)
    for code, i in code_to_cell.items():
        lookup[code] = i

    def count(perms_block, words):
        codes = (perms_block - 1) @ weights
        return np.bincount(lookup[codes], minlength=cells)

    observed = sum(map_blocks(count, n, q, N, seed, threads, reverse_ties=reverse_ties))
    chi2 = float(((observed - expected) ** 2 / expected).sum())
    df = cells - 1
    threshold = chi_square_threshold(df)
    return GofReport(n, q, N, chi2, df, GOF_PERCENTILE, threshold,
                     df == 0 or chi2 < threshold, float(expected.min()))


# -- q-Plancherel rows -----------------------------------------------------------

@dataclass
class MomentCheck:
    name: str
    estimate: float
    target: float
    se: float
    tolerance: float
    passed: bool


def _check(name: str, est: float, target: float, se: float) -> MomentCheck:
    tol = TOLERANCE_SIGMAS * se
    return MomentCheck(name, est, target, se, tol, abs(est - target) <= tol)


@dataclass
class LambdaReport:
    n: int
    q: float
    N: int
    seed: int
    checks: list[MomentCheck]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str) -> MomentCheck:
        return next(c for c in self.checks if c.name == name)


def _bootstrap_se(data: np.ndarray, stat: Callable[[np.ndarray], float], seed: int) -> float:
    rng = make_rng(seed, BOOTSTRAP_STREAM)
    N = data.shape[0]
    reps = [stat(data[rng.integers(0, N, N)]) for _ in range(BOOTSTRAP_RESAMPLES)]
    return float(np.std(reps, ddof=1))


def lambda_rows(n: int, q: float, N: int, seed: int, rows: int, threads: int = 1) -> np.ndarray:
    """First ``rows`` parts of the RSK shape for ``N`` samples, shape ``(N, rows)``."""
    def shapes(perms, words):
        out = np.zeros((perms.shape[0], rows), dtype=np.int64)
        for r, p in enumerate(perms.tolist()):
            sh = stats.rsk_shape(p, max_rows=rows)
            out[r, :len(sh)] = sh
        return out
    return np.concatenate(map_blocks(shapes, n, q, N, seed, threads))


def clt_lambda_check(i_max: int, n: int, q: float, N: int, seed: int, threads: int = 1) -> LambdaReport:
    """Compare the scaled rows ``Y_i = sqrt(n)(lambda_i/n - q^(i-1)(1-q))``
    with their limiting Gaussian moments."""
    if not 1 <= i_max <= 4:
        raise ValueError("i_max must be in 1..4")
    if n < 1000:
        raise ValueError("clt_lambda_check needs n >= 1000")
    lam = lambda_rows(n, q, N, seed, i_max, threads)
    checks = []
    ys = {}
    for i in range(1, i_max + 1):
        mean_i, var_i, _ = exact.plancherel_moments(i, i, q)
        frac = lam[:, i - 1] / n
        checks.append(_check(f"mean lambda_{i}/n", float(frac.mean()), mean_i,
                             float(frac.std(ddof=1)) / math.sqrt(N)))
        y = math.sqrt(n) * (frac - mean_i)
        ys[i] = y
        checks.append(_check(f"mean Y_{i}", float(y.mean()), 0.0,
                             float(y.std(ddof=1)) / math.sqrt(N)))
        checks.append(_check(f"var Y_{i}", float(y.var(ddof=1)), var_i,
                             _bootstrap_se(y, lambda a: float(a.var(ddof=1)), seed)))
    for i in range(1, i_max + 1):
        for j in range(i + 1, i_max + 1):
            _, _, cov = exact.plancherel_moments(i, j, q)
            pair = np.stack([ys[i], ys[j]], axis=1)
            covf = lambda a: float(np.cov(a[:, 0], a[:, 1], ddof=1)[0, 1])
            checks.append(_check(f"cov Y_{i},Y_{j}", covf(pair), cov,
                                 _bootstrap_se(pair, covf, seed)))
    return LambdaReport(n, q, N, seed, checks)


# -- normality -------------------------------------------------------------------

@dataclass
class NormalityReport:
    N: int
    mean: float
    variance: float
    skewness: float
    excess_kurtosis: float
    passed: bool
    max_abs_skew: float = 0.1
    max_abs_kurtosis: float = 0.2


def normality_diagnostic(samples: Sequence[float], max_abs_skew: float = 0.1,
                         max_abs_kurtosis: float = 0.2) -> NormalityReport:
    x = np.asarray(samples, dtype=float)
    if x.size < 1000:
        raise ValueError(f"normality diagnostic needs >= 1000 samples, got {x.size}")
    c = x - x.mean()
    m2 = float((c ** 2).mean())
    if m2 == 0:
        return NormalityReport(x.size, float(x.mean()), 0.0, 0.0, 0.0, False,
                               max_abs_skew, max_abs_kurtosis)
    skew = float((c ** 3).mean()) / m2 ** 1.5
    kurt = float((c ** 4).mean()) / m2 ** 2 - 3.0
    ok = abs(skew) < max_abs_skew and abs(kurt) < max_abs_kurtosis
    return NormalityReport(x.size, float(x.mean()), float(x.var(ddof=1)), skew, kurt, ok,
                           max_abs_skew, max_abs_kurtosis)


def pattern_samples(sigma, n: int, q: float, N: int, seed: int, threads: int = 1) -> np.ndarray:
    sigma = Permutation(sigma)
    name = "pattern:" + " ".join(map(str, sigma))
    fn = batch_statistic(name)
    return np.concatenate(map_blocks(fn, n, q, N, seed, threads))


# -- fixed-point runs -----------------------------------------------------------

@dataclass
class SurvivalCheck:
    level: int
    k: int
    estimate: float
    target: float
    se: float
    passed: bool


@dataclass
class SurvivalReport:
    n: int
    q: float
    N: int
    seed: int
    checks: list[SurvivalCheck]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def fixed_run_survival(n: int, q: float, N: int, seed: int, levels: int = 4, k_max: int = 4,
                       threads: int = 1) -> SurvivalReport:
    """Empirical ``P(|D_i| >= k)`` against ``p_i^k`` with ``p_i = q^i (1-q)``.

    The standard error is the binomial one under the target probability so
    that rare events observed zero times are judged fairly.
    """
    def sizes(perms, words):
        return fixed_run_sizes_batch(words, perms, levels)
    d = np.concatenate(map_blocks(sizes, n, q, N, seed, threads))
    checks = []
    for i in range(levels):
        p_i = q ** i * (1 - q)
        for k in range(1, k_max + 1):
            target = p_i ** k if k <= n else 0.0
            est = float((d[:, i] >= k).mean())
            se = math.sqrt(target * (1 - target) / N)
            checks.append(SurvivalCheck(i, k, est, target, se,
                                        abs(est - target) <= TOLERANCE_SIGMAS * se))
    return SurvivalReport(n, q, N, seed, checks)


def walk_deviation_trials(n: int, q: float, seeds: Sequence[int]) -> list[float]:
    """``walk_deviation`` of one fresh word per seed."""
    return [walk_deviation(walk_family(geometric_words(n, q, 1, make_rng(s))[0]), q)
            for s in seeds]


@dataclass
class VarianceOrderReport:
    sigma: tuple[int, ...]
    q: float
    ns: list[int]
    variances: list[float]
    scaled: list[float]
    ratios: list[float]
    passed: bool


def variance_order(sigma, ns: Sequence[int], q: float, N: int, seed: int,
                   exact_cutoff: int = 8) -> VarianceOrderReport:
    """``Var(T_sigma) / n^(2k-1)`` across ``ns``; passes when consecutive
    ratios of the scaled values stay within ``[0.5, 2]``."""
    sigma = tuple(Permutation(sigma))
    k = len(sigma)
    variances = []
    for n in ns:
        if n <= exact_cutoff:
            qr = Fraction(q).limit_denominator(10**6)
            count = lambda p: stats.count_pattern(p, sigma)
            mean = exact.exact_expectation(n, count, qr)
            second = exact.exact_expectation(n, lambda p: count(p) ** 2, qr)
            variances.append(float(second - mean ** 2))
        else:
            variances.append(float(pattern_samples(sigma, n, q, N, seed).var(ddof=1)))
    scaled = [v / n ** (2 * k - 1) for v, n in zip(variances, ns)]
    ratios = [b / a for a, b in zip(scaled, scaled[1:])]
    ok = all(0.5 <= r <= 2 for r in ratios)
    return VarianceOrderReport(sigma, q, list(ns), variances, scaled, ratios, ok)


def report_dict(report) -> dict:
    return asdict(report)
