"""Geometric-word sampler for the major-index distribution.

A word ``G`` of i.i.d. ``Geo(1-q)`` values is sorted by value descending, ties
by index ascending; the sorted indices read left to right are the sampled
permutation.  For ``q > 1`` the height complement of a ``1/q`` sample is used,
and ``q == 1`` is plain uniform sampling.

Randomness comes from numpy's PCG64 seeded through ``SeedSequence``.  Batches
are cut into fixed-size blocks and block ``b`` always draws from the stream
``SeedSequence(seed, spawn_key=(b,))``, so output does not depend on how the
blocks are scheduled across threads.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterator, Sequence, TypeVar

import numpy as np

from majq.qnum import Permutation

__all__ = [
    "BLOCK_SIZE", "SamplerConfig", "make_rng", "sample_geometric",
    "geometric_words", "gamma", "gamma_batch", "complement", "sample_maj",
    "sample_maj_batch", "map_blocks", "iter_blocks",
]

T = TypeVar("T")

# samples per RNG stream; changing it changes every seeded output
BLOCK_SIZE = 8192


@dataclass(frozen=True)
class SamplerConfig:
    n: int
    q: float
    seed: int = 0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n}")
        if not (self.q > 0 and math.isfinite(self.q)):
            raise ValueError(f"q must be a positive finite real, got {self.q}")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Generator for one named stream derived from ``(seed, stream)``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(stream,))))


def _check_unit_q(q: float) -> None:
    if not 0 < q < 1:
        raise ValueError(f"geometric parameter needs 0 < q < 1, got {q}")


def sample_geometric(q: float, rng: np.random.Generator) -> int:
    """One draw with ``P(X = k) = q**k * (1 - q)`` by inverse transform."""
    _check_unit_q(q)
    u = 1.0 - rng.random()  # in (0, 1], so log is finite
    return int(math.floor(math.log(u) / math.log(q)))


def geometric_words(n: int, q: float, size: int, rng: np.random.Generator) -> np.ndarray:
    """``size`` independent words of length ``n``, shape ``(size, n)``."""
    _check_unit_q(q)
    u = 1.0 - rng.random((size, n))
    return np.floor(np.log(u) / math.log(q)).astype(np.int64)


def gamma(word: Sequence[int]) -> Permutation:
    """Map a word to a permutation: indices sorted by (value desc, index asc).

    >>> gamma((5, 2, 3, 3, 0, 1, 6))
    Permutation('7134265')
    """
    if any(g < 0 for g in word):
        raise ValueError("word entries must be non-negative")
    order = sorted(range(len(word)), key=lambda i: (-word[i], i))
    return Permutation(i + 1 for i in order)


def gamma_batch(words: np.ndarray, reverse_ties: bool = False) -> np.ndarray:
    """Row-wise :func:`gamma` on a 2-D array; returns 1-indexed permutations.

    ``reverse_ties`` breaks ties by descending index instead.  It exists only
    as a deliberately wrong sampler for negative-control tests.
    """
    words = np.asarray(words)
    if reverse_ties:
        order = np.argsort(-words[:, ::-1], axis=1, kind="stable")
        order = words.shape[1] - 1 - order
    else:
        order = np.argsort(-words, axis=1, kind="stable")
    return order + 1


def complement(p: Sequence[int]) -> Permutation:
    """Height complement, ``v -> n + 1 - v``."""
    n = len(p)
    return Permutation(n + 1 - v for v in p)


def sample_maj(cfg: SamplerConfig, rng: np.random.Generator) -> Permutation:
    return Permutation(sample_maj_batch(cfg.n, cfg.q, 1, rng)[0])


def sample_maj_batch(n: int, q: float, size: int, rng: np.random.Generator,
                     return_words: bool = False, reverse_ties: bool = False):
    """``size`` permutations from the major-index law at any ``q > 0``.

    With ``return_words`` the latent geometric words are returned too; they
    are ``None`` for ``q == 1``.  For ``q > 1`` the words are those of the
    ``1/q`` sample before complementing.
    """
    if q == 1:
        perms = rng.permuted(np.tile(np.arange(1, n + 1), (size, 1)), axis=1)
        return (perms, None) if return_words else perms
    if q <= 0:
        raise ValueError(f"q must be positive, got {q}")
    base = q if q < 1 else 1.0 / q
    words = geometric_words(n, base, size, rng)
    perms = gamma_batch(words, reverse_ties=reverse_ties)
    if q > 1:
        perms = n + 1 - perms
    return (perms, words) if return_words else perms


def _block_sizes(count: int, block_size: int) -> list[int]:
    sizes = [block_size] * (count // block_size)
    if count % block_size:
        sizes.append(count % block_size)
    return sizes


def map_blocks(fn: Callable[[np.ndarray, np.ndarray | None], T], n: int, q: float,
               count: int, seed: int, threads: int = 1, block_size: int = BLOCK_SIZE,
               reverse_ties: bool = False) -> list[T]:
    """Apply ``fn(perms, words)`` to each block of ``count`` samples.

    Results come back in block order, and block ``b`` always draws from
    stream ``b`` of ``seed``, so the output is the same for any ``threads``.
    """
    sizes = _block_sizes(count, block_size)

    def work(b: int) -> T:
        perms, words = sample_maj_batch(n, q, sizes[b], make_rng(seed, b),
                                        return_words=True, reverse_ties=reverse_ties)
        return fn(perms, words)

    if threads <= 1 or len(sizes) <= 1:
        return [work(b) for b in range(len(sizes))]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(work, range(len(sizes))))


def iter_blocks(n: int, q: float, count: int, seed: int, block_size: int = BLOCK_SIZE
                ) -> Iterator[tuple[np.ndarray, np.ndarray | None]]:
    """Lazily yield the same ``(perms, words)`` blocks :func:`map_blocks` sees."""
    for b, size in enumerate(_block_sizes(count, block_size)):
        yield sample_maj_batch(n, q, size, make_rng(seed, b), return_words=True)
