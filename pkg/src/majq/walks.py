"""Level sets of a geometric word and the lattice walks they induce.

For a word ``G`` of length ``n`` the walk on level ``i`` is

    L_i(y) = #{k : G_k > i} + #{k <= y : G_k = i},     y = 0..n,

so it starts at ``L_{i-1}(0) - |level i|`` and takes an upright step exactly at
the heights ``y`` with ``G_y = i``.  The step at height ``y`` ends at
``(x, y)`` with ``x = L_{G_y}(y)``, and for ``pi = gamma(G)`` that point is
``(x, pi(x))``: every point of the permutation's diagram is the end of exactly
one upright step.

Plots follow the usual picture of the walks: the vertical axis is the word
index ``y`` and the horizontal axis is the walk value ``x``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from majq.qnum import Permutation, cycles
from majq.sampler import gamma

__all__ = [
    "RunDecomposition", "LatticeWalkFamily", "Segment",
    "runs", "walk_family", "step_endpoints", "fixed_runs", "diagonal_runs",
    "diagonal_runs_lattice", "permuton_segments", "walk_deviation",
    "fixed_run_sizes_batch",
]


@dataclass(frozen=True)
class RunDecomposition:
    """``levels[k]`` holds the 1-based indices ``i`` with ``G_i == k``."""
    levels: tuple[tuple[int, ...], ...]

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(lv) for lv in self.levels)


@dataclass(frozen=True, eq=False)
class LatticeWalkFamily:
    """Walks for levels ``0..truncation-1``; higher walks are constant zero.

    ``walks[i, y]`` is ``L_i(y)``.
    """
    n: int
    walks: np.ndarray

    @property
    def truncation(self) -> int:
        return self.walks.shape[0]

    def walk(self, i: int) -> np.ndarray:
        if i >= self.truncation:
            return np.zeros(self.n + 1, dtype=np.int64)
        return self.walks[i]

    def starts(self) -> np.ndarray:
        return self.walks[:, 0]

    def upright_steps(self) -> np.ndarray:
        """Boolean ``(truncation, n)`` mask, True where walk i steps at y."""
        return np.diff(self.walks, axis=1) == 1


@dataclass(frozen=True)
class Segment:
    start: tuple[float, float]
    end: tuple[float, float]


def runs(word: Sequence[int]) -> RunDecomposition:
    top = max(word) if len(word) else -1
    levels: list[list[int]] = [[] for _ in range(top + 1)]
    for i, g in enumerate(word, start=1):
        levels[g].append(i)
    return RunDecomposition(tuple(tuple(lv) for lv in levels))


def walk_family(word: Sequence[int]) -> LatticeWalkFamily:
    g = np.asarray(word, dtype=np.int64)
    n = len(g)
    top = int(g.max())
    levels = np.arange(top + 1)[:, None]
    hits = g[None, :] == levels                        # (levels, n)
    starts = (g[None, :] > levels).sum(axis=1)
    walks = np.empty((top + 1, n + 1), dtype=np.int64)
    walks[:, 0] = starts
    walks[:, 1:] = starts[:, None] + np.cumsum(hits, axis=1)
    return LatticeWalkFamily(n, walks)


def step_endpoints(word: Sequence[int], family: LatticeWalkFamily | None = None) -> list[tuple[int, int]]:
    """End point ``(x, y)`` of the upright step taken at each height ``y``."""
    if family is None:
        family = walk_family(word)
    return [(int(family.walks[g, y]), y) for y, g in enumerate(word, start=1)]


def fixed_runs(word: Sequence[int]) -> list[int]:
    """``|D_i|`` for each level: fixed points of ``gamma(word)`` on level i.

    Raises ``AssertionError`` if some ``D_i`` is not an interval, which would
    mean the sampler or the level bookkeeping is broken.
    """
    pi = gamma(word)
    sizes = []
    for i, level in enumerate(runs(word).levels):
        fixed = [k for k in level if pi(k) == k]
        assert not fixed or fixed[-1] - fixed[0] + 1 == len(fixed), \
            f"fixed points on level {i} not consecutive: {fixed}"
        sizes.append(len(fixed))
    return sizes


def diagonal_runs(word: Sequence[int]) -> dict[tuple[int, int], int]:
    """Number of 2-cycles of ``gamma(word)`` split across each level pair ``i < j``."""
    pi = gamma(word)
    out: dict[tuple[int, int], int] = {}
    for cyc in cycles(pi):
        if len(cyc) == 2:
            a, b = sorted((word[cyc[0] - 1], word[cyc[1] - 1]))
            out[a, b] = out.get((a, b), 0) + 1
    return out


def diagonal_runs_lattice(word: Sequence[int]) -> dict[tuple[int, int], int]:
    """Same counts as :func:`diagonal_runs`, read off the walks alone.

    A 2-cycle on levels ``(i, j)`` is a point ``(x, y)`` that ends an upright
    step of ``L_i`` while ``(y, x)`` ends an upright step of ``L_j``, i.e. a
    point of ``L_i`` meeting the transpose of ``L_j`` on both walks' steps.
    """
    fam = walk_family(word)
    ends = {}
    for x, y in step_endpoints(word, fam):
        ends[x, y] = word[y - 1]
    out: dict[tuple[int, int], int] = {}
    for (x, y), i in ends.items():
        j = ends.get((y, x))
        if j is not None and x < y:
            key = (min(i, j), max(i, j))
            out[key] = out.get(key, 0) + 1
    return out


def permuton_segments(q: float, count: int) -> list[Segment]:
    if not 0 < q < 1:
        raise ValueError(f"need 0 < q < 1, got {q}")
    return [Segment((q ** (i + 1), 0.0), (q ** i, 1.0)) for i in range(count)]


def walk_deviation(family: LatticeWalkFamily, q: float) -> float:
    """Sup distance of the scaled walks from their limit segments.

    Walk ``i`` is compared with the line from ``(q^(i+1), 0)`` to
    ``(q^i, 1)``, its mean ``q^(i+1) + q^i (1-q) y/n``.  Levels up to and
    including the first (constant) walk past the truncation are covered.
    """
    if not 0 < q < 1:
        raise ValueError(f"need 0 < q < 1, got {q}")
    n = family.n
    t = np.arange(n + 1) / n
    worst = 0.0
    for i in range(family.truncation + 1):
        line = q ** (i + 1) + q ** i * (1 - q) * t
        worst = max(worst, float(np.abs(family.walk(i) / n - line).max()))
    return worst


def fixed_run_sizes_batch(words: np.ndarray, perms: np.ndarray, levels: int) -> np.ndarray:
    """``|D_i|`` for ``i < levels`` on each row; shape ``(rows, levels)``."""
    idx = np.arange(1, words.shape[1] + 1)
    fixed = perms == idx
    return np.stack([(fixed & (words == i)).sum(axis=1) for i in range(levels)], axis=1)

