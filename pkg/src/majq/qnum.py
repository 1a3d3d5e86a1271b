"""Exact q-analogs and elementary permutation statistics.

Polynomials in ``q`` carry Python integers as coefficients, and exact values at
a rational ``q`` are :class:`fractions.Fraction` instances.  Permutations are
1-indexed words in one-line notation, so ``Permutation((2, 1))`` is the
transposition of 1 and 2.
"""
from __future__ import annotations

import json
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

__all__ = [
    "QPoly", "Permutation", "as_rational",
    "q_int", "q_factorial", "q_binomial",
    "descent_set", "maj", "prob_mass", "inverse", "cycles", "cycle_type",
]


class QPoly:
    """Univariate polynomial in ``q`` with exact integer coefficients.

    ``coeffs[i]`` is the coefficient of ``q**i``.  Trailing zeros are stripped,
    so the zero polynomial has an empty coefficient tuple.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[int] = ()):
        cs = [int(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple[int, ...] = tuple(cs)

    @classmethod
    def monomial(cls, k: int, c: int = 1) -> "QPoly":
        if k < 0:
            raise ValueError(f"negative exponent {k}")
        return cls([0] * k + [c])

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = QPoly([other])
        if not isinstance(other, QPoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __add__(self, other) -> "QPoly":
        if isinstance(other, int):
            other = QPoly([other])
        if not isinstance(other, QPoly):
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return QPoly(out)

    __radd__ = __add__

    def __neg__(self) -> "QPoly":
        return QPoly(-c for c in self.coeffs)

    def __sub__(self, other) -> "QPoly":
        if isinstance(other, int):
            other = QPoly([other])
        return self + (-other)

    def __rsub__(self, other) -> "QPoly":
        return (-self) + other

    def __mul__(self, other) -> "QPoly":
        if isinstance(other, int):
            return QPoly(c * other for c in self.coeffs)
        if not isinstance(other, QPoly):
            return NotImplemented
        if not self.coeffs or not other.coeffs:
            return QPoly()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return QPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "QPoly":
        out = QPoly([1])
        for _ in range(k):
            out = out * self
        return out

    def __call__(self, q):
        """Evaluate by Horner's rule; exact for int/Fraction input."""
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * q + c
        return acc

    def __repr__(self) -> str:
        if not self.coeffs:
            return "QPoly(0)"
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mono = "" if i == 0 else ("q" if i == 1 else f"q^{i}")
            if mono and abs(c) == 1:
                coef = "-" if c < 0 else ""
            else:
                coef = str(c)
            terms.append(f"{coef}{mono}")
        return "QPoly(" + " + ".join(terms).replace("+ -", "- ") + ")"

    def to_json(self) -> str:
        return json.dumps(list(self.coeffs))

    @classmethod
    def from_json(cls, text: str) -> "QPoly":
        data = json.loads(text)
        if not isinstance(data, list) or not all(isinstance(c, int) for c in data):
            raise ValueError("QPoly JSON must be an integer array")
        return cls(data)


class Permutation(tuple):
    """A permutation of ``{1..n}`` in one-line notation.

    >>> Permutation.parse("7134265")
    Permutation('7134265')
    """

    def __new__(cls, word: Iterable[int] = ()):
        w = tuple(int(v) for v in word)
        if sorted(w) != list(range(1, len(w) + 1)):
            raise ValueError(f"not a permutation of 1..{len(w)}: {w}")
        return super().__new__(cls, w)

    @classmethod
    def parse(cls, text: str) -> "Permutation":
        """Parse ``"7134265"`` (n <= 9) or space/comma separated values."""
        text = text.strip()
        if any(ch in text for ch in " ,"):
            return cls(int(t) for t in text.replace(",", " ").split())
        return cls(int(ch) for ch in text)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(range(1, n + 1))

    @property
    def n(self) -> int:
        return len(self)

    def __call__(self, i: int) -> int:
        return self[i - 1]

    def __repr__(self) -> str:
        if len(self) <= 9:
            return f"Permutation('{''.join(map(str, self))}')"
        return f"Permutation({list(self)})"

    def __str__(self) -> str:
        return " ".join(map(str, self))

    def to_json(self) -> str:
        return json.dumps(list(self))


def as_rational(q) -> Fraction:
    """Coerce ``q`` to an exact Fraction, rejecting floats.

    Strings like ``"1/3"`` are accepted; binary floats are refused so exact
    identities never pass through rounding.
    """
    if isinstance(q, bool):
        raise TypeError("q must be rational, got bool")
    if isinstance(q, (int, Rational)):
        return Fraction(q)
    if isinstance(q, str):
        return Fraction(q.strip())
    raise TypeError(f"q must be an exact rational, got {type(q).__name__}")


def q_int(n: int) -> QPoly:
    """The q-integer ``1 + q + ... + q^(n-1)``."""
    if n < 1:
        raise ValueError(f"q_int needs n >= 1, got {n}")
    return QPoly([1] * n)


def q_factorial(n: int) -> QPoly:
    if n < 0:
        raise ValueError(f"q_factorial needs n >= 0, got {n}")
    out = QPoly([1])
    for k in range(1, n + 1):
        out = out * q_int(k)
    return out


def q_binomial(n: int, k: int) -> QPoly:
    """Gaussian binomial coefficient via the q-Pascal rule."""
    if k < 0 or k > n:
        return QPoly()
    row = [QPoly([1])]
    for m in range(1, n + 1):
        nxt = [QPoly([1])]
        for j in range(1, m):
            nxt.append(row[j - 1] + QPoly.monomial(j) * row[j])
        nxt.append(QPoly([1]))
        row = nxt
    return row[k]


def descent_set(p: Sequence[int]) -> set[int]:
    return {i for i in range(1, len(p)) if p[i - 1] > p[i]}


def maj(p: Sequence[int]) -> int:
    """Major index: the sum of descent positions."""
    return sum(i for i in range(1, len(p)) if p[i - 1] > p[i])


def prob_mass(p: Sequence[int], q) -> Fraction:
    """Exact probability of ``p`` under the major-index law at rational q > 0."""
    q = as_rational(q)
    if q <= 0:
        raise ValueError(f"q must be positive, got {q}")
    return Fraction(q) ** maj(p) / q_factorial(len(p))(q)


def inverse(p: Sequence[int]) -> Permutation:
    inv = [0] * len(p)
    for i, v in enumerate(p, start=1):
        inv[v - 1] = i
    return Permutation(inv)


def cycles(p: Sequence[int]) -> list[tuple[int, ...]]:
    """Cycle decomposition, each cycle starting at its smallest element."""
    seen = [False] * (len(p) + 1)
    out = []
    for start in range(1, len(p) + 1):
        if seen[start]:
            continue
        cyc = []
        i = start
        while not seen[i]:
            seen[i] = True
            cyc.append(i)
            i = p[i - 1]
        out.append(tuple(cyc))
    return out


def cycle_type(p: Sequence[int]) -> tuple[int, ...]:
    return tuple(sorted((len(c) for c in cycles(p)), reverse=True))
