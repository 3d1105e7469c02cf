"""Exact and log-space counting primitives shared by every bound."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

#: Largest m for which Stirling numbers are kept as exact integers.
M_MAX = 512


@dataclass(frozen=True, order=True)
class LogNumber:
    """A nonnegative real stored as its natural logarithm.

    ``value == -inf`` is the log-of-zero sentinel.
    """

    value: float

    @classmethod
    def zero(cls) -> "LogNumber":
        return cls(-math.inf)

    @classmethod
    def one(cls) -> "LogNumber":
        return cls(0.0)

    @classmethod
    def of(cls, x: float | int) -> "LogNumber":
        if x < 0:
            raise ValueError(f"LogNumber needs a nonnegative value, got {x}")
        return cls(-math.inf if x == 0 else math.log(x))

    @property
    def is_zero(self) -> bool:
        return self.value == -math.inf

    def __add__(self, other: "LogNumber") -> "LogNumber":
        return log_sum([self, other])

    def __mul__(self, other: "LogNumber") -> "LogNumber":
        if self.is_zero or other.is_zero:
            return LogNumber.zero()
        return LogNumber(self.value + other.value)

    def __float__(self) -> float:
        return self.value

    def exp(self) -> float:
        return math.exp(self.value)


def binomial(m: int, k: int) -> int:
    """C(m, k), zero when k > m."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k > m:
        return 0
    return math.comb(m, k)


_stirling_rows: list[list[int]] = [[1]]


def _stirling_row(m: int) -> list[int]:
    while len(_stirling_rows) <= m:
        prev = _stirling_rows[-1]
        n = len(_stirling_rows)
        row = [0] * (n + 1)
        for c in range(1, n + 1):
            row[c] = c * (prev[c] if c < len(prev) else 0) + prev[c - 1]
        _stirling_rows.append(row)
    return _stirling_rows[m]


def stirling2(m: int, c: int) -> int:
    """Number of ways to split an m-set into c nonempty blocks."""
    if m < 0 or c < 0:
        raise ValueError("arguments must be nonnegative")
    if c > m:
        return 0
    if m > M_MAX:
        raise ValueError(f"exact Stirling numbers are limited to m <= {M_MAX}")
    return _stirling_row(m)[c]


_log_stirling_rows: list[list[float]] = []


def log_stirling2(m: int, c: int) -> float:
    """Natural log of S(m, c); exact below ``M_MAX`` and log-space recurrence above."""
    if c > m or (c == 0 and m > 0):
        return -math.inf
    if m <= M_MAX:
        return math.log(stirling2(m, c))
    if not _log_stirling_rows:
        _log_stirling_rows.append([math.log(s) if s else -math.inf for s in _stirling_row(M_MAX)])
    while M_MAX + len(_log_stirling_rows) - 1 < m:
        prev = _log_stirling_rows[-1]
        n = M_MAX + len(_log_stirling_rows)
        row = [-math.inf] * (n + 1)
        for j in range(1, n + 1):
            stay = math.log(j) + prev[j] if j < len(prev) else -math.inf
            row[j] = _logaddexp(stay, prev[j - 1])
        _log_stirling_rows.append(row)
    return _log_stirling_rows[m - M_MAX][c]


def stirling2_part_k(m: int, k: int) -> int:
    """Number of 2-partitions of an m-set having a block of size k."""
    if k < 1 or 2 * k > m:
        raise ValueError(f"need 1 <= k <= m/2, got m={m}, k={k}")
    if 2 * k == m:
        return math.comb(m, k) // 2
    return math.comb(m, k)


@lru_cache(maxsize=None)
def wedderburn_etherington(L: int) -> int:
    """Count of unordered binary tree shapes with L leaves."""
    if L < 1:
        raise ValueError("L must be at least 1")
    if L == 1:
        return 1
    total = 0
    for i in range(1, (L + 1) // 2):
        total += wedderburn_etherington(i) * wedderburn_etherington(L - i)
    if L % 2 == 0:
        half = wedderburn_etherington(L // 2)
        total += half * (half + 1) // 2
    return total


def _logaddexp(a: float, b: float) -> float:
    if a == -math.inf:
        return b
    if b == -math.inf:
        return a
    hi, lo = (a, b) if a >= b else (b, a)
    return hi + math.log1p(math.exp(lo - hi))


def log_sum(terms: Iterable[LogNumber | float]) -> LogNumber:
    """Log of a sum of exponentials, pivoted at the largest term.

    Raises:
        ValueError: if ``terms`` is empty.
    """
    values = [float(t) for t in terms]
    if not values:
        raise ValueError("log_sum of an empty list is undefined")
    pivot = max(values)
    if pivot == -math.inf:
        return LogNumber.zero()
    if pivot == math.inf:
        return LogNumber(math.inf)
    return LogNumber(pivot + math.log(math.fsum(math.exp(v - pivot) for v in values)))


def ln_falling_factorial(n: int, a: int) -> LogNumber:
    """log of n (n-1) ... (n-a+1); the zero sentinel when a > n."""
    if a < 0:
        raise ValueError("a must be nonnegative")
    if a > n:
        return LogNumber.zero()
    return LogNumber(math.log(math.perm(n, a)))
