"""Distribution of the number of valleys of a uniform random permutation.

A valley of ``p`` is an interior position ``j`` with ``p[j-1] > p[j] < p[j+1]``.
For ``n`` cards the count ranges over ``0..u_n`` with ``u_n = (n - 1) // 2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from shelfmix import config
from shelfmix.errors import BoundExceeded, InvariantViolation
from shelfmix.exactnum import phi

Permutation = tuple[int, ...]


def max_valleys(n: int) -> int:
    return (n - 1) // 2


def check_permutation(p: Sequence[int]) -> None:
    n = len(p)
    if n < 1 or sorted(p) != list(range(1, n + 1)):
        raise ValueError(f"not a permutation of 1..{n}: {list(p)!r}")


def _valleys(p: Sequence[int]) -> int:
    return sum(1 for j in range(1, len(p) - 1) if p[j - 1] > p[j] < p[j + 1])


def count_valleys(p: Sequence[int]) -> int:
    """Number of valleys of a permutation of ``1..n``."""
    check_permutation(p)
    return _valleys(p)


@dataclass(frozen=True)
class MomentPair:
    mean: Fraction
    variance: Fraction


@dataclass(frozen=True)
class ValleyTable:
    """Exact counts of permutations of ``n`` by valley count."""

    n: int
    counts: tuple[int, ...]

    @property
    def u(self) -> int:
        return len(self.counts) - 1

    @property
    def total(self) -> int:
        return math.factorial(self.n)

    def pmf(self) -> list[Fraction]:
        total = self.total
        return [Fraction(c, total) for c in self.counts]

    def moments(self) -> MomentPair:
        """Mean and variance computed from the counts themselves."""
        total = self.total
        s1 = sum(k * c for k, c in enumerate(self.counts))
        s2 = sum(k * k * c for k, c in enumerate(self.counts))
        mean = Fraction(s1, total)
        return MomentPair(mean, Fraction(s2, total) - mean * mean)


def _check_n(n: int) -> None:
    if n < 1:
        raise ValueError(f"deck size must be >= 1, got {n}")
    limit = config.max_n()
    if n > limit:
        raise BoundExceeded(f"deck size {n} exceeds the configured maximum {limit}")


@lru_cache(maxsize=None)
def _valley_counts(n: int) -> tuple[int, ...]:
    # Insert the largest card into a permutation of n-1 cards. Counting
    # peaks: the two gaps beside an existing peak and the two end gaps keep
    # the count, every other gap adds a peak. Complementing values maps
    # peaks to valleys, so the same counts apply.
    row = [1]
    for size in range(2, n + 1):
        nxt = [0] * (max_valleys(size) + 1)
        for k, c in enumerate(row):
            if not c:
                continue
            nxt[k] += (2 * k + 2) * c
            grow = size - 2 * k - 2
            if grow > 0:
                nxt[k + 1] += grow * c
        row = nxt
    return tuple(row)


def valley_table(n: int) -> ValleyTable:
    """Counts of permutations of ``n`` cards with ``k`` valleys, ``k = 0..u_n``."""
    _check_n(n)
    counts = _valley_counts(n)
    if sum(counts) != math.factorial(n):
        raise InvariantViolation(f"valley counts for n={n} do not sum to n!")
    return ValleyTable(n, counts)


def brute_force_counts(n: int) -> list[int]:
    """Exhaustive valley counts over all ``n!`` permutations (small ``n`` only)."""
    from itertools import permutations

    counts = [0] * (max_valleys(n) + 1)
    for p in permutations(range(1, n + 1)):
        counts[_valleys(p)] += 1
    return counts


def uniform_moments(n: int) -> MomentPair:
    """Closed-form mean ``(n-2)/3`` and variance ``(2n+2)/45`` of the valley count.

    The variance formula only matches :meth:`ValleyTable.moments` from
    ``n = 4`` on: the true variances are 0 at ``n = 2`` and 2/9 at ``n = 3``.
    """
    if n < 2:
        raise ValueError(f"uniform_moments needs n >= 2, got {n}")
    return MomentPair(Fraction(n - 2, 3), Fraction(2 * n + 2, 45))


def cgf_moments(n: int, theta: float) -> tuple[float, float]:
    """Mean and variance of the valley count tilted by ``exp(theta * k)``.

    These are the first two derivatives of ``log E[exp(x V_n)]`` at
    ``x = theta``.  Weights are formed in log space and shifted by their
    maximum so that no exponential overflows.
    """
    if not math.isfinite(theta):
        raise ValueError(f"theta must be finite, got {theta!r}")
    vt = valley_table(n)
    logs = [(math.log(c) + theta * k, k) for k, c in enumerate(vt.counts) if c]
    top = max(lw for lw, _ in logs)
    w = [(math.exp(lw - top), k) for lw, k in logs]
    z = math.fsum(x for x, _ in w)
    mean = math.fsum(x * k for x, k in w) / z
    second = math.fsum(x * (k - mean) ** 2 for x, k in w) / z
    return mean, second


def uniform_cdf(n: int, k: int) -> Fraction:
    """Exact ``P(V_n <= k)``."""
    vt = valley_table(n)
    if k < 0:
        return Fraction(0)
    if k >= vt.u:
        return Fraction(1)
    return Fraction(sum(vt.counts[: k + 1]), vt.total)


def clt_error(n: int) -> float:
    """``max_k |P(V_n <= k) - Phi((k - mu_n) / sigma_n)|`` over ``k = 0..u_n``."""
    if n < 3:
        raise ValueError(f"clt_error needs n >= 3, got {n}")
    mp = uniform_moments(n)
    mu = float(mp.mean)
    sigma = math.sqrt(mp.variance)
    return max(
        abs(float(uniform_cdf(n, k)) - phi((k - mu) / sigma))
        for k in range(max_valleys(n) + 1)
    )
