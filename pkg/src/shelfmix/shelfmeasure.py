"""The m-shelf shuffle measure seen through the valley count.

Every permutation with ``k`` valleys has the same probability ``q(n, m, k)``
under an ``m``-shelf shuffle of ``n`` cards, so the measure is fully described
by the table ``q[0..u_n]`` together with the valley counts.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache

from shelfmix.errors import InvariantViolation
from shelfmix.exactnum import binom
from shelfmix.permstat import ValleyTable, _check_n, max_valleys, valley_table


@dataclass(frozen=True)
class QTable:
    """Per-permutation probabilities ``q[k]`` for an ``m``-shelf shuffle of ``n`` cards."""

    n: int
    m: int
    q: tuple[Fraction, ...]

    @property
    def u(self) -> int:
        return len(self.q) - 1


@dataclass(frozen=True)
class TiltBounds:
    delta_minus: Fraction
    delta_plus: Fraction
    argmin_k: int
    argmax_k: int


@dataclass(frozen=True)
class TiltedDist:
    """Valley distribution reweighted by ``ratio**k``, then normalised."""

    base: ValleyTable
    ratio: Fraction

    @cached_property
    def pmf(self) -> tuple[Fraction, ...]:
        weights = [c * self.ratio**k for k, c in enumerate(self.base.counts)]
        z = sum(weights)
        return tuple(w / z for w in weights)

    def cdf(self) -> list[Fraction]:
        out, acc = [], Fraction(0)
        for p in self.pmf:
            acc += p
            out.append(acc)
        return out

    def mean(self) -> Fraction:
        return sum((k * p for k, p in enumerate(self.pmf)), Fraction(0))

    def variance(self) -> Fraction:
        mu = self.mean()
        return sum(((k - mu) ** 2 * p for k, p in enumerate(self.pmf)), Fraction(0))


def _check_args(n: int, m: int) -> None:
    _check_n(n)
    if m < 1:
        raise ValueError(f"shelf count must be >= 1, got {m}")


def _q_numerator(n: int, m: int, k: int) -> int:
    nk = n - 1 - 2 * k
    return sum(binom(m + n - r, n) * binom(nk, r - 1 - k) for r in range(k + 1, n - k + 1))


def q_value(n: int, m: int, k: int) -> Fraction:
    """Probability that an ``m``-shelf shuffle of ``n`` cards yields one given
    permutation with ``k`` valleys.

    Exactly ``sum_r C(m+n-r, n) C(n-1-2k, r-1-k) / (m**n 2**(n-1-2k))`` over
    ``r = k+1 .. n-k``.  Zero whenever ``k >= m``.
    """
    _check_args(n, m)
    if not 0 <= k <= max_valleys(n):
        raise ValueError(f"valley count must be in [0, {max_valleys(n)}], got {k}")
    return Fraction(_q_numerator(n, m, k), m**n * 2 ** (n - 1 - 2 * k))


def q_table(n: int, m: int) -> QTable:
    """All ``q(n, m, k)``, checked for normalisation and monotonicity.

    Raises :class:`InvariantViolation` if ``sum_k q[k] * counts[k] != 1`` or
    if ``q`` increases anywhere.
    """
    _check_args(n, m)
    return _q_table(n, m)


@lru_cache(maxsize=512)
def _q_table(n: int, m: int) -> QTable:
    q = tuple(q_value(n, m, k) for k in range(max_valleys(n) + 1))
    counts = valley_table(n).counts
    total = sum(qk * c for qk, c in zip(q, counts))
    if total != 1:
        raise InvariantViolation(f"q table for n={n}, m={m} sums to {total}, not 1")
    for k in range(1, len(q)):
        if q[k] > q[k - 1]:
            raise InvariantViolation(
                f"q table for n={n}, m={m} increases at k={k}: {q[k - 1]} -> {q[k]}"
            )
    return QTable(n, m, q)


def shuffle_valley_pmf(qt: QTable, vt: ValleyTable) -> list[Fraction]:
    """``P(V_{n,m} = k) = q[k] * counts[k]``."""
    if qt.n != vt.n:
        raise ValueError(f"table size mismatch: q has n={qt.n}, valley table n={vt.n}")
    return [qk * c for qk, c in zip(qt.q, vt.counts)]


def tilt_bounds(qt: QTable) -> TiltBounds:
    """Smallest and largest consecutive ratio ``q[k] / q[k-1]``, ``1 <= k <= u_n``.

    Ratios with ``q[k-1] == 0`` are skipped (then ``q[k]`` is zero as well);
    a ratio of zero is possible when ``m <= u_n``.
    """
    if qt.u < 1:
        raise ValueError(f"no consecutive ratios exist for n={qt.n}")
    ratios = [(qt.q[k] / qt.q[k - 1], k) for k in range(1, qt.u + 1) if qt.q[k - 1]]
    lo = min(ratios)
    hi = max(ratios, key=lambda t: (t[0], -t[1]))
    return TiltBounds(lo[0], hi[0], lo[1], hi[1])


def tilted_dist(vt: ValleyTable, ratio: Fraction) -> TiltedDist:
    # ratio == 0 is the point mass at 0 (0**0 == 1)
    ratio = Fraction(ratio)
    if ratio < 0:
        raise ValueError(f"tilt ratio must be nonnegative, got {ratio}")
    return TiltedDist(vt, ratio)


@dataclass(frozen=True)
class DominationReport:
    n: int
    m: int
    bounds: TiltBounds
    lower_slack: Fraction  # min_k F_{V_{n,m}}(k) - F_{V+}(k)
    upper_slack: Fraction  # min_k F_{V-}(k) - F_{V_{n,m}}(k)
    violation_k: int | None

    @property
    def holds(self) -> bool:
        return self.violation_k is None


def domination_check(n: int, m: int) -> DominationReport:
    """Check ``F_{V+}(k) <= F_{V_{n,m}}(k) <= F_{V-}(k)`` for every ``k``, exactly."""
    if n < 3:
        raise ValueError(f"domination_check needs n >= 3, got {n}")
    vt = valley_table(n)
    qt = q_table(n, m)
    tb = tilt_bounds(qt)
    f_shelf = _cumulative(shuffle_valley_pmf(qt, vt))
    f_plus = tilted_dist(vt, tb.delta_plus).cdf()
    f_minus = tilted_dist(vt, tb.delta_minus).cdf()
    lower = [s - p for s, p in zip(f_shelf, f_plus)]
    upper = [mi - s for mi, s in zip(f_minus, f_shelf)]
    bad = [k for k in range(len(lower)) if lower[k] < 0 or upper[k] < 0]
    return DominationReport(n, m, tb, min(lower), min(upper), bad[0] if bad else None)


def _cumulative(pmf: list[Fraction]) -> list[Fraction]:
    out, acc = [], Fraction(0)
    for p in pmf:
        acc += p
        out.append(acc)
    return out
