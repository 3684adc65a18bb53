"""Exact integer/rational helpers and the standard normal CDF.

Rationals are plain :class:`fractions.Fraction` objects, which are always
reduced and carry a positive denominator.  Floats only appear in :func:`phi`
and in the asymptotic formulas built on top of it.
"""

from __future__ import annotations

import math
import threading
from fractions import Fraction

BigRat = Fraction

__all__ = ["BigRat", "BinomialCache", "binom", "phi", "rat_to_decimal"]


class BinomialCache:
    """Memo of exact binomial coefficients C(a, b).

    Entries are computed with :func:`math.comb` and stored under a lock, so a
    single instance can be shared between threads; readers never see a
    partially written entry because the dict assignment happens once the
    value is complete.
    """

    def __init__(self) -> None:
        self._memo: dict[tuple[int, int], int] = {}
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._memo)

    def __call__(self, a: int, b: int) -> int:
        if a < 0:
            raise ValueError(f"binom: a must be nonnegative, got {a}")
        if b < 0 or b > a:
            return 0
        b = min(b, a - b)
        key = (a, b)
        value = self._memo.get(key)
        if value is None:
            value = math.comb(a, b)
            with self._lock:
                self._memo.setdefault(key, value)
        return value

    def clear(self) -> None:
        with self._lock:
            self._memo.clear()


_CACHE = BinomialCache()


def binom(a: int, b: int) -> int:
    """Exact C(a, b), zero outside ``0 <= b <= a``."""
    return _CACHE(a, b)


def phi(x: float) -> float:
    """Standard normal CDF.

    Uses the complementary error function, which keeps full relative
    precision in the lower tail; absolute error is well below 1e-15.
    """
    if not math.isfinite(x):
        raise ValueError(f"phi: argument must be finite, got {x!r}")
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def rat_to_decimal(x: Fraction | int, places: int) -> str:
    """Render ``x`` with exactly ``places`` fractional digits, rounding half up.

    Ties round away from zero, so ``-1/8`` at two places is ``"-0.13"``.

    >>> rat_to_decimal(Fraction(2, 3), 5)
    '0.66667'
    """
    if places < 0 or places > 50:
        raise ValueError(f"places must be in [0, 50], got {places}")
    x = Fraction(x)
    sign = "-" if x < 0 else ""
    scaled = abs(x) * 10**places
    q, r = divmod(scaled.numerator, scaled.denominator)
    if 2 * r >= scaled.denominator:
        q += 1
    if q == 0:
        sign = ""
    digits = str(q).rjust(places + 1, "0")
    if places == 0:
        return sign + digits
    return f"{sign}{digits[:-places]}.{digits[-places:]}"
