"""Total variation distances, the cutoff profile and mixing times."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from shelfmix import config
from shelfmix.errors import BoundExceeded, InvariantViolation
from shelfmix.exactnum import phi, rat_to_decimal
from shelfmix.permstat import _check_n, uniform_moments, valley_table
from shelfmix.shelfmeasure import TiltBounds, q_table, shuffle_valley_pmf, tilt_bounds

SQRT10 = math.sqrt(10.0)


@dataclass(frozen=True)
class TVReport:
    n: int
    m: int
    tv_exact: Fraction
    tv_asymptotic: float | None
    argmax_k: int
    delta_bounds: TiltBounds | None = None

    @property
    def tv_exact_decimal(self) -> str:
        return rat_to_decimal(self.tv_exact, 5)


@dataclass(frozen=True)
class ShuffleSpec:
    """``repeats`` passes of an ``m``-shelf shuffle on ``n`` cards."""

    n: int
    m: int
    repeats: int = 1

    @property
    def effective_shelves(self) -> int:
        return effective_shelves(self)


def tv_exact(n: int, m: int, *, with_bounds: bool = True, with_asymptotic: bool = True) -> TVReport:
    """Exact distance between the ``m``-shelf shuffle and uniform on ``n`` cards.

    Computes half the l1 distance of the two valley distributions and, as an
    independent check, the largest gap between their CDFs; the two must agree
    exactly.  ``argmax_k`` is the smallest ``k`` attaining the CDF gap.
    """
    vt = valley_table(n)
    qt = q_table(n, m)
    shelf = shuffle_valley_pmf(qt, vt)
    uniform = vt.pmf()
    sum_form = sum((abs(a - b) for a, b in zip(shelf, uniform)), Fraction(0)) / 2

    gap, best_k = Fraction(0), vt.u
    fs = fu = Fraction(0)
    for k, (a, b) in enumerate(zip(shelf, uniform)):
        fs += a
        fu += b
        if fs - fu > gap:
            gap, best_k = fs - fu, k
    if gap != sum_form:
        raise InvariantViolation(
            f"n={n}, m={m}: sum form {sum_form} differs from CDF form {gap}"
        )
    bounds = tilt_bounds(qt) if with_bounds and qt.u >= 1 else None
    asym = tv_asymptotic(n, m) if with_asymptotic and n >= 2 else None
    return TVReport(n, m, sum_form, asym, best_k, bounds)


def _profile_value(c: float) -> float:
    if c <= 0:
        raise ValueError(f"c must be positive, got {c}")
    return 1.0 - 2.0 * phi(-1.0 / (12.0 * c * c * SQRT10))


def tv_asymptotic(n: int, m: int) -> float:
    """Limiting distance ``1 - 2 Phi(-1 / (12 c^2 sqrt(10)))`` with ``c = m / n**1.25``.

    The sign inside ``Phi`` is negative, so the value lies in ``[0, 1]``.
    """
    if n < 2 or m < 1:
        raise ValueError(f"tv_asymptotic needs n >= 2 and m >= 1, got n={n}, m={m}")
    return _profile_value(m / n**1.25)


def tv_normal_shift(mu: float) -> float:
    """Total variation between ``N(-mu, 1)`` and ``N(0, 1)``."""
    if mu < 0:
        raise ValueError(f"mu must be nonnegative, got {mu}")
    return 1.0 - 2.0 * phi(-mu / 2.0)


def gap_maximizer(n: int, m: int) -> float:
    """Location ``mu_n - x* sigma_n`` where the normal CDF gap peaks,
    ``x* = 1 / (12 sqrt(10) c^2)``."""
    mp = uniform_moments(n)
    c = m / n**1.25
    return float(mp.mean) - math.sqrt(mp.variance) / (12.0 * SQRT10 * c * c)


def cutoff_profile(n: int, thetas: Iterable[float]) -> list[tuple[float, float]]:
    """Asymptotic distance after ``5/4 log2(n) + theta`` one-shelf passes.

    That many passes amount to a ``2**(k-1)``-shelf shuffle, i.e.
    ``c = 2**(theta - 1)``, which no longer depends on ``n``.
    """
    if n < 2:
        raise ValueError(f"cutoff_profile needs n >= 2, got {n}")
    return [(theta, _profile_value(2.0 ** (theta - 1.0))) for theta in thetas]


def effective_shelves(spec: ShuffleSpec) -> int:
    """Shelf count of one shuffle equal in law to ``spec.repeats`` passes."""
    if spec.repeats < 1:
        raise ValueError(f"repeats must be >= 1, got {spec.repeats}")
    return 2 ** (spec.repeats - 1) * spec.m**spec.repeats


@dataclass(frozen=True)
class MixingResult:
    n: int
    m: int
    eps: float
    repeats: int
    effective_shelves: int  # 0 when no shuffle is needed
    tv: Fraction


def mixing_time(n: int, m: int, eps: float, *, max_shelves: int | None = None) -> MixingResult:
    """Fewest passes of an ``m``-shelf shuffle bringing the distance to ``<= eps``.

    Zero passes leave the deck in order, at distance ``1 - 1/n!``.
    """
    _check_n(n)
    if m < 1:
        raise ValueError(f"shelf count must be >= 1, got {m}")
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    limit = config.max_shelves() if max_shelves is None else max_shelves
    eps_q = Fraction(str(eps))  # decimal value of the flag, not its binary float
    start = 1 - Fraction(1, math.factorial(n))
    if start <= eps_q:
        return MixingResult(n, m, eps, 0, 0, start)
    repeats = 1
    while True:
        shelves = effective_shelves(ShuffleSpec(n, m, repeats))
        if shelves > limit:
            raise BoundExceeded(
                f"effective shelf count {shelves} after {repeats} passes exceeds bound {limit}"
            )
        tv = tv_exact(n, shelves, with_bounds=False, with_asymptotic=False).tv_exact
        if tv <= eps_q:
            return MixingResult(n, m, eps, repeats, shelves, tv)
        repeats += 1
