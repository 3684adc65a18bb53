"""Exit criteria for the 52-card reproduction and the supporting checks.

Each test logs one PASS/FAIL line, printed in the "acceptance criteria"
section at the end of the pytest run.
"""

import io
import csv
import math
import time
from fractions import Fraction
from itertools import permutations

import pytest

from shelfmix.cli import main
from shelfmix.exactnum import rat_to_decimal
from shelfmix.permstat import _valleys, cgf_moments, uniform_moments, valley_table
from shelfmix.shelfmeasure import domination_check, q_table, shuffle_valley_pmf, tilt_bounds
from shelfmix.simulator import composition_check, enumerate_exact
from shelfmix.tvmetrics import mixing_time, tv_asymptotic, tv_exact

FIG_MS = [1, 10, 11, 15, 20, 26, 52, 100, 200, 300]
FIG_EXACT = ["1.0", "1.0", "0.99998", "0.94267", "0.72009", "0.50949",
             "0.14721", "0.04093", "0.01028", "0.00457"]
ASYM_MS = [15, 20, 26, 52, 100, 300]
ASYM = [0.97761, 0.80107, 0.55282, 0.15071, 0.04098, 0.00456]

DUAL_GRID = [(52, m) for m in FIG_MS] + [(n, m) for n in (5, 10, 20, 33) for m in (2, 7, 50)]

# n * |log delta + 1/(4 c^2 sqrt n)| at n = 16, c = 1 is 0.1193504778; rounded up
LEMMA1_C = 0.1193505
# |E[V+-] - mu_n + sqrt(n) / (90 c^2)| at n = 16, c = 1 is 0.0028059211; rounded up
LEMMA2_C = 0.0028060


def _sum_form(p, u):
    return sum((abs(a - b) for a, b in zip(p, u)), Fraction(0)) / 2


def _cdf_form(p, u):
    best = Fraction(0)
    fp = fu = Fraction(0)
    for a, b in zip(p, u):
        fp += a
        fu += b
        best = max(best, fp - fu)
    return best


def test_01_figure_exact(acceptance_log):
    t0 = time.perf_counter()
    got = [tv_exact(52, m).tv_exact for m in FIG_MS]
    elapsed = time.perf_counter() - t0
    bad = [
        (m, rat_to_decimal(g, 5), w)
        for m, g, w in zip(FIG_MS, got, FIG_EXACT)
        if rat_to_decimal(g, 5) != rat_to_decimal(Fraction(w), 5)
        or abs(g - Fraction(w)) > Fraction(5, 10**6)
    ]
    ok = not bad and elapsed < 10
    acceptance_log(1, "52-card exact series at 5 decimals", ok, f"{elapsed:.2f}s, mismatches={bad}")
    assert ok


def test_02_figure_asymptotic(acceptance_log):
    t0 = time.perf_counter()
    got = [tv_asymptotic(52, m) for m in ASYM_MS]
    elapsed = time.perf_counter() - t0
    worst = max(abs(g - w) for g, w in zip(got, ASYM))
    ok = worst <= 2e-5 and elapsed < 1
    acceptance_log(2, "52-card asymptotic series within 2e-5", ok, f"max err {worst:.2e}")
    assert ok


def test_03_oracle_equivalence(acceptance_log):
    t0 = time.perf_counter()
    failures = []
    for n in range(1, 7):
        vt = valley_table(n)
        for m in range(1, 4):
            dist = enumerate_exact(n, m)
            if dist.by_valleys() != shuffle_valley_pmf(q_table(n, m), vt):
                failures.append((n, m, "grouped"))
            classes = {}
            for p in permutations(range(1, n + 1)):
                classes.setdefault(_valleys(p), set()).add(dist.prob(p))
            if any(len(v) != 1 for v in classes.values()):
                failures.append((n, m, "class"))
    elapsed = time.perf_counter() - t0
    ok = not failures and elapsed < 60
    acceptance_log(3, "enumeration equals q * counts, constant on valley classes", ok,
                   f"{elapsed:.2f}s, failures={failures}")
    assert ok


def test_04_composition(acceptance_log):
    t0 = time.perf_counter()
    cases = [(4, 1, 1), (5, 1, 1), (5, 1, 2), (6, 1, 1)]
    reports = [composition_check(*c) for c in cases]
    elapsed = time.perf_counter() - t0
    bad = [(r.n, r.m1, r.m2) for r in reports if not r.holds]
    ok = not bad and elapsed < 120
    acceptance_log(4, "m1 then m2 pass equals one 2*m1*m2 pass", ok, f"{elapsed:.2f}s, failing={bad}")
    assert ok


def test_05_dual_form(acceptance_log):
    bad = []
    for n, m in DUAL_GRID:
        vt = valley_table(n)
        p = shuffle_valley_pmf(q_table(n, m), vt)
        u = vt.pmf()
        s, c = _sum_form(p, u), _cdf_form(p, u)
        if s != c or tv_exact(n, m).tv_exact != s:
            bad.append((n, m))
    acceptance_log(5, "half-l1 form equals max CDF gap exactly", not bad, f"{len(DUAL_GRID)} cases, bad={bad}")
    assert not bad


def test_06_moments(acceptance_log):
    bad = []
    for n in range(3, 65):
        mp = valley_table(n).moments()
        if mp.mean != Fraction(n - 2, 3) or mp.variance != Fraction(2 * n + 2, 45):
            bad.append((n, str(mp.mean), str(mp.variance)))
    acceptance_log(6, "table mean (n-2)/3 and variance (2n+2)/45 for 3<=n<=64", not bad,
                   f"mismatches={bad}")
    assert not bad


def test_07_monotone_and_domination(acceptance_log):
    bad = []
    for n, m in DUAL_GRID:
        q = q_table(n, m).q
        if any(q[k] > q[k - 1] for k in range(1, len(q))):
            bad.append((n, m, "q"))
        if not domination_check(n, m).holds:
            bad.append((n, m, "domination"))
    acceptance_log(7, "q nonincreasing and F+ <= F <= F- exactly", not bad, f"bad={bad}")
    assert not bad


def _lemma1_error(n):
    m = round(n**1.25)
    tb = tilt_bounds(q_table(n, m))
    return max(abs(math.log(d) + 1 / (4 * math.sqrt(n))) for d in (tb.delta_minus, tb.delta_plus))


def test_08_ratio_check(acceptance_log):
    c16 = 16 * _lemma1_error(16)
    errs = {n: _lemma1_error(n) for n in (16, 32, 64)}
    ok = c16 <= LEMMA1_C and all(e <= LEMMA1_C / n for n, e in errs.items())
    acceptance_log(8, "|log delta +- 1/(4 sqrt n)| <= C/n, C frozen at n=16", ok,
                   f"C={LEMMA1_C}, n*err={ {n: round(n * e, 6) for n, e in errs.items()} }")
    assert ok


def _lemma2_error(n):
    m = round(n**1.25)
    tb = tilt_bounds(q_table(n, m))
    mu = float(uniform_moments(n).mean)
    return max(
        abs(cgf_moments(n, math.log(d))[0] - mu + math.sqrt(n) / 90)
        for d in (tb.delta_minus, tb.delta_plus)
    )


def test_09_shift_check(acceptance_log):
    errs = {n: _lemma2_error(n) for n in (16, 32, 64)}
    ok = errs[16] <= LEMMA2_C and all(e <= LEMMA2_C for e in errs.values())
    acceptance_log(9, "|E[V+-] - mu_n + sqrt(n)/90| <= C, C frozen at n=16", ok,
                   f"C={LEMMA2_C}, err={ {n: round(e, 6) for n, e in errs.items()} }")
    assert ok


def _simulate_cli():
    out = io.StringIO()
    code = main(["simulate", "--n", "52", "--m", "300", "--samples", "1000000", "--seed", "42"], out=out)
    (row,) = csv.DictReader(io.StringIO(out.getvalue()))
    return code, row, out.getvalue()


def test_10_monte_carlo(acceptance_log):
    t0 = time.perf_counter()
    code, row, first = _simulate_cli()
    elapsed = time.perf_counter() - t0
    _, _, second = _simulate_cli()
    est = float(row["empirical_tv"])
    ok = code == 0 and abs(est - 0.00457) <= 0.005 and first == second and elapsed < 30
    acceptance_log(10, "Monte Carlo TV within 0.005 of 0.00457, deterministic", ok,
                   f"estimate {est}, {elapsed:.1f}s")
    assert ok


def test_11_mixing_time(acceptance_log):
    a = mixing_time(52, 10, 0.25)
    b = mixing_time(52, 300, 0.01)
    before = tv_exact(52, 10, with_bounds=False).tv_exact_decimal
    ok = (
        a.repeats == 2
        and rat_to_decimal(a.tv, 5) == "0.01028"
        and before == "1.00000"
        and b.repeats == 1
        and rat_to_decimal(b.tv, 5) == "0.00457"
    )
    acceptance_log(11, "mixing times 2 and 1 with matching witnesses", ok,
                   f"witnesses {rat_to_decimal(a.tv, 5)}, {rat_to_decimal(b.tv, 5)}")
    assert ok
