"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 computation bound exceeded,
3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import Sequence

from shelfmix import config
from shelfmix.errors import BoundExceeded, InvariantViolation
from shelfmix.exactnum import rat_to_decimal
from shelfmix.permstat import valley_table
from shelfmix.shelfmeasure import q_table, shuffle_valley_pmf
from shelfmix.simulator import (
    composition_check,
    empirical_tv,
    enumerate_exact,
    q_equivalence,
    simulate,
)
from shelfmix.tvmetrics import cutoff_profile, mixing_time, tv_exact

EXIT_USAGE, EXIT_BOUND, EXIT_INVARIANT = 1, 2, 3

TV_PLACES = 5
DELTA_PLACES = 10

TV_FIELDS = ["kind", "n", "m", "tv_exact", "tv_asymptotic", "argmax_k", "delta_minus", "delta_plus"]
TV_PRECISION = {"tv_exact": TV_PLACES, "tv_asymptotic": TV_PLACES,
                "delta_minus": DELTA_PLACES, "delta_plus": DELTA_PLACES}
MIXING_FIELDS = ["kind", "n", "m", "eps", "repeats", "effective_shelves", "tv_exact"]
SIMULATE_FIELDS = ["kind", "n", "m", "samples", "seed", "empirical_tv", "tv_exact"]
HISTOGRAM_FIELDS = ["kind", "n", "m", "k", "count", "empirical", "exact"]
PROFILE_FIELDS = ["kind", "n", "theta", "tv_asymptotic"]

# Schema for --format json: an array of flat objects whose numeric values are
# decimal strings (empty string when absent) plus a "precision" map giving the
# number of fractional digits of each rounded field.
JSON_SCHEMA = {
    "type": "array",
    "items": {
        "type": "object",
        "required": ["kind", "precision"],
        "properties": {
            "kind": {"enum": ["tv", "mixing", "simulate", "histogram", "profile"]},
            "precision": {
                "type": "object",
                "additionalProperties": {"type": "integer", "minimum": 0},
            },
        },
        "additionalProperties": {"type": "string"},
    },
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def __init__(self, *args, **kwargs) -> None:
        kwargs.setdefault("allow_abbrev", False)
        super().__init__(*args, **kwargs)

    def error(self, message: str) -> None:  # argparse would exit 2
        raise UsageError(message)


def _fmt_float(x: float | None, places: int) -> str:
    return "" if x is None else rat_to_decimal(Fraction(x), places)


def _fmt_rat(x: Fraction | None, places: int) -> str:
    return "" if x is None else rat_to_decimal(x, places)


def tv_record(n: int, m: int, mode: str = "both") -> dict[str, str]:
    rep = tv_exact(n, m, with_asymptotic=mode != "exact")
    b = rep.delta_bounds
    return {
        "kind": "tv",
        "n": str(n),
        "m": str(m),
        "tv_exact": rep.tv_exact_decimal if mode != "asymptotic" else "",
        "tv_asymptotic": _fmt_float(rep.tv_asymptotic, TV_PLACES),
        "argmax_k": str(rep.argmax_k) if mode != "asymptotic" else "",
        "delta_minus": _fmt_rat(b.delta_minus if b else None, DELTA_PLACES),
        "delta_plus": _fmt_rat(b.delta_plus if b else None, DELTA_PLACES),
    }


def _tv_record_args(args: tuple[int, int, str]) -> dict[str, str]:
    return tv_record(*args)


def _emit(records: list[dict[str, str]], fields: list[str], fmt: str,
          precision: dict[str, int], out) -> None:
    if fmt == "json":
        payload = [{**r, "precision": {k: v for k, v in precision.items() if k in r}}
                   for r in records]
        out.write(json.dumps(payload, indent=2) + "\n")
        return
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    writer.writerows(records)
    out.write(buf.getvalue())


def cmd_tv(args, out) -> int:
    records = [tv_record(n, m, args.mode) for n in args.n for m in args.m]
    _emit(records, TV_FIELDS, args.format, TV_PRECISION, out)
    return 0


def cmd_figure1(args, out) -> int:
    if args.m_max < 1:
        raise UsageError("--m-max must be >= 1")
    if args.m_max > args.m_bound:
        raise BoundExceeded(f"--m-max {args.m_max} exceeds --m-bound {args.m_bound}")
    jobs = [(args.n, m, "both") for m in range(1, args.m_max + 1)]
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            records = list(pool.map(_tv_record_args, jobs, chunksize=8))
    else:
        records = [_tv_record_args(j) for j in jobs]
    _emit(records, TV_FIELDS, args.format, TV_PRECISION, out)
    if args.plot:
        from shelfmix.report import plot_tv_table

        plot_tv_table(
            args.n,
            [int(r["m"]) for r in records],
            [float(r["tv_exact"]) for r in records],
            [float(r["tv_asymptotic"]) for r in records],
            args.plot,
        )
    return 0


def cmd_mixing(args, out) -> int:
    res = mixing_time(args.n, args.m, args.eps)
    rec = {
        "kind": "mixing",
        "n": str(res.n),
        "m": str(res.m),
        "eps": str(args.eps),
        "repeats": str(res.repeats),
        "effective_shelves": str(res.effective_shelves),
        "tv_exact": rat_to_decimal(res.tv, TV_PLACES),
    }
    _emit([rec], MIXING_FIELDS, args.format, {"tv_exact": TV_PLACES}, out)
    return 0


def cmd_simulate(args, out) -> int:
    if args.histogram:
        run = simulate(args.n, args.m, args.samples, args.seed)
        pmf = shuffle_valley_pmf(q_table(args.n, args.m), valley_table(args.n))
        records = [
            {
                "kind": "histogram",
                "n": str(args.n),
                "m": str(args.m),
                "k": str(k),
                "count": str(c),
                "empirical": _fmt_rat(Fraction(c, args.samples), TV_PLACES),
                "exact": _fmt_rat(pmf[k], TV_PLACES),
            }
            for k, c in enumerate(run.valley_histogram)
        ]
        _emit(records, HISTOGRAM_FIELDS, args.format,
              {"empirical": TV_PLACES, "exact": TV_PLACES}, out)
        return 0
    if args.samples < 1000:
        raise UsageError("--samples must be at least 1000")
    est = empirical_tv(args.n, args.m, args.samples, args.seed)
    exact = tv_exact(args.n, args.m, with_bounds=False, with_asymptotic=False)
    rec = {
        "kind": "simulate",
        "n": str(args.n),
        "m": str(args.m),
        "samples": str(args.samples),
        "seed": str(args.seed),
        "empirical_tv": _fmt_float(est, TV_PLACES),
        "tv_exact": exact.tv_exact_decimal,
    }
    _emit([rec], SIMULATE_FIELDS, args.format,
          {"empirical_tv": TV_PLACES, "tv_exact": TV_PLACES}, out)
    return 0


def _composition_partners(m: int) -> list[tuple[int, int]]:
    pairs = [(a, m // (2 * a)) for a in range(1, m) if m % (2 * a) == 0 and a <= m // (2 * a)]
    return pairs + [(m, 1)]


def cmd_oracle(args, out) -> int:
    n, m = args.n, args.m
    dist = enumerate_exact(n, m)
    failed = False

    bad = q_equivalence(dist, m)
    failed |= bool(bad)
    line = f"q-equivalence n={n} m={m}"
    if bad:
        p, got, want = bad[0]
        out.write(f"FAIL {line}: {len(bad)} mismatches, e.g. {p} has {got}, q gives {want}\n")
    else:
        out.write(f"PASS {line}\n")

    mixed = {k: v for k, v in dist.class_values().items() if len(v) > 1}
    failed |= bool(mixed)
    line = f"sufficiency n={n} m={m}"
    if mixed:
        k, vals = next(iter(mixed.items()))
        out.write(f"FAIL {line}: class k={k} has values {sorted(vals)}\n")
    else:
        out.write(f"PASS {line}\n")

    for m1, m2 in _composition_partners(m):
        line = f"composition n={n} m1={m1} m2={m2} -> {2 * m1 * m2}"
        try:
            rep = composition_check(n, m1, m2)
        except BoundExceeded as exc:
            out.write(f"SKIP {line}: {exc}\n")
            continue
        if rep.holds:
            out.write(f"PASS {line}\n")
        else:
            failed = True
            p, got, want = rep.witness
            out.write(f"FAIL {line}: {rep.mismatches} mismatches, e.g. {p} has {got} vs {want}\n")
    return EXIT_INVARIANT if failed else 0


def parse_range(text: str) -> list[float]:
    """``from:to:step`` with both ends included."""
    try:
        lo, hi, step = (float(x) for x in text.split(":"))
    except ValueError:
        raise UsageError(f"expected from:to:step, got {text!r}") from None
    if step <= 0 or hi < lo:
        raise UsageError(f"bad range {text!r}")
    count = int(round((hi - lo) / step)) + 1
    return [lo + i * step for i in range(count)]


def cmd_profile(args, out) -> int:
    thetas = parse_range(args.theta)
    rows = cutoff_profile(args.n, thetas)
    records = [
        {"kind": "profile", "n": str(args.n), "theta": f"{t:g}",
         "tv_asymptotic": _fmt_float(v, TV_PLACES)}
        for t, v in rows
    ]
    _emit(records, PROFILE_FIELDS, args.format, {"tv_asymptotic": TV_PLACES}, out)
    if args.plot:
        from shelfmix.report import plot_profile

        plot_profile([t for t, _ in rows], [v for _, v in rows], args.plot)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(
        prog="shelfmix",
        description="Exact and asymptotic total variation for the m-shelf shuffler.",
    )
    p.add_argument("--max-n", type=int, help="largest deck size (env SHELFMIX_MAX_N, default 64)")
    p.add_argument("--enum-budget", type=int,
                   help="enumeration term budget (env SHELFMIX_ENUM_BUDGET, default 1e7)")
    p.add_argument("--max-shelves", type=int,
                   help="largest effective shelf count for mixing (env SHELFMIX_MAX_SHELVES)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def fmt(sp):
        sp.add_argument("--format", choices=["csv", "json"], default="csv")

    s = sub.add_parser("tv", help="distance for given deck sizes and shelf counts")
    s.add_argument("--n", type=int, nargs="+", required=True)
    s.add_argument("--m", type=int, nargs="+", required=True)
    s.add_argument("--mode", choices=["exact", "asymptotic", "both"], default="both")
    fmt(s)
    s.set_defaults(func=cmd_tv)

    s = sub.add_parser("figure1", help="table of exact and asymptotic distance for m = 1..m-max")
    s.add_argument("--n", type=int, default=52)
    s.add_argument("--m-max", type=int, default=300)
    s.add_argument("--m-bound", type=int, default=100_000, help=argparse.SUPPRESS)
    s.add_argument("--jobs", type=int, default=1, help="worker processes; row order is fixed")
    s.add_argument("--plot", metavar="PATH", help="also render the table as a figure")
    fmt(s)
    s.set_defaults(func=cmd_figure1)

    s = sub.add_parser("mixing", help="fewest passes reaching distance <= eps")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--eps", type=float, required=True)
    fmt(s)
    s.set_defaults(func=cmd_mixing)

    s = sub.add_parser("simulate", help="Monte Carlo estimate of the distance")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--samples", type=int, default=100_000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--histogram", action="store_true", help="print the valley histogram instead")
    fmt(s)
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("oracle", help="check the q formula against exact enumeration")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--m", type=int, required=True)
    s.set_defaults(func=cmd_oracle)

    s = sub.add_parser("profile", help="asymptotic cutoff profile over a theta range")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--theta", required=True, metavar="FROM:TO:STEP")
    s.add_argument("--plot", metavar="PATH")
    fmt(s)
    s.set_defaults(func=cmd_profile)
    return p


def _glue_range_flags(argv: list[str]) -> list[str]:
    # "--theta -3:3:0.5" would otherwise be read as an unknown option
    out, i = [], 0
    while i < len(argv):
        if argv[i] == "--theta" and i + 1 < len(argv):
            out.append(f"--theta={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = sys.stdout if out is None else out
    argv = _glue_range_flags(list(sys.argv[1:] if argv is None else argv))
    try:
        args = build_parser().parse_args(argv)
        config.set_override("SHELFMIX_MAX_N", args.max_n)
        config.set_override("SHELFMIX_ENUM_BUDGET", args.enum_budget)
        config.set_override("SHELFMIX_MAX_SHELVES", args.max_shelves)
        return args.func(args, out)
    except UsageError as exc:
        print(f"shelfmix: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BoundExceeded as exc:
        print(f"shelfmix: bound exceeded: {exc}", file=sys.stderr)
        return EXIT_BOUND
    except InvariantViolation as exc:
        print(f"shelfmix: invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except ValueError as exc:
        print(f"shelfmix: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    finally:
        config.clear_overrides()
