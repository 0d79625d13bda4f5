"""Command-line front door: construction, verification, exact values, bound
tables, crossover, reciprocal sums, and ratio probes.

Exit codes: 0 success (or AP-free), 1 progression witness found, 2 usage
error, 3 resource or budget limit, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from typing import Optional

from . import analysis, bounds, core, exact
from .errors import (
    InvalidParameterError,
    NumericDomainError,
    ResourceLimitError,
    SetFileFormatError,
)

EXIT_OK = 0
EXIT_WITNESS = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3
EXIT_IO = 4

CACHE_ENV_VAR = "APFREE_CACHE"


def parse_scalar(text: str) -> float:
    """Numeric CLI input: plain, scientific ('1e6'), or power ('2^16') notation."""
    t = text.strip()
    if "^" in t:
        base, _, expo = t.partition("^")
        return float(base) ** float(expo)
    try:
        return int(t)
    except ValueError:
        return float(t)


def parse_int(text: str) -> int:
    v = parse_scalar(text)
    if isinstance(v, float):
        if not v.is_integer():
            raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
        v = int(v)
    return v


def _default_threads() -> int:
    return os.cpu_count() or 1


def _emit_rows(rows: list[dict], columns: list[str], fmt: str, out: Optional[str]) -> None:
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([row.get(c, "") for c in columns])
        text = buf.getvalue()
    elif fmt == "json":
        text = json.dumps({"rows": rows}) + "\n"
    else:
        widths = {c: max(len(c), *(len(str(r.get(c, ""))) for r in rows)) if rows else len(c) for c in columns}
        lines = ["  ".join(c.ljust(widths[c]) for c in columns)]
        for row in rows:
            lines.append("  ".join(str(row.get(c, "")).ljust(widths[c]) for c in columns))
        text = "\n".join(lines) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _resolve_format(args) -> str:
    if args.format:
        return args.format
    return "csv" if getattr(args, "out", None) else "plain"


def cmd_construct(args) -> int:
    trace = core.iterate_construction(args.k, args.r, universe_limit=args.universe_limit)
    print("sizes: " + ",".join(str(card) for (_, card) in trace.levels))
    if args.out:
        core.write_set_file(trace.final_set, args.out)
    else:
        for m in trace.final_set:
            print(m)
    return EXIT_OK


def cmd_verify(args) -> int:
    s = core.read_set_file(args.file)
    witness = core.verify_ap_free(s, args.k, threads=args.threads)
    if witness is None:
        print("AP-free")
        return EXIT_OK
    print(f"a={witness.start} d={witness.difference}")
    return EXIT_WITNESS


def _resolve_cache(args) -> Optional[exact.ResultCache]:
    path = args.cache or os.environ.get(CACHE_ENV_VAR)
    return exact.ResultCache(path) if path else None


def cmd_exact(args) -> int:
    if (args.n is None) == (args.range is None):
        raise InvalidParameterError("exactly one of --n or --range is required")
    if args.n is not None:
        lo = hi = args.n
    else:
        try:
            lo_text, hi_text = args.range.split(":", 1)
            lo, hi = parse_int(lo_text), parse_int(hi_text)
        except (ValueError, argparse.ArgumentTypeError):
            raise InvalidParameterError(f"bad range {args.range!r}; expected A:B")
    budget = exact.SolveBudget(max_nodes=args.max_nodes, max_time=args.max_time)
    cache = _resolve_cache(args)
    results = exact.solve_range(args.k, lo, hi, budget=budget, cache=cache, threads=args.threads)
    rows = []
    any_unsolved = False
    for res in results:
        if isinstance(res, exact.ExactRecord):
            rows.append(
                {
                    "k": res.k,
                    "n": res.n,
                    "value": res.value,
                    "witness": ";".join(str(m) for m in res.witness),
                    "status": "exact",
                }
            )
        else:
            any_unsolved = True
            rows.append(
                {
                    "k": res.k,
                    "n": res.n,
                    "value": res.best_value,
                    "witness": ";".join(str(m) for m in res.best_witness or ()),
                    "status": "lower-bound",
                }
            )
    _emit_rows(rows, ["k", "n", "value", "witness", "status"], _resolve_format(args), args.out)
    return EXIT_RESOURCE if any_unsolved else EXIT_OK


def cmd_bounds(args) -> int:
    if (args.n is None) == (args.log2n is None):
        raise InvalidParameterError("exactly one of --n or --log2n is required")
    if args.n is not None:
        points = []
        for tok in args.n.split(","):
            value = parse_scalar(tok)
            if value <= 0:
                raise NumericDomainError(f"n must be positive, got {tok!r}")
            points.append((tok.strip(), math.log2(value)))
    else:
        points = [(f"2^{tok.strip()}", float(parse_scalar(tok))) for tok in args.log2n.split(",")]
    families = [f.strip() for f in args.families.split(",") if f.strip()]
    rows = []
    for label, log2_n in points:
        for family in families:
            spec = bounds.BoundSpec(
                family=family,
                k=_family_k(family, args.k),
                c=args.c,
                c1=args.c1,
                c2=args.c2,
            )
            row = {"n": label, "family": family, "k": spec.k}
            try:
                lv = spec.evaluate_log2(log2_n)
            except NumericDomainError as err:
                row["log2_value"] = ""
                row["value_or_inf_flag"] = f"domain-error: {err}"
            else:
                row["log2_value"] = repr(lv.log2)
                row["value_or_inf_flag"] = lv.value_or_flag()
            rows.append(row)
    _emit_rows(
        rows,
        ["n", "family", "k", "log2_value", "value_or_inf_flag"],
        _resolve_format(args),
        args.out,
    )
    return EXIT_OK


def _family_k(family: str, k: int) -> int:
    # The k=3/k=4 specific families carry their k implicitly.
    if family in ("roth", "bloom-r3", "r3-lower"):
        return 3
    if family == "green-tao-r4":
        return 4
    return k


def cmd_crossover(args) -> int:
    result = bounds.crossover_n(args.k, args.c)
    if args.format == "json":
        payload = {
            "k": args.k,
            "c": args.c,
            "found": result is not None,
            "log2_n_star": result.log2 if result is not None else None,
        }
        print(json.dumps(payload))
    else:
        if result is None:
            print("no crossover found in bracket")
        else:
            print(f"log2_n_star = {result.log2:.4f} (constants={args.c:g})")
    return EXIT_OK


def cmd_recipsum(args) -> int:
    spec = analysis.IterLogSpec(args.d, args.s)
    total = analysis.reciprocal_partial_sum(spec, args.n_from, args.n_to)
    if args.format == "json":
        print(
            json.dumps(
                {"d": args.d, "s": args.s, "from": args.n_from, "to": args.n_to, "sum": total}
            )
        )
    else:
        print(f"{total:.12g}")
    return EXIT_OK


def cmd_probe(args) -> int:
    if args.theorem == "11":
        report = analysis.probe_theorem11(d=args.d, c=args.c)
    else:
        report = analysis.probe_theorem13(d=args.d, s=args.s, c=args.c)
    print(report.to_json())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="apfree",
        description=(
            "Construct provably progression-free sets, compute exact maximum "
            "sizes for small universes, and evaluate/compare bound families."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", help="run the iterated block construction")
    p.add_argument("--k", type=parse_int, required=True, help="prime block length")
    p.add_argument("--r", type=parse_int, required=True, help="iteration depth")
    p.add_argument("--out", help="write the final set file here (default: stdout)")
    p.add_argument(
        "--universe-limit",
        type=parse_int,
        default=core.DEFAULT_UNIVERSE_LIMIT,
        help="largest bit-vector universe allowed",
    )
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("verify", help="search a set file for a k-term progression")
    p.add_argument("--file", required=True)
    p.add_argument("--k", type=parse_int, required=True)
    p.add_argument("--threads", type=parse_int, default=_default_threads())
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("exact", help="exact maximum progression-free subset sizes")
    p.add_argument("--k", type=parse_int, required=True)
    p.add_argument("--n", type=parse_int)
    p.add_argument("--range", help="inclusive range A:B of n values")
    p.add_argument("--max-nodes", type=parse_int, default=None)
    p.add_argument("--max-time", type=float, default=None, help="seconds per instance")
    p.add_argument("--cache", help=f"cache CSV path (or set {CACHE_ENV_VAR})")
    p.add_argument("--threads", type=parse_int, default=_default_threads())
    p.add_argument("--format", choices=["plain", "csv", "json"])
    p.add_argument("--out")
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("bounds", help="tabulate bound families at given n")
    p.add_argument("--k", type=parse_int, default=3)
    p.add_argument("--n", help="comma-separated n values (2^k notation accepted)")
    p.add_argument("--log2n", help="comma-separated log2(n) values")
    p.add_argument("--families", default="theorem-main", help="comma-separated family names")
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--c1", type=float, default=1.0)
    p.add_argument("--c2", type=float, default=1.0)
    p.add_argument("--format", choices=["plain", "csv", "json"])
    p.add_argument("--out")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("crossover", help="where the general family overtakes the block bound")
    p.add_argument("--k", type=parse_int, required=True)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--format", choices=["plain", "json"], default="plain")
    p.set_defaults(func=cmd_crossover)

    p = sub.add_parser("recipsum", help="partial sum of reciprocals of an iterated-log chain")
    p.add_argument("--d", type=parse_int, required=True)
    p.add_argument("--s", type=float, default=1.0)
    p.add_argument("--from", dest="n_from", type=parse_int, required=True)
    p.add_argument("--to", dest="n_to", type=parse_int, required=True)
    p.add_argument("--format", choices=["plain", "json"], default="plain")
    p.set_defaults(func=cmd_recipsum)

    p = sub.add_parser("probe", help="doubling-grid ratio probe reports (JSON)")
    p.add_argument("--theorem", choices=["11", "13"], required=True)
    p.add_argument("--d", type=parse_int, default=1)
    p.add_argument("--s", type=float, default=1.5, help="outer exponent (theorem 13)")
    p.add_argument("--c", type=float, default=1.0)
    p.set_defaults(func=cmd_probe)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InvalidParameterError, SetFileFormatError, NumericDomainError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceLimitError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_RESOURCE
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
