#!/usr/bin/env python3
"""Check the multiplicative growth inequality r_k(n)*(k-1) <= r_k(n*k) on a
sweep of exactly solved instances, optionally against a shared result cache."""

import argparse

from apfree.exact import ResultCache, SolveBudget, check_corollary_recursive


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--k", type=int, default=3, help="prime progression length")
    parser.add_argument("--n-max", type=int, default=10)
    parser.add_argument("--max-nodes", type=int, default=10**8)
    parser.add_argument("--cache", default=None)
    args = parser.parse_args()

    cache = ResultCache(args.cache) if args.cache else None
    budget = SolveBudget(max_nodes=args.max_nodes)
    failures = 0
    print(f"{'n':>4} {'lhs':>6} {'rhs':>6} {'holds':>7} {'status':>14}")
    for n in range(1, args.n_max + 1):
        rep = check_corollary_recursive(args.k, n, budget=budget, cache=cache)
        print(f"{n:>4} {rep.lhs!s:>6} {rep.rhs!s:>6} {rep.holds!s:>7} {rep.status:>14}")
        if rep.holds is False:
            failures += 1
    if failures:
        print(f"\nINEQUALITY VIOLATED on {failures} instance(s); this is a defect")
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
