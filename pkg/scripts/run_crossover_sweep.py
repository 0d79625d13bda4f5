#!/usr/bin/env python3
"""Sweep crossover points of the general lower-bound family against the
block-construction bound across primes, and report the growth shape."""

import argparse

from apfree.bounds import crossover_n
from apfree.core import is_prime


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--primes", default="3,5,7,11,13,17,19,23")
    parser.add_argument("--c", type=float, default=1.0, help="general-family constant")
    args = parser.parse_args()

    ks = [int(x) for x in args.primes.split(",")]
    bad = [k for k in ks if not is_prime(k) or k < 3]
    if bad:
        parser.error(f"not prime (or < 3): {bad}")

    print(f"{'k':>4} {'log2_n_star':>14} {'slope':>12}")
    prev = None
    for k in ks:
        res = crossover_n(k, args.c)
        if res is None:
            print(f"{k:>4} {'(none in bracket)':>14}")
            continue
        slope = ""
        if prev is not None:
            pk, pl = prev
            slope = f"{(res.log2 - pl) / (k - pk):12.2f}"
        print(f"{k:>4} {res.log2:14.4f} {slope:>12}")
        prev = (k, res.log2)
    print("\n(values are 'up to constants'; unspecified constants default to 1)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
