#!/usr/bin/env python3
"""Emit the iterated-log ratio probe reports as JSON, one per line."""

import argparse

from apfree.analysis import probe_theorem11, probe_theorem13


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--depths", default="1,2", help="comma-separated d values")
    parser.add_argument("--s", type=float, default=1.5, help="outer exponent for the upper-bound probe")
    parser.add_argument("--confirm", type=int, default=20, help="doubling samples past the threshold")
    args = parser.parse_args()

    for d in (int(x) for x in args.depths.split(",")):
        print(probe_theorem11(d=d, confirm_samples=args.confirm).to_json())
        print(probe_theorem13(d=d, s=args.s, confirm_samples=args.confirm).to_json())
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
