"""Shared test oracles, deliberately independent of the library's search code."""

from itertools import combinations

import pytest

from apfree.core import IntegerSet


def naive_witness(members, k, universe):
    """Exhaustive (start, difference) enumeration; returns the lexicographically
    smallest k-term progression inside `members`, or None."""
    ms = set(members)
    for a in sorted(ms):
        d = 1
        while a + (k - 1) * d <= universe:
            if all(a + i * d in ms for i in range(1, k)):
                return (a, d)
            d += 1
    return None


def tiny_max_apfree(k, n):
    """Max progression-free subset size by combinations enumeration (n <= 14).

    A third, slowest route: independent of both the solver and the vectorized
    subset-table oracle.
    """
    universe = list(range(1, n + 1))
    for size in range(n, 0, -1):
        for combo in combinations(universe, size):
            if naive_witness(combo, k, n) is None:
                return size
    return 0


def greedy_apfree(candidates, k, universe_max):
    """Greedy filter: keep a candidate iff it completes no k-AP with kept ones."""
    chosen = set()
    for m in sorted(set(candidates)):
        completes = False
        d = 1
        while m - (k - 1) * d >= 1:
            if all(m - i * d in chosen for i in range(1, k)):
                completes = True
                break
            d += 1
        if not completes:
            chosen.add(m)
    return IntegerSet.from_members(sorted(chosen), universe_max=universe_max)


@pytest.fixture
def tmp_cache_path(tmp_path):
    return tmp_path / "cache.csv"
