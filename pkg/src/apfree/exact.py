"""Exact maximum progression-free subset sizes by pruned depth-first search.

The solver branches on include/exclude over elements 1..n in ascending order,
prunes a branch when (current size + elements remaining) cannot beat the
incumbent, and rejects an element immediately when it would complete a k-term
progression with already-included elements. The witness returned is the
lexicographically smallest optimal set under ascending-member comparison.

A vectorized full-enumeration oracle (`naive_max_apfree`) is kept alongside
the solver on purpose; the two share no search code and cross-check each
other in the test suite.
"""

from __future__ import annotations

import csv
import logging
import sys
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import numpy as np
from filelock import FileLock

from .core import IntegerSet, is_prime
from .errors import InvalidParameterError

logger = logging.getLogger(__name__)

NAIVE_ENUMERATION_MAX_N = 24  # 2^n uint32 rows; 24 keeps the arrays under ~70 MB


@dataclass(frozen=True)
class SolveBudget:
    """Node and wall-time limits; None means unlimited. Exceeding a budget
    yields an Unsolved result carrying the best lower bound found, never a
    wrong value."""

    max_nodes: Optional[int] = None
    max_time: Optional[float] = None


@dataclass(frozen=True)
class ExactRecord:
    k: int
    n: int
    value: int
    witness: IntegerSet
    nodes_explored: int
    wall_time: float
    from_cache: bool = False


@dataclass(frozen=True)
class Unsolved:
    k: int
    n: int
    best_value: int
    best_witness: Optional[IntegerSet]
    nodes_explored: int
    wall_time: float
    reason: str


SolveResult = Union[ExactRecord, Unsolved]


@dataclass(frozen=True)
class CorollaryReport:
    """Multiplicative growth check: r_k(n)*(k-1) <= r_k(n*k) on exact values."""

    k: int
    n: int
    lhs: Optional[int]
    rhs: Optional[int]
    holds: Optional[bool]
    status: str  # "ok" or "indeterminate"


class _BudgetExhausted(Exception):
    def __init__(self, reason: str):
        self.reason = reason


def _completion_masks(k: int, n: int) -> list[list[int]]:
    """masks[m] lists bitmasks of {m-d, m-2d, ..., m-(k-1)d} for every feasible d.

    Element m completes a k-AP with the partial set S exactly when one of
    these masks is a subset of S; all earlier terms are below m, so checking
    at include time is sufficient for ascending-order search.
    """
    masks: list[list[int]] = [[] for _ in range(n + 2)]
    for m in range(1, n + 1):
        row = []
        for d in range(1, (m - 1) // (k - 1) + 1):
            w = 0
            for i in range(1, k):
                w |= 1 << (m - i * d)
            row.append(w)
        masks[m] = row
    return masks


def _search(k: int, n: int, budget: SolveBudget) -> tuple[str, int, int, int]:
    """Core branch and bound. Returns (status, best_size, best_mask, nodes)."""
    masks_by_elem = _completion_masks(k, n)
    best_size = 0
    best_mask = 0
    nodes = 0
    max_nodes = budget.max_nodes
    deadline = time.monotonic() + budget.max_time if budget.max_time is not None else None

    sys.setrecursionlimit(max(sys.getrecursionlimit(), n + 200))

    def dfs(m: int, cur: int, size: int, limit: int) -> None:
        nonlocal best_size, best_mask, nodes
        nodes += 1
        if max_nodes is not None and nodes > max_nodes:
            raise _BudgetExhausted("node budget exhausted")
        if deadline is not None and (nodes & 2047) == 0 and time.monotonic() > deadline:
            raise _BudgetExhausted("time budget exhausted")
        if size + (limit - m + 1) <= best_size:
            return
        if m > limit:
            best_size = size
            best_mask = cur
            return
        completes = False
        for w in masks_by_elem[m]:
            if cur & w == w:
                completes = True
                break
        if not completes:
            dfs(m + 1, cur | (1 << m), size + 1, limit)
        dfs(m + 1, cur, size, limit)

    status = "solved"
    try:
        for first in range(1, n + 1):
            # Mirror symmetry x -> n+1-x: the lex-min optimum satisfies
            # max <= n+1-min, so once the first element is fixed the branch
            # may cap its largest element. Applied at the root only.
            limit = n + 1 - first
            if 1 + max(0, limit - first) <= best_size:
                break
            dfs(first + 1, 1 << first, 1, limit)
    except _BudgetExhausted as stop:
        status = stop.reason
    return status, best_size, best_mask, nodes


class ResultCache:
    """CSV-backed store of solved instances: header k,n,value,witness with the
    witness as ;-joined ascending members. Writes hold a lock file; corrupt
    rows are rejected with a logged warning, never silently dropped."""

    HEADER = ["k", "n", "value", "witness"]

    def __init__(self, path):
        self.path = Path(path)
        self._filelock = FileLock(str(self.path) + ".lock")
        self._thread_lock = threading.Lock()
        self._entries: dict[tuple[int, int], tuple[int, tuple[int, ...]]] = {}
        self._loaded = False

    def _parse_row(self, row: list[str], lineno: int) -> Optional[tuple]:
        if len(row) != 4:
            logger.warning(
                "cache %s line %d: rejected row with %d fields (want 4): %r",
                self.path, lineno, len(row), row,
            )
            return None
        try:
            k = int(row[0])
            n = int(row[1])
            value = int(row[2])
            witness = tuple(int(x) for x in row[3].split(";")) if row[3] else ()
        except ValueError:
            logger.warning("cache %s line %d: rejected non-integer row: %r", self.path, lineno, row)
            return None
        if k < 3 or n < 0 or value < 0 or len(witness) != value:
            logger.warning(
                "cache %s line %d: rejected inconsistent row (|witness| != value): %r",
                self.path, lineno, row,
            )
            return None
        if any(w < 1 or w > n for w in witness) or list(witness) != sorted(set(witness)):
            logger.warning(
                "cache %s line %d: rejected malformed witness: %r", self.path, lineno, row
            )
            return None
        return k, n, value, witness

    def load(self) -> None:
        with self._thread_lock:
            if self._loaded:
                return
            self._entries = {}
            if self.path.exists():
                with open(self.path, newline="", encoding="utf-8") as fh:
                    reader = csv.reader(fh)
                    for lineno, row in enumerate(reader, start=1):
                        if lineno == 1 and row == self.HEADER:
                            continue
                        if not row:
                            continue
                        parsed = self._parse_row(row, lineno)
                        if parsed is None:
                            continue
                        k, n, value, witness = parsed
                        self._entries.setdefault((k, n), (value, witness))
            self._loaded = True

    def get(self, k: int, n: int) -> Optional[ExactRecord]:
        self.load()
        hit = self._entries.get((k, n))
        if hit is None:
            return None
        value, witness = hit
        return ExactRecord(
            k=k,
            n=n,
            value=value,
            witness=IntegerSet.from_members(witness, universe_max=n),
            nodes_explored=0,
            wall_time=0.0,
            from_cache=True,
        )

    def put(self, record: ExactRecord) -> None:
        self.load()
        key = (record.k, record.n)
        with self._thread_lock:
            if key in self._entries:
                return
            self._entries[key] = (record.value, record.witness.members)
            with self._filelock:
                new_file = not self.path.exists() or self.path.stat().st_size == 0
                with open(self.path, "a", newline="", encoding="utf-8") as fh:
                    writer = csv.writer(fh)
                    if new_file:
                        writer.writerow(self.HEADER)
                    writer.writerow(
                        [
                            record.k,
                            record.n,
                            record.value,
                            ";".join(str(m) for m in record.witness),
                        ]
                    )


def solve_exact(
    k: int,
    n: int,
    budget: Optional[SolveBudget] = None,
    cache: Optional[ResultCache] = None,
) -> SolveResult:
    """Exact r_k(n) with optimal witness, or Unsolved when the budget runs out.

    Cache hits bypass budgets entirely. The search tree is explored in a fixed
    sequential order, so value, witness, and node count are reproducible;
    parallelism lives one level up, across instances (see solve_range).
    """
    if not isinstance(k, int) or k < 3:
        raise InvalidParameterError(f"k must be an integer >= 3, got {k!r}")
    if not isinstance(n, int) or n < 1:
        raise InvalidParameterError(f"n must be a positive integer, got {n!r}")
    if cache is not None:
        hit = cache.get(k, n)
        if hit is not None:
            return hit
    budget = budget or SolveBudget()
    t0 = time.monotonic()
    status, best_size, best_mask, nodes = _search(k, n, budget)
    elapsed = time.monotonic() - t0
    witness = IntegerSet.from_mask(best_mask, universe_max=n)
    if status != "solved":
        return Unsolved(
            k=k,
            n=n,
            best_value=best_size,
            best_witness=witness if best_mask else None,
            nodes_explored=nodes,
            wall_time=elapsed,
            reason=status,
        )
    record = ExactRecord(
        k=k, n=n, value=best_size, witness=witness, nodes_explored=nodes, wall_time=elapsed
    )
    if cache is not None:
        cache.put(record)
    return record


def solve_range(
    k: int,
    n_from: int,
    n_to: int,
    budget: Optional[SolveBudget] = None,
    cache: Optional[ResultCache] = None,
    threads: int = 1,
) -> list[SolveResult]:
    """Solve every n in [n_from, n_to], in order, optionally across a thread pool.

    Consecutive solved values must satisfy r_k(n) <= r_k(n+1) <= r_k(n)+1;
    a violation indicates a solver defect and raises. Unsolved instances are
    reported in place without aborting the sweep.
    """
    if n_from > n_to:
        raise InvalidParameterError(f"empty range: {n_from} > {n_to}")
    ns = range(n_from, n_to + 1)
    threads = max(1, int(threads or 1))
    if threads == 1 or len(ns) == 1:
        results = [solve_exact(k, n, budget, cache) for n in ns]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda n: solve_exact(k, n, budget, cache), ns))
    for a, b in zip(results, results[1:]):
        if isinstance(a, ExactRecord) and isinstance(b, ExactRecord):
            if not (a.value <= b.value <= a.value + 1):
                raise RuntimeError(
                    f"monotonicity violated: r_{k}({a.n})={a.value} but "
                    f"r_{k}({b.n})={b.value}"
                )
    return results


def check_corollary_recursive(
    k: int,
    n: int,
    budget: Optional[SolveBudget] = None,
    cache: Optional[ResultCache] = None,
    threads: int = 1,
) -> CorollaryReport:
    """Check r_k(n)*(k-1) <= r_k(n*k) on exact solver values.

    Requires prime k (the block construction behind the inequality does).
    An unsolved subinstance marks the report indeterminate. The two
    subinstances may be solved in parallel; the report does not depend on
    the thread count.
    """
    if not is_prime(k) or k < 3:
        raise InvalidParameterError(f"k must be prime and >= 3, got {k}")
    if max(1, int(threads or 1)) > 1:
        with ThreadPoolExecutor(max_workers=2) as pool:
            small, large = pool.map(
                lambda nn: solve_exact(k, nn, budget, cache), [n, n * k]
            )
    else:
        small = solve_exact(k, n, budget, cache)
        large = solve_exact(k, n * k, budget, cache)
    if isinstance(small, Unsolved) or isinstance(large, Unsolved):
        lhs = small.value * (k - 1) if isinstance(small, ExactRecord) else None
        rhs = large.value if isinstance(large, ExactRecord) else None
        return CorollaryReport(k=k, n=n, lhs=lhs, rhs=rhs, holds=None, status="indeterminate")
    lhs = small.value * (k - 1)
    rhs = large.value
    return CorollaryReport(k=k, n=n, lhs=lhs, rhs=rhs, holds=lhs <= rhs, status="ok")


def _popcount_u32(arr: np.ndarray) -> np.ndarray:
    x = arr.copy()
    x -= (x >> 1) & np.uint32(0x55555555)
    x = (x & np.uint32(0x33333333)) + ((x >> 2) & np.uint32(0x33333333))
    x = (x + (x >> 4)) & np.uint32(0x0F0F0F0F)
    return (x * np.uint32(0x01010101)) >> 24


def _ap_masks(k: int, n: int) -> list[int]:
    """All k-term progressions inside {1..n} as bitmasks over bits 0..n-1."""
    out = []
    for d in range(1, (n - 1) // (k - 1) + 1):
        for a in range(1, n - (k - 1) * d + 1):
            w = 0
            for i in range(k):
                w |= 1 << (a + i * d - 1)
            out.append(w)
    return out


def naive_max_apfree(k: int, n: int) -> ExactRecord:
    """Independent oracle: enumerate all 2^n subsets and keep the best.

    Vectorized over the full subset table, so it shares nothing with the
    branch-and-bound path. The witness is the lexicographically smallest
    optimum under ascending-member comparison. Capped at n <= 24.
    """
    if not isinstance(k, int) or k < 3:
        raise InvalidParameterError(f"k must be an integer >= 3, got {k!r}")
    if not isinstance(n, int) or n < 1:
        raise InvalidParameterError(f"n must be a positive integer, got {n!r}")
    if n > NAIVE_ENUMERATION_MAX_N:
        raise InvalidParameterError(
            f"naive enumeration is capped at n <= {NAIVE_ENUMERATION_MAX_N}, got {n}"
        )
    size = 1 << n
    subsets = np.arange(size, dtype=np.uint32)
    bad = np.zeros(size, dtype=bool)
    scratch = np.empty(size, dtype=np.uint32)
    for m in _ap_masks(k, n):
        mm = np.uint32(m)
        np.bitwise_and(subsets, mm, out=scratch)
        bad |= scratch == mm
    counts = _popcount_u32(subsets).astype(np.int32)
    counts[bad] = -1
    value = int(counts.max())
    candidates = np.flatnonzero(counts == value).astype(np.uint32)
    # Lexicographic minimum over equal-size member tuples: greedily demand the
    # smallest elements whenever any candidate still contains them.
    for b in range(n):
        if len(candidates) == 1:
            break
        with_b = candidates[(candidates >> np.uint32(b)) & np.uint32(1) == 1]
        if len(with_b):
            candidates = with_b
    best = int(candidates[0])
    members = [b + 1 for b in range(n) if (best >> b) & 1]
    witness = IntegerSet.from_members(members, universe_max=n)
    return ExactRecord(
        k=k, n=n, value=value, witness=witness, nodes_explored=size, wall_time=0.0
    )
