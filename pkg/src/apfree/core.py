"""Dense integer sets on {1..n}, progression search, and the prime block construction.

Sets are immutable and stored as arbitrary-precision bitmasks: bit m holds
membership of the integer m, bit 0 is always clear. Shifting and AND-ing whole
masks makes the strided progression scans bit-parallel, so verification costs
roughly one big-integer AND per candidate common difference instead of one
probe per candidate term.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Optional

from .errors import InvalidParameterError, ResourceLimitError, SetFileFormatError

# Bit vectors above this many positions are refused rather than silently allocated.
DEFAULT_UNIVERSE_LIMIT = 2**32 - 1


def is_prime(m: int) -> bool:
    """Deterministic primality by trial division; construction primes are small."""
    if m < 2:
        return False
    if m % 2 == 0:
        return m == 2
    f = 3
    while f * f <= m:
        if m % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class APWitness:
    """A concrete k-term progression: start, start+difference, ..., start+(length-1)*difference."""

    start: int
    difference: int
    length: int

    def __post_init__(self) -> None:
        if self.start < 1:
            raise InvalidParameterError(f"witness start must be >= 1, got {self.start}")
        if self.difference < 1:
            raise InvalidParameterError(
                f"witness difference must be >= 1, got {self.difference}"
            )
        if self.length < 3:
            raise InvalidParameterError(f"witness length must be >= 3, got {self.length}")

    def terms(self) -> tuple[int, ...]:
        return tuple(self.start + i * self.difference for i in range(self.length))


@dataclass(frozen=True)
class IntegerSet:
    """An immutable subset of {1..universe_max} backed by a bitmask.

    Iteration yields members in strictly ascending order. The stored
    cardinality is validated against the bit vector on construction, never
    trusted blindly.
    """

    universe_max: int
    mask: int
    cardinality: int

    def __post_init__(self) -> None:
        if self.universe_max < 0:
            raise InvalidParameterError(
                f"universe_max must be non-negative, got {self.universe_max}"
            )
        if self.mask < 0:
            raise InvalidParameterError("mask must be non-negative")
        if self.mask & 1:
            raise InvalidParameterError("bit 0 must be clear; members start at 1")
        if self.mask >> (self.universe_max + 1):
            raise InvalidParameterError(
                f"set has a member above universe_max={self.universe_max}"
            )
        if self.cardinality != self.mask.bit_count():
            raise InvalidParameterError(
                f"cardinality {self.cardinality} does not match bit count "
                f"{self.mask.bit_count()}"
            )

    @classmethod
    def from_members(
        cls, members: Iterable[int], universe_max: Optional[int] = None
    ) -> "IntegerSet":
        mask = 0
        for m in members:
            if m < 1:
                raise InvalidParameterError(f"members must be positive, got {m}")
            mask |= 1 << m
        if universe_max is None:
            universe_max = mask.bit_length() - 1 if mask else 0
        return cls(universe_max=universe_max, mask=mask, cardinality=mask.bit_count())

    @classmethod
    def from_mask(cls, mask: int, universe_max: int) -> "IntegerSet":
        return cls(universe_max=universe_max, mask=mask, cardinality=mask.bit_count())

    @classmethod
    def empty(cls, universe_max: int = 0) -> "IntegerSet":
        return cls(universe_max=universe_max, mask=0, cardinality=0)

    def __len__(self) -> int:
        return self.cardinality

    def __contains__(self, m: int) -> bool:
        return 1 <= m <= self.universe_max and bool((self.mask >> m) & 1)

    def __iter__(self) -> Iterator[int]:
        m = self.mask
        while m:
            low = m & -m
            yield low.bit_length() - 1
            m ^= low

    @property
    def members(self) -> tuple[int, ...]:
        return tuple(self)

    @property
    def max_member(self) -> int:
        """Largest member, or 0 for the empty set."""
        return self.mask.bit_length() - 1 if self.mask else 0

    def validate(self) -> None:
        """Re-check every structural invariant (used by the test harness)."""
        self.__post_init__()

    def __repr__(self) -> str:
        if self.cardinality <= 16:
            body = "{" + ",".join(str(m) for m in self) + "}"
        else:
            body = f"<{self.cardinality} members>"
        return f"IntegerSet(universe_max={self.universe_max}, {body})"


@dataclass(frozen=True)
class ConstructionTrace:
    """Levels of the iterated block construction: (universe, cardinality) per level."""

    prime_k: int
    levels: tuple[tuple[int, int], ...]
    final_set: IntegerSet


def _scan_differences(mask: int, k: int, d_lo: int, d_hi: int) -> Optional[tuple[int, int]]:
    """Smallest (start, difference) of a k-term progression with d in [d_lo, d_hi)."""
    best: Optional[tuple[int, int]] = None
    for d in range(d_lo, d_hi):
        # run holds every start a such that a, a+d, ..., a+(length-1)d are all set;
        # doubling the covered length needs only ~log2(k) AND steps.
        run = mask & (mask >> d)
        length = 2
        while run and length < k:
            step = min(length, k - length)
            run &= run >> (step * d)
            length += step
        if run:
            a = (run & -run).bit_length() - 1
            if best is None or (a, d) < best:
                best = (a, d)
    return best


def verify_ap_free(s: IntegerSet, k: int, threads: int = 1) -> Optional[APWitness]:
    """Search s for a k-term arithmetic progression.

    Returns None when the set is k-AP-free, otherwise the witness that is
    lexicographically smallest by (start, difference). Only differences >= 1
    are progressions; the search space may be partitioned across threads and
    the result is the global minimum regardless of the partitioning.
    """
    if not isinstance(k, int) or k < 3:
        raise InvalidParameterError(f"progression length k must be an integer >= 3, got {k!r}")
    if s.cardinality < k:
        return None
    d_max = (s.universe_max - 1) // (k - 1)
    if d_max < 1:
        return None

    threads = max(1, int(threads or 1))
    mask = s.mask
    if threads == 1 or d_max < 4 * threads:
        best = _scan_differences(mask, k, 1, d_max + 1)
    else:
        chunk = -(-d_max // threads)
        spans = [
            (lo, min(lo + chunk, d_max + 1))
            for lo in range(1, d_max + 1, chunk)
        ]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            found = list(pool.map(lambda span: _scan_differences(mask, k, *span), spans))
        candidates = [c for c in found if c is not None]
        best = min(candidates) if candidates else None

    if best is None:
        return None
    a, d = best
    return APWitness(start=a, difference=d, length=k)


def block_expand(
    a_set: IntegerSet,
    k: int,
    *,
    strict: bool = False,
    universe_limit: int = DEFAULT_UNIVERSE_LIMIT,
) -> IntegerSet:
    """Replace each member a with the k-1 consecutive integers (a-1)k+1 .. (a-1)k+(k-1).

    Requires prime k: the freeness proof argument for differences coprime to k
    needs every residue class to be visited, which fails for composite k. The
    result lives in {1..universe_max*k}, has cardinality |A|*(k-1), and
    contains no multiple of k. With strict=True the input is re-verified to be
    k-AP-free first.
    """
    if not isinstance(k, int) or not is_prime(k):
        raise InvalidParameterError(f"k must be prime (got {k})")
    if k == 2:
        raise InvalidParameterError(
            "k must be prime and >= 3; 2-term progressions are not searched"
        )
    new_universe = a_set.universe_max * k
    if new_universe > universe_limit:
        raise ResourceLimitError(
            f"expanded universe {new_universe} exceeds the configured limit {universe_limit}"
        )
    if strict:
        w = verify_ap_free(a_set, k)
        if w is not None:
            raise InvalidParameterError(
                f"input set contains a {k}-term progression "
                f"(start={w.start}, difference={w.difference})"
            )
    block = ((1 << (k - 1)) - 1) << 1  # bits 1..k-1
    out = 0
    for a in a_set:
        out |= block << ((a - 1) * k)
    return IntegerSet(
        universe_max=new_universe, mask=out, cardinality=a_set.cardinality * (k - 1)
    )


def iterate_construction(
    k: int,
    r: int,
    *,
    verify: bool = False,
    universe_limit: int = DEFAULT_UNIVERSE_LIMIT,
) -> ConstructionTrace:
    """Iterate the block construction r times starting from {1..k-1}.

    Level i occupies {1..k^i} with (k-1)^i members. The base level is the
    canonical maximum progression-free subset of {1..k}. With verify=True the
    final set is re-checked to be k-AP-free before returning.
    """
    if not isinstance(k, int) or not is_prime(k) or k == 2:
        raise InvalidParameterError(f"k must be prime (got {k})")
    if not isinstance(r, int) or r < 1:
        raise InvalidParameterError(f"iteration depth r must be a positive integer, got {r!r}")
    top = k**r
    if top > universe_limit:
        raise ResourceLimitError(
            f"universe k^r = {top} exceeds the configured limit {universe_limit}"
        )

    current = IntegerSet.from_mask(((1 << (k - 1)) - 1) << 1, universe_max=k)
    levels = [(current.universe_max, current.cardinality)]
    for _ in range(r - 1):
        current = block_expand(current, k, universe_limit=universe_limit)
        levels.append((current.universe_max, current.cardinality))

    if verify:
        w = verify_ap_free(current, k)
        if w is not None:
            raise RuntimeError(
                f"construction invariant violated: found progression at "
                f"start={w.start}, difference={w.difference}"
            )
    return ConstructionTrace(prime_k=k, levels=tuple(levels), final_set=current)


def truncate(a_set: IntegerSet, n: int) -> IntegerSet:
    """Intersect with {1..n} and shrink the universe to n."""
    if not isinstance(n, int) or n < 1:
        raise InvalidParameterError(f"truncation point must be a positive integer, got {n!r}")
    keep = a_set.mask & ((1 << (n + 1)) - 1)
    return IntegerSet(universe_max=n, mask=keep, cardinality=keep.bit_count())


def write_set_file(s: IntegerSet, path) -> None:
    """Write one member per line, preceded by a universe=<n> header."""
    lines = [f"universe={s.universe_max}"]
    lines.extend(str(m) for m in s)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_set_file(path) -> IntegerSet:
    """Parse a set file: '#' comments, optional leading universe=<n> header,
    then strictly ascending positive integers, one per line.

    Without a header the universe defaults to the last member. Violations
    raise SetFileFormatError naming the offending line.
    """
    text = Path(path).read_text(encoding="utf-8")
    universe: Optional[int] = None
    members: list[int] = []
    last = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("universe="):
            if members or universe is not None:
                raise SetFileFormatError(
                    f"line {lineno}: universe= header must be the first non-comment line"
                )
            try:
                universe = int(line[len("universe=") :])
            except ValueError:
                raise SetFileFormatError(f"line {lineno}: malformed universe header {raw!r}")
            if universe < 0:
                raise SetFileFormatError(f"line {lineno}: universe must be non-negative")
            continue
        try:
            value = int(line)
        except ValueError:
            raise SetFileFormatError(
                f"line {lineno}: expected a positive integer, got {raw!r}"
            )
        if value < 1:
            raise SetFileFormatError(f"line {lineno}: members must be positive, got {value}")
        if value <= last:
            raise SetFileFormatError(
                f"line {lineno}: members must be strictly ascending "
                f"({value} follows {last})"
            )
        members.append(value)
        last = value
    if universe is None:
        universe = last
    if members and members[-1] > universe:
        raise SetFileFormatError(
            f"member {members[-1]} exceeds declared universe {universe}"
        )
    return IntegerSet.from_members(members, universe_max=universe)
