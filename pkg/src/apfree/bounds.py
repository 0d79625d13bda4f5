"""Log-space evaluation of the known bound families for progression-free sets.

Every logarithm in the bound displays is taken base 2. That convention makes
a = ceil(log2 k) equal 2 at k = 3, which is exactly what specializes the
general lower-bound family to the classical n / 2^sqrt(8 log n) form, so the
families stay mutually consistent.

Values are carried as base-2 exponents (LogValue) because several families,
in particular the tower-exponent upper bound, leave the range of native
floats for every interesting n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .core import is_prime
from .errors import InvalidParameterError, NumericDomainError

LOG_BASE = 2

BOUND_FAMILIES = (
    "theorem-main",
    "obryant",
    "gowers",
    "roth",
    "bloom-r3",
    "r3-lower",
    "green-tao-r4",
)

PLAIN_VALUE_WINDOW = 1000.0  # |log2| above this refuses conversion to a plain float


@dataclass(frozen=True)
class LogValue:
    """A non-negative real carried as its base-2 logarithm.

    Multiplication, division, and powers act on the exponent, so magnitudes
    like 2**(10**5) are routine. Conversion to a plain float is only allowed
    while |log2| < 1000.
    """

    log2: float

    @classmethod
    def from_value(cls, x: float) -> "LogValue":
        if x < 0:
            raise InvalidParameterError(f"LogValue requires a non-negative value, got {x}")
        if x == 0:
            return cls(-math.inf)
        return cls(math.log2(x))

    def value(self) -> float:
        if not abs(self.log2) < PLAIN_VALUE_WINDOW:
            raise OverflowError(
                f"2**{self.log2} is outside the plain-float window (|log2| < {PLAIN_VALUE_WINDOW:g})"
            )
        return 2.0**self.log2

    def value_or_flag(self) -> str:
        """Plain value as text, or 'overflow'/'underflow' when out of window."""
        if self.log2 >= PLAIN_VALUE_WINDOW:
            return "overflow"
        if self.log2 <= -PLAIN_VALUE_WINDOW:
            return "underflow"
        return repr(self.value())

    def __mul__(self, other: "LogValue") -> "LogValue":
        return LogValue(self.log2 + other.log2)

    def __truediv__(self, other: "LogValue") -> "LogValue":
        return LogValue(self.log2 - other.log2)

    def power(self, exponent: float) -> "LogValue":
        return LogValue(self.log2 * exponent)

    def __lt__(self, other: "LogValue") -> bool:
        return self.log2 < other.log2

    def __le__(self, other: "LogValue") -> bool:
        return self.log2 <= other.log2

    def __gt__(self, other: "LogValue") -> bool:
        return self.log2 > other.log2

    def __ge__(self, other: "LogValue") -> bool:
        return self.log2 >= other.log2


def _log2_of(n) -> float:
    if n <= 0:
        raise NumericDomainError(f"log2 requires n > 0, got {n}")
    return math.log2(n)


def ck_constant(k: int) -> float:
    """k * ln(k/(k-1)). Strictly decreasing in k with limit 1 from above."""
    if not isinstance(k, int) or k < 2:
        raise InvalidParameterError(f"k must be an integer >= 2, got {k!r}")
    # log1p keeps full precision for large k, where ln(k/(k-1)) ~ 1/k.
    return k * math.log1p(1.0 / (k - 1))


def theorem_exponent(k: int) -> float:
    """The exponent 1 - c_k/(k ln k) of the block-construction lower bound.

    Algebraically equal to ln(k-1)/ln(k), which makes the bound exact at
    powers of k: bound(k^r) = (k-1)^r.
    """
    if not is_prime(k):
        raise InvalidParameterError(f"k must be prime, got {k}")
    return 1.0 - ck_constant(k) / (k * math.log(k))


def theorem_lower_bound_from_log2(log2_n: float, k: int) -> LogValue:
    if log2_n < 0:
        raise NumericDomainError(f"bound needs n >= 1, got log2(n) = {log2_n}")
    return LogValue(theorem_exponent(k) * log2_n)


def theorem_lower_bound(n, k: int) -> LogValue:
    """n ** (1 - c_k/(k ln k)) for prime k; lower bound on the maximum set size."""
    return theorem_lower_bound_from_log2(_log2_of(n), k)


def _obryant_a(k: int) -> int:
    # ceil(log2 k), computed exactly via bit length.
    return (k - 1).bit_length()


def obryant_lower_bound_from_log2(log2_n: float, k: int, c: float = 1.0) -> LogValue:
    if not isinstance(k, int) or k < 3:
        raise InvalidParameterError(f"k must be an integer >= 3, got {k!r}")
    if c <= 0:
        raise InvalidParameterError(f"leading constant c must be positive, got {c}")
    if log2_n <= 1.0:
        raise NumericDomainError(
            f"log2(log2 n) must be positive, which needs n > 2; got log2(n) = {log2_n}"
        )
    a = _obryant_a(k)
    denom_exp = a * 2 ** ((a - 1) / 2) * log2_n ** (1 / a) - math.log2(log2_n) / (2 * a)
    return LogValue(math.log2(c) + log2_n - denom_exp)


def obryant_lower_bound(n, k: int, c: float = 1.0) -> LogValue:
    """c*n / 2**(a*2**((a-1)/2) * (log n)**(1/a) - (log log n)/(2a)), a = ceil(log2 k)."""
    return obryant_lower_bound_from_log2(_log2_of(n), k, c)


def gowers_upper_bound_from_log2(
    log2_n: float, k: int, tower_exponent: Optional[float] = None
) -> LogValue:
    if not isinstance(k, int) or k < 3:
        raise InvalidParameterError(f"k must be an integer >= 3, got {k!r}")
    if log2_n <= 1.0:
        raise NumericDomainError(
            f"log2(log2 n) must be positive, which needs n > 2; got log2(n) = {log2_n}"
        )
    loglog = math.log2(log2_n)
    # x < 0 (possible for 2 < n < 4) makes the bound blow up instead of vanish.
    x = math.log2(loglog)
    if x == 0.0:
        term = 0.0
    elif tower_exponent is not None:
        term = tower_exponent * x
    else:
        # exponent is 2**(2**(k+9)); keep it symbolic to avoid materializing
        # astronomically large integers before the inevitable saturation.
        log2_tower = 2 ** (k + 9)
        if log2_tower + math.log2(abs(x)) > 1023:
            term = math.inf if x > 0 else -math.inf
        else:
            term = (2.0**log2_tower) * x
    return LogValue(log2_n - term)


def gowers_upper_bound(n, k: int, tower_exponent: Optional[float] = None) -> LogValue:
    """n / (log log n) ** (2**(2**(k+9))), evaluated as printed.

    For any n with log log n > 1 the default tower exponent drives the result
    to an effectively-zero LogValue (exponent -inf); that is the documented
    behavior of the display, not an error. The exponent can be overridden to
    explore non-vacuous variants.
    """
    return gowers_upper_bound_from_log2(_log2_of(n), k, tower_exponent)


def roth_upper_bound_from_log2(log2_n: float, c: float = 1.0) -> LogValue:
    if c <= 0:
        raise InvalidParameterError(f"leading constant c must be positive, got {c}")
    if log2_n <= 1.0:
        raise NumericDomainError(
            f"log2(log2 n) must be positive, which needs n > 2; got log2(n) = {log2_n}"
        )
    return LogValue(math.log2(c) + log2_n - math.log2(math.log2(log2_n)))


def roth_upper_bound(n, c: float = 1.0) -> LogValue:
    """c*n / log log n (the classical k=3 upper bound)."""
    return roth_upper_bound_from_log2(_log2_of(n), c)


def bloom_r3_upper_bound_from_log2(log2_n: float, c: float = 1.0) -> LogValue:
    if c <= 0:
        raise InvalidParameterError(f"leading constant c must be positive, got {c}")
    if log2_n <= 1.0:
        raise NumericDomainError(
            f"log2(log2 n) must be positive, which needs n > 2; got log2(n) = {log2_n}"
        )
    loglog = math.log2(log2_n)
    return LogValue(math.log2(c) + log2_n + 4 * math.log2(loglog) - math.log2(log2_n))


def bloom_r3_upper_bound(n, c: float = 1.0) -> LogValue:
    """c*n*(log log n)**4 / log n (k=3 upper bound)."""
    return bloom_r3_upper_bound_from_log2(_log2_of(n), c)


def r3_lower_bound_from_log2(log2_n: float, c: float = 1.0) -> LogValue:
    if c <= 0:
        raise InvalidParameterError(f"leading constant c must be positive, got {c}")
    if log2_n < 0:
        raise NumericDomainError(f"bound needs n >= 1, got log2(n) = {log2_n}")
    return LogValue(math.log2(c) + log2_n - math.sqrt(8.0 * log2_n))


def r3_lower_bound(n, c: float = 1.0) -> LogValue:
    """c*n / 2**sqrt(8 log n) (k=3 lower bound)."""
    return r3_lower_bound_from_log2(_log2_of(n), c)


def green_tao_r4_upper_bound_from_log2(
    log2_n: float, c1: float = 1.0, c2: float = 1.0
) -> LogValue:
    if c1 <= 0 or c2 <= 0:
        raise InvalidParameterError(f"constants must be positive, got c1={c1}, c2={c2}")
    if log2_n <= 0:
        raise NumericDomainError(f"log2(n) must be positive, which needs n > 1")
    return LogValue(math.log2(c1) + log2_n - c2 * math.log2(log2_n))


def green_tao_r4_upper_bound(n, c1: float = 1.0, c2: float = 1.0) -> LogValue:
    """c1*n / (log n)**c2 (k=4 upper bound)."""
    return green_tao_r4_upper_bound_from_log2(_log2_of(n), c1, c2)


@dataclass(frozen=True)
class BoundSpec:
    """A bound family plus its parameters, validated for completeness.

    Unspecified literature constants default to 1 and results should be read
    as 'up to constants'.
    """

    family: str
    k: int = 3
    c: float = 1.0
    c1: float = 1.0
    c2: float = 1.0
    tower_exponent: Optional[float] = None

    def __post_init__(self) -> None:
        if self.family not in BOUND_FAMILIES:
            raise InvalidParameterError(
                f"unknown bound family {self.family!r}; expected one of {BOUND_FAMILIES}"
            )
        if self.c <= 0 or self.c1 <= 0 or self.c2 <= 0:
            raise InvalidParameterError("bound constants must be positive")
        if self.family == "theorem-main" and not is_prime(self.k):
            raise InvalidParameterError(f"theorem-main requires prime k, got {self.k}")
        if self.family in ("obryant", "gowers") and self.k < 3:
            raise InvalidParameterError(f"{self.family} requires k >= 3, got {self.k}")
        if self.family in ("roth", "bloom-r3", "r3-lower") and self.k != 3:
            raise InvalidParameterError(f"{self.family} is a k=3 family, got k={self.k}")
        if self.family == "green-tao-r4" and self.k != 4:
            raise InvalidParameterError(f"green-tao-r4 is a k=4 family, got k={self.k}")

    def evaluate_log2(self, log2_n: float) -> LogValue:
        if self.family == "theorem-main":
            return theorem_lower_bound_from_log2(log2_n, self.k)
        if self.family == "obryant":
            return obryant_lower_bound_from_log2(log2_n, self.k, self.c)
        if self.family == "gowers":
            return gowers_upper_bound_from_log2(log2_n, self.k, self.tower_exponent)
        if self.family == "roth":
            return roth_upper_bound_from_log2(log2_n, self.c)
        if self.family == "bloom-r3":
            return bloom_r3_upper_bound_from_log2(log2_n, self.c)
        if self.family == "r3-lower":
            return r3_lower_bound_from_log2(log2_n, self.c)
        return green_tao_r4_upper_bound_from_log2(log2_n, self.c1, self.c2)

    def evaluate(self, n) -> LogValue:
        return self.evaluate_log2(_log2_of(n))


def crossover_gap(log2_n: float, k: int, c_obryant: float = 1.0) -> float:
    """log2(obryant) - log2(theorem-main) at n = 2**log2_n.

    Evaluated on raw exponents so the bracket may start at log2(n) = 1 where
    the guarded evaluator would refuse.
    """
    a = _obryant_a(k)
    e_k = ck_constant(k) / (k * math.log(k))
    denom_exp = (
        a * 2 ** ((a - 1) / 2) * log2_n ** (1 / a) - math.log2(log2_n) / (2 * a)
    )
    return math.log2(c_obryant) + e_k * log2_n - denom_exp


def crossover_n(
    k: int,
    c_obryant: float = 1.0,
    *,
    bracket: tuple[float, float] = (1.0, 1e6),
    rel_tol: float = 1e-6,
) -> Optional[LogValue]:
    """Smallest n at which the general lower-bound family overtakes the
    block-construction bound, solved by bisection on L = log2 n.

    Returns the crossover as a LogValue (its .log2 is L*), or None when no
    sign change exists inside the bracket.
    """
    if not is_prime(k) or k < 3:
        raise InvalidParameterError(f"k must be prime and >= 3, got {k}")
    if c_obryant <= 0:
        raise InvalidParameterError(f"c must be positive, got {c_obryant}")
    lo, hi = bracket
    if not (0 < lo < hi):
        raise InvalidParameterError(f"bad bracket {bracket}")

    def gap(L: float) -> float:
        return crossover_gap(L, k, c_obryant)

    if gap(lo) >= 0:
        # Already crossed at the bracket start; report the edge.
        return LogValue(lo)
    if gap(hi) < 0:
        return None
    while hi - lo > rel_tol * max(1.0, lo):
        mid = 0.5 * (lo + hi)
        if gap(mid) < 0:
            lo = mid
        else:
            hi = mid
    return LogValue(0.5 * (lo + hi))
