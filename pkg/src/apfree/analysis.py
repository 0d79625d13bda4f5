"""Monotone inversion, element-size and reciprocal-sum bounds, iterated-log probes.

The probes never conclude convergence or divergence of a series; they report
where a comparison ratio stabilizes above or below 1 across doubling sample
points, and how partial sums track the closed-form comparison integral. The
underlying density statements remain conditional.
"""

from __future__ import annotations

import functools
import json
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import InvalidParameterError, NumericDomainError

# Inputs this close above an iterated-log threshold sit in numerical noise.
THRESHOLD_NOISE_FACTOR = 1.01

_SUM_CHUNK = 1 << 20


@dataclass(frozen=True)
class MonotoneFn:
    """A strictly increasing, unbounded function on [domain_min, inf)."""

    fn: Callable[[float], float]
    domain_min: float
    name: str = ""

    def __call__(self, x: float) -> float:
        return self.fn(x)


@dataclass(frozen=True)
class IterLogSpec:
    """Depth d and outermost exponent s of the chain n*(ln n)*...*(ln^(d) n)**s."""

    d: int
    s: float = 1.0

    def __post_init__(self) -> None:
        if not isinstance(self.d, int) or self.d < 1:
            raise InvalidParameterError(f"depth d must be a positive integer, got {self.d!r}")
        if not self.s >= 1.0:
            raise InvalidParameterError(f"exponent s must be >= 1, got {self.s!r}")


@functools.lru_cache(maxsize=None)
def tower_threshold(d: int) -> float:
    """Largest n at which the d-fold iterated natural log is still <= 0.

    This is the exponential tower of height d-1: 1, e, e**e, ... Inputs must
    exceed it (with a 1% noise margin) before the depth-d chain is defined.
    """
    if d < 1:
        raise InvalidParameterError(f"depth d must be >= 1, got {d}")
    t = 1.0
    for _ in range(d - 1):
        t = math.exp(t)
    return t


def _require_above_threshold(n: float, d: int) -> None:
    limit = tower_threshold(d)
    if not n > limit * THRESHOLD_NOISE_FACTOR:
        raise NumericDomainError(
            f"n={n} is at or below the depth-{d} iterated-log threshold "
            f"{limit:.6g} (a 1% margin above it is also rejected)"
        )


def _iterated_logs(n: float, d: int) -> list[float]:
    _require_above_threshold(n, d)
    xs = []
    x = float(n)
    for _ in range(d):
        x = math.log(x)
        xs.append(x)
    return xs


def _log_chain(x: float, d: int, s: float) -> float:
    """(ln x)(ln ln x)...(ln^(d) x)**s, without the leading x factor."""
    xs = _iterated_logs(x, d)
    out = 1.0
    for v in xs[:-1]:
        out *= v
    return out * xs[-1] ** s


def iterlog_product(n: float, spec: IterLogSpec) -> float:
    """n * (ln n) * (ln ln n) * ... * (ln^(d) n)**s.

    Raises NumericDomainError (reporting the threshold) for n at or below the
    tower threshold rather than returning NaN.
    """
    return float(n) * _log_chain(float(n), spec.d, spec.s)


def reciprocal_partial_sum(spec: IterLogSpec, n_from: int, n_to: int) -> float:
    """Sum of 1/iterlog_product(n, spec) for n in [n_from, n_to], exactly rounded.

    Terms are evaluated vectorized and accumulated with compensated (exact)
    summation, so the only error left is per-term log evaluation.
    """
    if not isinstance(n_from, int) or not isinstance(n_to, int):
        raise InvalidParameterError("summation limits must be integers")
    if n_from > n_to:
        raise InvalidParameterError(f"empty summation range: {n_from} > {n_to}")
    _require_above_threshold(float(n_from), spec.d)
    partials = []
    for start in range(n_from, n_to + 1, _SUM_CHUNK):
        end = min(start + _SUM_CHUNK - 1, n_to)
        arr = np.arange(start, end + 1, dtype=np.float64)
        prod = arr.copy()
        x = np.log(arr)
        for _ in range(spec.d - 1):
            prod *= x
            x = np.log(x)
        prod *= x**spec.s
        partials.append(math.fsum(1.0 / prod))
    return math.fsum(partials)


def invert_monotone(f: MonotoneFn, y: float, tol: float) -> float:
    """Solve f(x) = y for an increasing unbounded f.

    Brackets by doubling the offset from domain_min, then bisects until the
    bracket is narrower than tol. Targets below f(domain_min) are a domain
    error.
    """
    if tol <= 0:
        raise InvalidParameterError(f"tolerance must be positive, got {tol}")
    lo = f.domain_min
    f_lo = f(lo)
    if y < f_lo:
        raise NumericDomainError(
            f"target {y} is below the function range (f(domain_min) = {f_lo})"
        )
    if y == f_lo:
        return lo
    step = max(tol, 1.0)
    hi = lo + step
    for _ in range(2000):
        if f(hi) >= y:
            break
        lo = hi
        step *= 2.0
        hi = f.domain_min + step
    else:
        raise NumericDomainError(
            f"no upper bracket found for target {y}; the function may be bounded"
        )
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if f(mid) < y:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class OrderingSample:
    y: float
    inv_f: float
    inv_g: float
    inv_h: float
    ok: bool


@dataclass(frozen=True)
class OrderingReport:
    ok: bool
    precondition_ok: bool
    margin: float
    samples: tuple[OrderingSample, ...]
    detail: str = ""


def inverse_ordering_check(
    f: MonotoneFn,
    g: MonotoneFn,
    h: MonotoneFn,
    sample_points: Sequence[float],
    tol: float = 1e-9,
    margin: Optional[float] = None,
) -> OrderingReport:
    """Check that f < g < h pointwise forces inv_f > inv_g > inv_h at each sample.

    The pointwise precondition is validated on the grid of computed inverses;
    a violation yields a precondition-failure report rather than an exception.
    Inverse comparisons use the given margin (default 3*tol) to stay honest
    about bisection resolution.
    """
    if margin is None:
        margin = 3.0 * tol
    inverses = []
    for y in sample_points:
        xf = invert_monotone(f, y, tol)
        xg = invert_monotone(g, y, tol)
        xh = invert_monotone(h, y, tol)
        inverses.append((y, xf, xg, xh))

    grid = sorted({x for (_, xf, xg, xh) in inverses for x in (xf, xg, xh)})
    for x in grid:
        if x < max(f.domain_min, g.domain_min, h.domain_min):
            continue
        if not (f(x) < g(x) < h(x)):
            return OrderingReport(
                ok=False,
                precondition_ok=False,
                margin=margin,
                samples=(),
                detail=f"pointwise ordering f < g < h fails at x = {x}",
            )

    samples = []
    all_ok = True
    for y, xf, xg, xh in inverses:
        ok = (xf - xg > margin) and (xg - xh > margin)
        all_ok &= ok
        samples.append(OrderingSample(y=y, inv_f=xf, inv_g=xg, inv_h=xh, ok=ok))
    return OrderingReport(
        ok=all_ok, precondition_ok=True, margin=margin, samples=tuple(samples)
    )


def element_size_bounds(
    f_lower: MonotoneFn, h_upper: MonotoneFn, a: int, tol: float = 1e-9
) -> tuple[float, float]:
    """Bounds on the a-th element of a set whose counting function sits
    between f_lower and h_upper: the interval (inv_h(a), inv_f(a)).

    Inversion swaps the roles: the lower density bound gives the upper
    element bound and vice versa.
    """
    if not isinstance(a, int) or a < 1:
        raise InvalidParameterError(f"index a must be a positive integer, got {a!r}")
    low = invert_monotone(h_upper, a, tol)
    high = invert_monotone(f_lower, a, tol)
    if low > high + 3.0 * tol:
        raise NumericDomainError(
            f"element bounds inverted (low={low} > high={high}); "
            "f_lower must lie below h_upper on the relevant range"
        )
    return (low, high)


def reciprocal_sum_bounds_for_set(
    f_lower: MonotoneFn, h_upper: MonotoneFn, N: int, tol: float = 1e-9
) -> tuple[float, float]:
    """Truncated reciprocal-sum bounds: (sum 1/inv_f(n), sum 1/inv_h(n)) over
    n = n_min..N, where n_min skips indices below both inversion domains."""
    if not isinstance(N, int) or N < 1:
        raise InvalidParameterError(f"N must be a positive integer, got {N!r}")
    y_min = max(f_lower(f_lower.domain_min), h_upper(h_upper.domain_min))
    n_min = max(1, math.ceil(y_min - 1e-12))
    if N < n_min:
        raise NumericDomainError(
            f"N={N} is below the first invertible index n_min={n_min}"
        )
    lows = []
    highs = []
    for idx in range(n_min, N + 1):
        lows.append(1.0 / invert_monotone(f_lower, idx, tol))
        highs.append(1.0 / invert_monotone(h_upper, idx, tol))
    low_sum = math.fsum(lows)
    high_sum = math.fsum(highs)
    return (low_sum, high_sum)


@dataclass(frozen=True)
class ProbeReport:
    """Doubling-grid probe of a comparison ratio against 1."""

    theorem: str  # "11" or "13"
    d: int
    s: float
    threshold_found: float
    samples: tuple[tuple[float, float], ...]

    def to_json_dict(self) -> dict:
        return {
            "theorem": self.theorem,
            "d": self.d,
            "s": self.s,
            "threshold_found": self.threshold_found,
            "samples": [[n, ratio] for (n, ratio) in self.samples],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())


def _scan_doubling(
    label: str,
    d: int,
    s: float,
    ratio_fn: Callable[[float], float],
    predicate: Callable[[float], bool],
    n_start: float,
    confirm_samples: int,
    max_doublings: int,
) -> ProbeReport:
    samples: list[tuple[float, float]] = []
    run_start: Optional[int] = None
    n = n_start
    in_domain = False
    for _ in range(max_doublings):
        try:
            ratio = ratio_fn(n)
        except NumericDomainError:
            # Near the tower threshold the pushed-through argument can dip
            # below its own chain's domain; skip forward until evaluable.
            if in_domain:
                raise
            n *= 2.0
            continue
        in_domain = True
        samples.append((n, ratio))
        if predicate(ratio):
            if run_start is None:
                run_start = len(samples) - 1
            if len(samples) - run_start > confirm_samples:
                return ProbeReport(
                    theorem=label,
                    d=d,
                    s=s,
                    threshold_found=samples[run_start][0],
                    samples=tuple(samples),
                )
        else:
            run_start = None
        n *= 2.0
    raise NumericDomainError(
        f"no threshold stable across {confirm_samples} doublings found "
        f"within {max_doublings} samples"
    )


def probe_theorem11(
    d: int = 1,
    c: float = 1.0,
    confirm_samples: int = 20,
    start: Optional[float] = None,
    max_doublings: int = 400,
) -> ProbeReport:
    """Locate where c*x/chain_d pushed through the depth-(d+1) chain exceeds n.

    With f(x) = c*x / ((ln x)...(ln^(d) x)) and g(n) the full depth-(d+1)
    product, find a threshold past which f(g(n))/n > 1 and confirm it across
    doubling samples. A stable ratio above 1 is the numeric shadow of the
    divergence-side comparison.
    """
    if d < 1:
        raise InvalidParameterError(f"depth d must be >= 1, got {d}")
    if c <= 0:
        raise InvalidParameterError(f"constant c must be positive, got {c}")
    g_spec = IterLogSpec(d + 1, 1.0)

    def ratio(n: float) -> float:
        g = iterlog_product(n, g_spec)
        return c * g / (n * _log_chain(g, d, 1.0))

    n0 = start if start is not None else tower_threshold(d + 1) * 1.05 + 1.0
    return _scan_doubling(
        "11", d, 1.0, ratio, lambda r: r > 1.0, n0, confirm_samples, max_doublings
    )


def probe_theorem13(
    d: int = 1,
    s: float = 1.5,
    c: float = 1.0,
    epsilon: Optional[float] = None,
    confirm_samples: int = 20,
    start: Optional[float] = None,
    max_doublings: int = 400,
) -> ProbeReport:
    """Locate where c*x/chain_d^s pushed through the exponent-(s-eps) chain
    drops below n.

    With h(x) = c*x / ((ln x)...(ln^(d) x)**s) and g(n) the full depth-d
    product with outer exponent s-eps (eps defaults to (s-1)/2, keeping
    s-eps > 1), find a threshold past which h(g(n))/n < 1, confirmed across
    doubling samples.
    """
    if d < 1:
        raise InvalidParameterError(f"depth d must be >= 1, got {d}")
    if not s > 1.0:
        raise InvalidParameterError(f"exponent s must exceed 1, got {s}")
    if c <= 0:
        raise InvalidParameterError(f"constant c must be positive, got {c}")
    if epsilon is None:
        epsilon = (s - 1.0) / 2.0
    if not 0.0 < epsilon < s - 1.0:
        raise InvalidParameterError(
            f"epsilon must satisfy 0 < epsilon and s - epsilon > 1, got {epsilon}"
        )
    g_spec = IterLogSpec(d, s - epsilon)

    def ratio(n: float) -> float:
        g = iterlog_product(n, g_spec)
        return c * g / (n * _log_chain(g, d, s))

    n0 = start if start is not None else tower_threshold(d) * 1.05 + 1.0
    return _scan_doubling(
        "13", d, s, ratio, lambda r: r < 1.0, n0, confirm_samples, max_doublings
    )
