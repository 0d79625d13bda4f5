"""Progression-free sets: block construction, exact search, bound numerics."""

from .analysis import (
    IterLogSpec,
    MonotoneFn,
    OrderingReport,
    ProbeReport,
    element_size_bounds,
    inverse_ordering_check,
    invert_monotone,
    iterlog_product,
    probe_theorem11,
    probe_theorem13,
    reciprocal_partial_sum,
    reciprocal_sum_bounds_for_set,
    tower_threshold,
)
from .bounds import (
    BOUND_FAMILIES,
    BoundSpec,
    LogValue,
    bloom_r3_upper_bound,
    ck_constant,
    crossover_n,
    gowers_upper_bound,
    green_tao_r4_upper_bound,
    obryant_lower_bound,
    r3_lower_bound,
    roth_upper_bound,
    theorem_lower_bound,
)
from .core import (
    DEFAULT_UNIVERSE_LIMIT,
    APWitness,
    ConstructionTrace,
    IntegerSet,
    block_expand,
    is_prime,
    iterate_construction,
    read_set_file,
    truncate,
    verify_ap_free,
    write_set_file,
)
from .errors import (
    ApfreeError,
    InvalidParameterError,
    NumericDomainError,
    ResourceLimitError,
    SetFileFormatError,
)
from .exact import (
    CorollaryReport,
    ExactRecord,
    ResultCache,
    SolveBudget,
    Unsolved,
    check_corollary_recursive,
    naive_max_apfree,
    solve_exact,
    solve_range,
)

__version__ = "0.1.0"
