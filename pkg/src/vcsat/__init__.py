"""Saturated set families of bounded VC dimension: constructions and exhaustive checks."""

__version__ = "0.1.0"

from .errors import (
    ConsistencyError,
    IndeterminateError,
    InvalidInputError,
    PreconditionError,
    ResourceLimitError,
    UnsupportedError,
    VcsatError,
)
from .family import (
    MissingTraceIndex,
    SetFamily,
    SubsetMask,
    almost_shatters,
    is_intersecting,
    missing_trace_index,
    sauer_bound,
    shattered_sets,
    shatters,
    trace,
    vc_dimension,
)
from .modular import (
    ConditionReport,
    ResidueSet,
    build_saturated,
    builtin_family,
    check_even_conditions,
    check_odd_conditions,
    construct,
    cyclic_orbit_family,
    even_families,
    explicit_X_even,
    explicit_X_odd,
    find_valid_X,
    formula_X_even,
    modular_family,
)
from .probabilistic import (
    LllEvaluation,
    lll_evaluate,
    monte_carlo_search,
    sample_pair_family,
    verify_almost_shattering,
)
from .saturation import (
    DuplicateClasses,
    SaturationReport,
    duplicate_classes,
    extend_by_duplication,
    greedy_saturate,
    is_duplication_safe,
    is_saturated,
    min_saturated_size,
    reduced_family,
)
from .sumset import check_sumset_bound, restricted_sumset
