"""Parameterizations of G-posets by inner-product spaces."""

from .eparam import (
    EParam,
    ParamError,
    SemiFreeParam,
    build_free,
    canonical_param,
    direct_sum,
    fixed_param,
    fixed_semifree,
    numerical_invariant,
    restrict_param,
    restrict_semifree,
    stabilize,
    zero_param,
)
from .fparam import FParam, induced_F
from .free import (
    FreeDecomposition,
    NotFreeError,
    ShiftSpace,
    comparison_map,
    exists_Eparam,
    free_decomposition,
    is_free,
    iso_from_invariants,
    shift_space,
    star_classes,
)

__all__ = [
    "EParam",
    "FParam",
    "FreeDecomposition",
    "NotFreeError",
    "ParamError",
    "SemiFreeParam",
    "ShiftSpace",
    "build_free",
    "canonical_param",
    "comparison_map",
    "direct_sum",
    "exists_Eparam",
    "fixed_param",
    "fixed_semifree",
    "free_decomposition",
    "induced_F",
    "is_free",
    "iso_from_invariants",
    "numerical_invariant",
    "restrict_param",
    "restrict_semifree",
    "shift_space",
    "stabilize",
    "star_classes",
    "zero_param",
]
