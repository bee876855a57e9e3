from .chart import (
    ChartError,
    PLChart,
    face_has_zero,
    fixed_chart,
    fixed_chart_map,
    prune_zero_free,
    interval_chart,
    perm_sign,
    point_chart,
    stabilize_chart,
    subdivide,
    validate_chart,
)
from .degree import (
    BoundaryZeroError,
    DegenerateError,
    FamilyMember,
    FamilyResult,
    boundary_values,
    compatible_perturbation,
    count_zeros,
    family_degrees,
    perturb,
    pt_degree,
    sum_model_degree,
)

__all__ = [
    "BoundaryZeroError", "ChartError", "DegenerateError", "FamilyMember", "FamilyResult", "PLChart",
    "boundary_values", "compatible_perturbation", "count_zeros", "face_has_zero", "family_degrees",
    "fixed_chart", "fixed_chart_map", "prune_zero_free", "interval_chart", "perm_sign", "perturb", "point_chart", "pt_degree",
    "stabilize_chart", "subdivide", "sum_model_degree", "validate_chart",
]
