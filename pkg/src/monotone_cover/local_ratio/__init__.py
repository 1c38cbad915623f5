"""Local-ratio reading of greedy traces: decomposition and weight views."""

from monotone_cover.local_ratio.decomposition import (
    Decomposition,
    GuaranteeReport,
    PropertyReport,
    build_decomposition,
    check_final_residual,
    check_property_b,
    check_telescoping,
    join_distance,
    probe_vectors,
    replicate_guarantee,
)
from monotone_cover.local_ratio.weights import (
    MultiLevelView,
    WeightView,
    multilevel_weight_view,
    weight_reduction_view,
)

__all__ = [
    "Decomposition",
    "GuaranteeReport",
    "MultiLevelView",
    "PropertyReport",
    "WeightView",
    "build_decomposition",
    "check_final_residual",
    "check_property_b",
    "check_telescoping",
    "join_distance",
    "multilevel_weight_view",
    "probe_vectors",
    "replicate_guarantee",
    "weight_reduction_view",
]
