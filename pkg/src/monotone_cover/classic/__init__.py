"""Vertex cover, set cover and facility location drivers."""

from monotone_cover.classic.facility import (
    FacilityInstance,
    FacilityResult,
    solve_facility_location,
)
from monotone_cover.classic.set_cover import SetCoverInstance, SetCoverResult, solve_set_cover
from monotone_cover.classic.vertex_cover import (
    VertexCoverResult,
    is_vertex_cover,
    solve_vertex_cover,
    vertex_cover_instance,
)

__all__ = [
    "FacilityInstance",
    "FacilityResult",
    "SetCoverInstance",
    "SetCoverResult",
    "VertexCoverResult",
    "is_vertex_cover",
    "solve_facility_location",
    "solve_set_cover",
    "solve_vertex_cover",
    "vertex_cover_instance",
]
