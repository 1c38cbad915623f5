"""Problem representation: domains, costs, constraints, instances."""

from monotone_cover.core.audit import (
    AuditReport,
    audit_constraint_monotonicity,
    audit_cost_model,
    audit_cost_monotonicity,
    audit_submodularity,
)
from monotone_cover.core.constraints import (
    Constraint,
    ConstraintKind,
    FloorSumConstraint,
    GenericConstraint,
    Term,
    cover_row,
)
from monotone_cover.core.costs import (
    CostKind,
    CostModel,
    FacilityLocationCost,
    GenericSubmodularCost,
    LinearCost,
    PiecewiseLinearCurve,
    SeparableCost,
    evaluate_cost,
    extend_cost_to_reals,
)
from monotone_cover.core.domains import DomainKind, DomainSpec, MuView, mu_round
from monotone_cover.core.instance import Instance
from monotone_cover.core.vectors import Point, Vector, as_solution, join, meet

__all__ = [
    "AuditReport",
    "Constraint",
    "ConstraintKind",
    "CostKind",
    "CostModel",
    "DomainKind",
    "DomainSpec",
    "FacilityLocationCost",
    "FloorSumConstraint",
    "GenericConstraint",
    "GenericSubmodularCost",
    "Instance",
    "LinearCost",
    "MuView",
    "PiecewiseLinearCurve",
    "Point",
    "SeparableCost",
    "Term",
    "Vector",
    "as_solution",
    "audit_constraint_monotonicity",
    "audit_cost_model",
    "audit_cost_monotonicity",
    "audit_submodularity",
    "cover_row",
    "evaluate_cost",
    "extend_cost_to_reals",
    "join",
    "meet",
    "mu_round",
]
