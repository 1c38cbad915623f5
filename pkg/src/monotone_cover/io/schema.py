"""Pydantic models for instance files.

Every file is a JSON object whose ``type`` selects one of the documents
below (``instance`` when omitted). Unknown fields are rejected everywhere.
"""

import math
from typing import Annotated, Any, Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

NonNegative = Annotated[float, Field(ge=0)]
Positive = Annotated[float, Field(gt=0)]
Probability = Annotated[float, Field(ge=0, le=1)]
Bound = NonNegative | Literal["inf"]
NodeId = int | str


def bound_value(v: float | str) -> float:
    """``"inf"`` to ``math.inf``; numbers pass through."""
    return math.inf if v == "inf" else float(v)


def bound_json(v: float) -> float | str:
    """Inverse of :func:`bound_value`."""
    return "inf" if math.isinf(v) else v


class StrictModel(BaseModel):
    """Base for every document part: no unknown fields, immutable."""

    model_config = ConfigDict(extra="forbid", frozen=True)


# Variables


class DomainModel(StrictModel):
    kind: Literal["reals", "integers", "finite", "interval", "binary"] = "reals"
    values: list[NonNegative] | None = None
    low: NonNegative = 0.0
    high: Bound = "inf"
    step: Positive | None = None

    @model_validator(mode="after")
    def _values_only_for_finite(self) -> "DomainModel":
        if self.kind == "finite" and not self.values:
            raise ValueError("finite domains need a non-empty 'values' list")
        if self.kind != "finite" and self.values is not None:
            raise ValueError("'values' is only allowed on finite domains")
        if self.kind == "interval" and bound_value(self.high) < self.low:
            raise ValueError("interval needs low <= high")
        return self


class VariableModel(StrictModel):
    name: str | None = None
    domain: DomainModel = DomainModel()


# Costs


class LinearCostModel(StrictModel):
    kind: Literal["linear"] = "linear"
    coefficients: list[NonNegative]


class CurveModel(StrictModel):
    knots: Annotated[list[tuple[float, NonNegative]], Field(min_length=1)]
    tail_slope: NonNegative = 0.0


class SeparableCostModel(StrictModel):
    kind: Literal["separable"] = "separable"
    curves: list[CurveModel]


class FacilityCostModel(StrictModel):
    kind: Literal["facility"] = "facility"
    opening: list[NonNegative]
    pairs: list[tuple[Annotated[int, Field(ge=0)], Annotated[int, Field(ge=0)]]]
    assignment: list[NonNegative]


CostSpec = Annotated[
    LinearCostModel | SeparableCostModel | FacilityCostModel, Field(discriminator="kind")
]


# Constraints


class TermModel(StrictModel):
    var: Annotated[int, Field(ge=0)]
    coef: Positive
    integral: bool = True
    scale: Positive = 1.0
    cap: Bound = "inf"


class FloorSumModel(StrictModel):
    kind: Literal["floor-sum"] = "floor-sum"
    id: str
    terms: Annotated[list[TermModel], Field(min_length=1)]
    rhs: float


class CmipRowModel(StrictModel):
    """{"A": {var: coeff}, "b": real, "I": [var], "u": {var: real | "inf"}}."""

    kind: Literal["cmip"] = "cmip"
    id: str
    A: Annotated[dict[Annotated[int, Field(ge=0)], Positive], Field(min_length=1)]
    b: float
    I: list[int] = Field(default_factory=list)  # noqa: E741
    u: dict[int, Bound] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _support(self) -> "CmipRowModel":
        if not set(self.I) <= set(self.A):
            raise ValueError("'I' must be a subset of the keys of 'A'")
        if not set(self.u) <= set(self.A):
            raise ValueError("'u' may only bound variables of 'A'")
        return self


ConstraintSpec = Annotated[FloorSumModel | CmipRowModel, Field(discriminator="kind")]


# Documents


class InstanceDocument(StrictModel):
    type: Literal["instance"] = "instance"
    name: str = ""
    variables: list[VariableModel]
    cost: CostSpec
    constraints: list[ConstraintSpec] = Field(default_factory=list)
    meta: dict[str, Any] = Field(default_factory=dict)


class CmipDocument(StrictModel):
    type: Literal["cmip"] = "cmip"
    name: str = "cmip"
    costs: list[NonNegative]
    rows: list[CmipRowModel] = Field(default_factory=list)
    meta: dict[str, Any] = Field(default_factory=dict)


class TwoStageDocument(StrictModel):
    """Base CMIP plus activation probabilities and second-stage weights."""

    type: Literal["two-stage"] = "two-stage"
    name: str = "two-stage"
    costs: list[NonNegative]
    rows: list[CmipRowModel]
    p: Probability | dict[str, Probability] = 1.0
    W: dict[str, dict[int, NonNegative]] = Field(default_factory=dict)
    meta: dict[str, Any] = Field(default_factory=dict)


class NodeModel(StrictModel):
    id: NodeId
    weight: NonNegative = 1.0


class VertexCoverDocument(StrictModel):
    type: Literal["vertex-cover"] = "vertex-cover"
    name: str = "vertex-cover"
    nodes: list[NodeModel] = Field(default_factory=list)
    edges: list[tuple[NodeId, NodeId]]
    binary: bool = False
    meta: dict[str, Any] = Field(default_factory=dict)


class SetModel(StrictModel):
    name: NodeId
    weight: NonNegative = 1.0
    members: list[NodeId]


class SetCoverDocument(StrictModel):
    type: Literal["set-cover"] = "set-cover"
    name: str = "set-cover"
    sets: list[SetModel]
    elements: list[NodeId] | None = None
    meta: dict[str, Any] = Field(default_factory=dict)


class FacilityDocument(StrictModel):
    """``customers[i]`` maps each eligible facility to its assignment cost."""

    type: Literal["facility"] = "facility"
    name: str = "facility-location"
    opening: list[NonNegative]
    customers: list[Annotated[dict[Annotated[int, Field(ge=0)], NonNegative], Field(min_length=1)]]
    meta: dict[str, Any] = Field(default_factory=dict)


class CapacityThresholdModel(StrictModel):
    template: Literal["capacity-threshold"] = "capacity-threshold"
    base: Annotated[int, Field(ge=0)] = 1
    prices: Annotated[list[Positive], Field(min_length=1)]
    max_capacity: Annotated[int, Field(ge=1)]
    costs: dict[str, NonNegative] = Field(default_factory=dict)
    sizes: dict[str, Annotated[int, Field(ge=1)]] = Field(default_factory=dict)
    discounts: list[NonNegative] = Field(default_factory=list)


class ConflictPairsModel(StrictModel):
    template: Literal["conflict-pairs"] = "conflict-pairs"
    capacity: Annotated[int, Field(ge=1)]
    components: Annotated[int, Field(ge=1)] = 1
    conflicts: list[tuple[str, str, Annotated[int, Field(ge=0)], NonNegative]] = Field(
        default_factory=list
    )
    costs: dict[str, NonNegative] = Field(default_factory=dict)


CacheModelSpec = Annotated[
    CapacityThresholdModel | ConflictPairsModel, Field(discriminator="template")
]


class UpgradableDocument(StrictModel):
    """An upgradable caching scenario: cache model template plus requests."""

    type: Literal["upgradable"] = "upgradable"
    name: str = "upgradable"
    model: CacheModelSpec
    requests: list[str] = Field(default_factory=list)
    meta: dict[str, Any] = Field(default_factory=dict)


Document = (
    InstanceDocument
    | CmipDocument
    | TwoStageDocument
    | VertexCoverDocument
    | SetCoverDocument
    | FacilityDocument
    | UpgradableDocument
)

DOCUMENT_TYPES: dict[str, type[StrictModel]] = {
    "instance": InstanceDocument,
    "cmip": CmipDocument,
    "two-stage": TwoStageDocument,
    "vertex-cover": VertexCoverDocument,
    "set-cover": SetCoverDocument,
    "facility": FacilityDocument,
    "upgradable": UpgradableDocument,
}
