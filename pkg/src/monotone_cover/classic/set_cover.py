"""Weighted set cover as facility location with zero assignment costs."""

from collections.abc import Hashable, Mapping
from dataclasses import dataclass

from monotone_cover.classic.facility import FacilityInstance, solve_facility_location
from monotone_cover.core.constraints import FloorSumConstraint
from monotone_cover.core.costs import LinearCost
from monotone_cover.core.domains import DomainSpec
from monotone_cover.core.instance import Instance
from monotone_cover.utils.errors import InvalidConstraintError, InvalidCostModelError


@dataclass(frozen=True)
class SetCoverInstance:
    """Elements, weighted sets and their incidence.

    Example:
        >>> inst = SetCoverInstance.build({"A": {1, 2}, "B": {2, 3}}, {"A": 1, "B": 2})
        >>> inst.delta
        2
    """

    elements: tuple[Hashable, ...]
    names: tuple[Hashable, ...]
    members: tuple[frozenset[Hashable], ...]
    weights: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.names) != len(self.members) or len(self.names) != len(self.weights):
            raise InvalidConstraintError("one member set and one weight per set name")
        if any(w < 0 for w in self.weights):
            raise InvalidCostModelError("set weights must be non-negative")
        uncovered = [e for e in self.elements if not any(e in m for m in self.members)]
        if uncovered:
            raise InvalidConstraintError(f"elements not covered by any set: {uncovered}")

    @classmethod
    def build(
        cls,
        sets: Mapping[Hashable, set[Hashable] | frozenset[Hashable]],
        weights: Mapping[Hashable, float] | None = None,
        elements: set[Hashable] | None = None,
    ) -> "SetCoverInstance":
        """Build from ``{name: members}``; weights default to 1."""
        names = tuple(sets)
        universe = set().union(*sets.values()) if elements is None else set(elements)
        try:
            ordered = tuple(sorted(universe))  # type: ignore[type-var]
        except TypeError:
            ordered = tuple(universe)
        return cls(
            elements=ordered,
            names=names,
            members=tuple(frozenset(sets[n]) for n in names),
            weights=tuple(float((weights or {}).get(n, 1.0)) for n in names),
        )

    def covering(self, element: Hashable) -> list[int]:
        """Indices of the sets containing ``element``."""
        return [k for k, m in enumerate(self.members) if element in m]

    @property
    def delta(self) -> int:
        """Maximum number of sets any element belongs to."""
        return max((len(self.covering(e)) for e in self.elements), default=0)

    def to_facility(self) -> FacilityInstance:
        return FacilityInstance(
            opening=self.weights,
            eligible=tuple(tuple(self.covering(e)) for e in self.elements),
            assignment=tuple(tuple(0.0 for _ in self.covering(e)) for e in self.elements),
        )

    def to_instance(self) -> Instance:
        """One binary-like variable per set, one constraint per element."""
        constraints = [
            FloorSumConstraint.at_least_one(f"element-{e}", self.covering(e)) for e in self.elements
        ]
        return Instance.build(
            DomainSpec.reals(), LinearCost.of(self.weights), constraints, name="set-cover"
        )


@dataclass
class SetCoverResult:
    """Output of :func:`solve_set_cover`.

    Attributes:
        chosen: Names of the sets in the cover, in set order
        cost: Total weight of ``chosen``
        touches: Inner-loop operations of the facility pass
    """

    chosen: list[Hashable]
    cost: float
    touches: int


def solve_set_cover(inst: SetCoverInstance) -> SetCoverResult:
    """Δ-approximate weighted set cover, Δ = maximum element frequency."""
    if not inst.elements:
        return SetCoverResult(chosen=[], cost=0.0, touches=0)
    res = solve_facility_location(inst.to_facility())
    return SetCoverResult(
        chosen=[inst.names[k] for k in res.opened],
        cost=res.assignment_cost,
        touches=res.touches,
    )
