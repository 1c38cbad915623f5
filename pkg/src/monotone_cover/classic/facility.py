"""Non-metric facility location (and set cover) in linear time.

Each customer i is one constraint "some x_ij reaches 1"; the cost is
Σ_j f_j max_i x_ij + Σ_ij d_ij x_ij. Processing customers in input order,
the driver computes the minimal step for customer i from the running
per-facility maxima and raises every x_ij, so each customer costs O(|N(i)|).
"""

import logging
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np

from monotone_cover.config import eps as default_eps
from monotone_cover.core.constraints import FloorSumConstraint
from monotone_cover.core.costs import FacilityLocationCost
from monotone_cover.core.domains import DomainSpec
from monotone_cover.core.instance import Instance
from monotone_cover.core.vectors import Vector
from monotone_cover.utils.errors import InvalidConstraintError, InvalidCostModelError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FacilityInstance:
    """Facilities with opening costs and customers with eligible sets.

    Attributes:
        opening: f_j per facility
        eligible: N(i) per customer, as facility indices
        assignment: d_ij per customer, aligned with ``eligible[i]``

    Example:
        >>> inst = FacilityInstance.build([10, 1], [{0: 1, 1: 5}])
        >>> inst.delta
        2
    """

    opening: tuple[float, ...]
    eligible: tuple[tuple[int, ...], ...]
    assignment: tuple[tuple[float, ...], ...]

    def __post_init__(self) -> None:
        if len(self.eligible) != len(self.assignment):
            raise InvalidCostModelError("one assignment-cost row per customer")
        if any(f < 0 or not math.isfinite(f) for f in self.opening):
            raise InvalidCostModelError("opening costs must be finite and non-negative")
        for i, (facs, costs) in enumerate(zip(self.eligible, self.assignment, strict=True)):
            if not facs:
                raise InvalidConstraintError(f"customer {i} has no eligible facility")
            if len(facs) != len(costs):
                raise InvalidCostModelError(f"customer {i}: one cost per eligible facility")
            if len(set(facs)) != len(facs):
                raise InvalidConstraintError(f"customer {i} lists a facility twice")
            for j, d in zip(facs, costs, strict=True):
                if not 0 <= j < len(self.opening):
                    raise InvalidConstraintError(f"customer {i}: unknown facility {j}")
                if d < 0 or not math.isfinite(d):
                    raise InvalidCostModelError(
                        f"customer {i}: assignment cost to {j} must be finite and >= 0"
                    )

    @classmethod
    def build(
        cls, opening: Sequence[float], customers: Sequence[Mapping[int, float]]
    ) -> "FacilityInstance":
        """Build from per-customer ``{facility: d_ij}`` mappings."""
        return cls(
            opening=tuple(float(f) for f in opening),
            eligible=tuple(tuple(row) for row in customers),
            assignment=tuple(tuple(float(d) for d in row.values()) for row in customers),
        )

    @property
    def facilities(self) -> int:
        return len(self.opening)

    @property
    def customers(self) -> int:
        return len(self.eligible)

    @property
    def delta(self) -> int:
        """max_i |N(i)|."""
        return max((len(facs) for facs in self.eligible), default=0)

    @property
    def size(self) -> int:
        """Σ_i |N(i)|."""
        return sum(len(facs) for facs in self.eligible)

    def pairs(self) -> list[tuple[int, int]]:
        """(customer, facility) for every variable, in variable order."""
        return [(i, j) for i, facs in enumerate(self.eligible) for j in facs]

    def to_cost(self) -> FacilityLocationCost:
        return FacilityLocationCost(
            opening=self.opening,
            pairs=tuple(self.pairs()),
            assignment=tuple(d for row in self.assignment for d in row),
        )

    def to_instance(self) -> Instance:
        """The same problem as a generic monotone covering instance."""
        constraints = []
        k = 0
        for i, facs in enumerate(self.eligible):
            constraints.append(FloorSumConstraint.at_least_one(f"customer-{i}", range(k, k + len(facs))))
            k += len(facs)
        cost = self.to_cost()
        return Instance.build(DomainSpec.reals(), cost, constraints, name="facility-location")

    def assignment_cost(self, choice: Sequence[int]) -> float:
        """Σ f over opened facilities plus Σ d over the chosen pairs."""
        opened = set(choice)
        total = sum(self.opening[j] for j in opened)
        for i, j in enumerate(choice):
            total += self.assignment[i][self.eligible[i].index(j)]
        return total


@dataclass
class FacilityResult:
    """Output of :func:`solve_facility_location`.

    Attributes:
        x: Fractional x_ij in variable order (see ``FacilityInstance.pairs``)
        mu: μ(x), one 1 per customer at the first facility its raise brought
            to 1; ties beyond it stay 0
        choice: Facility each customer is assigned to
        betas: Step size used for each customer
        cost: c(μ(x))
        assignment_cost: Cost of ``choice``; equal to ``cost``
        touches: Inner-loop operations, at most 2 Σ_i |N(i)|
    """

    x: Vector
    mu: Vector
    choice: list[int]
    betas: list[float]
    cost: float
    assignment_cost: float
    touches: int = 0
    opened: list[int] = field(default_factory=list)


def solve_facility_location(inst: FacilityInstance, eps: float | None = None) -> FacilityResult:
    """Greedy Δ-approximation for non-metric facility location.

    Args:
        inst: Facility instance
        eps: Tolerance override

    Returns:
        FacilityResult; ``cost <= inst.delta * OPT``

    Example:
        >>> res = solve_facility_location(FacilityInstance.build([10, 1], [{0: 1, 1: 5}]))
        >>> res.betas, res.choice
        ([6.0], [1])
    """
    tol = default_eps() if eps is None else eps
    x = np.zeros(inst.size, dtype=np.float64)
    peak = [0.0] * inst.facilities
    mu = np.zeros(inst.size, dtype=np.float64)
    choice: list[int] = []
    betas: list[float] = []
    touches = 0
    k = 0
    for i, (facs, costs) in enumerate(zip(inst.eligible, inst.assignment, strict=True)):
        beta = math.inf
        for j, d in zip(facs, costs, strict=True):
            touches += 1
            beta = min(beta, d + inst.opening[j] * (1.0 - peak[j]))
        beta = max(beta, 0.0)
        picked = None
        for offset, (j, d) in enumerate(zip(facs, costs, strict=True)):
            touches += 1
            f = inst.opening[j]
            if d + f == 0:
                value = 1.0
            elif d == 0:
                value = (beta + f * peak[j]) / f
            else:
                value = min(beta / d, (beta + f * peak[j]) / (d + f))
            value = min(value, 1.0)
            if value >= 1.0 - tol:
                value = 1.0
                if picked is None:
                    picked = j
                    mu[k + offset] = 1.0
            x[k + offset] = value
            peak[j] = max(peak[j], value)
        assert picked is not None, f"customer {i} left unassigned"
        choice.append(picked)
        betas.append(beta)
        logger.debug("customer %d: beta=%.6g -> facility %d", i, beta, picked)
        k += len(facs)

    cost = inst.to_cost().evaluate(mu)
    result = FacilityResult(
        x=x,
        mu=mu,
        choice=choice,
        betas=betas,
        cost=cost,
        assignment_cost=inst.assignment_cost(choice),
        touches=touches,
        opened=sorted(set(choice)),
    )
    logger.info(
        "facility location: %d customers, cost %.6g, %d touches",
        inst.customers,
        cost,
        touches,
    )
    return result
