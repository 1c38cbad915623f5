"""Step size for a CMIP row.

Order I by decreasing A_j and let J be the shortest prefix for which x still
violates the row with only J floored and every other term relaxed to its
continuous value. The step size is the smaller of

* β_J: the cheapest way to push some unsaturated j ∈ J to its next integer;
* β_J̄: the cost of closing the relaxed slack b′ using the best
  coefficient-to-cost ratio among unsaturated j ∉ J.

Both never exceed distance_c(x, S), and every step either saturates a
variable or lengthens J, so a row takes at most 2 |deps(S)| steps.
"""

import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from typing import Any

from monotone_cover.cmip.rows import CmipRow, RowData
from monotone_cover.config import eps as default_eps
from monotone_cover.core.constraints import Constraint
from monotone_cover.core.costs import CostModel, LinearCost
from monotone_cover.core.instance import Instance
from monotone_cover.core.vectors import Point, Vector
from monotone_cover.utils.errors import InfeasibleError, PreconditionError, UnsupportedError

INF = math.inf


@dataclass(frozen=True)
class StepsizeBreakdown:
    """Every intermediate quantity of one stepsize call.

    Attributes:
        J: Floored prefix of I (in prefix order)
        U: Saturated variables
        beta_J: Cheapest integer crossing in J − U (``inf`` if none)
        beta_Jbar: Cost of closing ``slack`` through J̄ − U (``inf`` if none)
        slack: b′, the relaxed row's remaining slack
        beta: min(beta_J, beta_Jbar)
    """

    J: tuple[int, ...]
    U: frozenset[int]
    beta_J: Any
    beta_Jbar: Any
    slack: Any
    beta: Any

    def to_dict(self) -> dict[str, object]:
        return {
            "J": list(self.J),
            "U": sorted(self.U),
            "beta_J": float(self.beta_J),
            "beta_Jbar": float(self.beta_Jbar),
            "slack": float(self.slack),
            "beta": float(self.beta),
        }


def floor_eps(v: Any, eps: Any) -> int:
    return math.floor(v + eps)


def row_lhs(row: RowData[Any], x: Sequence[Any] | Mapping[int, Any], floored: set[int] | frozenset[int], eps: Any) -> Any:
    """Left-hand side with only ``floored`` rounded down."""
    total: Any = 0
    for j, a in row.A.items():
        v = row.capped(j, x[j])
        total += a * (floor_eps(v, eps) if j in floored else v)
    return total


def breakdown(
    x: Sequence[Any] | Mapping[int, Any],
    row: RowData[Any],
    costs: Sequence[Any] | Mapping[int, Any],
    eps: Any = 0,
) -> StepsizeBreakdown:
    """Generic stepsize over floats (with ``eps``) or Fractions (``eps=0``).

    Raises:
        PreconditionError: If x satisfies the row
        InfeasibleError: If every dependency is saturated
    """
    order = row.order
    U = frozenset(j for j in row.deps if row.saturated(j, x[j], eps))
    prefix: set[int] = set()
    lhs = row_lhs(row, x, prefix, eps)
    p = 0
    while lhs >= row.b - eps:
        if p == len(order):
            raise PreconditionError(f"row {row.id} is already satisfied")
        j = order[p]
        v = row.capped(j, x[j])
        lhs -= row.A[j] * (v - floor_eps(v, eps))
        prefix.add(j)
        p += 1
    J = tuple(order[:p])
    slack = row.b - lhs

    beta_J: Any = INF
    for j in J:
        if j not in U:
            xj = x[j]
            beta_J = min(beta_J, (1 - xj + floor_eps(xj, eps)) * costs[j])
    ratio: Any = None
    for j in row.deps:
        if j in prefix or j in U:
            continue
        r = costs[j] / row.A[j]
        ratio = r if ratio is None else min(ratio, r)
    beta_Jbar: Any = INF if ratio is None else slack * ratio

    if beta_J == INF and beta_Jbar == INF:
        raise InfeasibleError(
            f"row {row.id}: every variable is at its upper bound", constraint_id=row.id
        )
    return StepsizeBreakdown(
        J=J,
        U=U,
        beta_J=beta_J,
        beta_Jbar=beta_Jbar,
        slack=slack,
        beta=min(beta_J, beta_Jbar),
    )


def cmip_stepsize(
    x: Point,
    row: CmipRow,
    cost: CostModel,
    *,
    eps: float | None = None,
) -> StepsizeBreakdown:
    """Step size for ``row`` at ``x`` under a linear cost.

    Args:
        x: Current solution
        row: Unmet CMIP row
        cost: Linear cost
        eps: Tolerance override

    Returns:
        StepsizeBreakdown with the chosen β and its ingredients

    Raises:
        UnsupportedError: For non-linear costs
        PreconditionError: If x satisfies the row
        InfeasibleError: If every dependency is saturated

    Example:
        >>> row = CmipRow.build("r", {0: 3, 1: 2}, 4, I=[0], u={0: 1})
        >>> cmip_stepsize(np.zeros(2), row, LinearCost.of([1, 1])).beta
        1.3333333333333333
    """
    if not isinstance(cost, LinearCost):
        raise UnsupportedError("the CMIP step size needs a linear cost")
    tol = default_eps() if eps is None else eps
    data = row.data()
    point = {j: float(x[j]) for j in data.deps}
    return breakdown(point, data, cost.coefficients, tol)



@dataclass
class CmipStepsizePolicy:
    """Generic-engine policy using the CMIP step size on CMIP rows."""

    name: str = "cmip"

    def __call__(self, x: Vector, constraint: Constraint, instance: Instance) -> float:
        if not isinstance(constraint, CmipRow):
            raise UnsupportedError(f"constraint {constraint.id} is not a CMIP row")
        return float(cmip_stepsize(x, constraint, instance.cost).beta)
