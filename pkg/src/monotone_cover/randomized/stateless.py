"""The stateless online step: x only ever holds domain points.

Each variable of S may move to the next point of its domain. Its own raise
cost α_j sets the odds: with β = min α_j the cheapest move happens surely
and every other one with probability β/α_j. Free moves always happen.
"""

from collections.abc import Sequence

import numpy as np

from monotone_cover.config import eps as default_eps
from monotone_cover.core.constraints import Constraint
from monotone_cover.core.costs import CostModel
from monotone_cover.core.domains import DomainSpec, MuView
from monotone_cover.core.vectors import Vector
from monotone_cover.engine.trace import StepRecord
from monotone_cover.randomized.rstep import Correlation, RandomStepPlan, rstep
from monotone_cover.utils.errors import (
    DomainError,
    InfeasibleError,
    PreconditionError,
    UnsupportedError,
)


def in_domain(x: Vector, domains: Sequence[DomainSpec], eps: float | None = None) -> bool:
    """True when every x_j is exactly a point of U_j."""
    return all(d.contains(float(x[j]), eps) for j, d in enumerate(domains))


def stateless_plan(
    x: Vector,
    constraint: Constraint,
    cost: CostModel,
    domains: Sequence[DomainSpec],
    *,
    mode: Correlation = Correlation.INDEPENDENT,
    eps: float | None = None,
) -> RandomStepPlan:
    """Targets X_j = next domain point, β = min positive α_j, p_j = β/α_j.

    Raises:
        UnsupportedError: If some variable of S has a continuous domain
        DomainError: If some x_j is not a domain point
        InfeasibleError: If no variable of S can move up
    """
    tol = default_eps() if eps is None else eps
    targets: dict[int, float] = {}
    alphas: dict[int, float] = {}
    for j in constraint.deps:
        dom = domains[j]
        if dom.is_continuous:
            raise UnsupportedError(f"stateless steps need a discrete domain for x[{j}]")
        xj = float(x[j])
        if not dom.contains(xj, tol):
            raise DomainError(f"x[{j}] = {xj} is not a point of its domain", variable=j)
        up = dom.next_above(xj, tol)
        if up is None:
            targets[j] = xj
            continue
        targets[j] = up
        alphas[j] = cost.raise_cost(x, j, up)
    if not alphas:
        raise InfeasibleError(
            f"constraint {constraint.id}: every variable is at the top of its domain",
            constraint_id=constraint.id,
        )

    positive = [a for a in alphas.values() if a > 0]
    beta = min(positive, default=0.0)
    probs = {j: 0.0 for j in constraint.deps}
    for j, a in alphas.items():
        probs[j] = 1.0 if a <= 0 else min(1.0, beta / a)
    if mode is Correlation.SINGLE_PICK:
        scale = max(1.0, sum(probs.values()))
        probs = {j: p / scale for j, p in probs.items()}
        beta /= scale
    return RandomStepPlan(probs, beta, targets, mode, tuple(constraint.deps))


def stateless_rstep(
    x: Vector,
    constraint: Constraint,
    cost: CostModel,
    domains: Sequence[DomainSpec],
    rng: np.random.Generator,
    *,
    mode: Correlation = Correlation.INDEPENDENT,
    eps: float | None = None,
) -> tuple[Vector, StepRecord]:
    """One stateless step; the result stays inside every domain.

    Args:
        x: Current in-domain solution
        constraint: Unmet constraint S
        cost: Objective
        domains: U_j per variable (discrete for every j in deps(S))
        rng: Random generator
        mode: Correlation of the draws
        eps: Tolerance override

    Returns:
        The new vector and its StepRecord

    Raises:
        PreconditionError: If x already satisfies S
        InfeasibleError: If nothing in deps(S) can be raised

    Example:
        >>> x, rec = stateless_rstep(np.zeros(2), edge, LinearCost.of([1, 3]), [DomainSpec.binary()] * 2, rng)
        >>> x[0]
        1.0
    """
    tol = default_eps() if eps is None else eps
    if constraint.is_satisfied(MuView(x, domains, tol), tol):
        raise PreconditionError(f"constraint {constraint.id} is already satisfied")
    plan = stateless_plan(x, constraint, cost, domains, mode=mode, eps=tol)
    return rstep(x, constraint, cost, plan, rng, domains=domains, eps=tol)
