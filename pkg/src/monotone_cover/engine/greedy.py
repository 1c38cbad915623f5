"""The greedy monotone covering loop, its step subroutine and minimal β.

The loop repeatedly picks an unmet constraint S and calls ``step``: every
x_j with j ∈ deps(S) is raised as far as a per-coordinate budget β allows,
each raise priced against the pre-step vector. Any β up to the cost of
reaching S from x keeps the final cost within Δ times optimal.
"""

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from enum import StrEnum
from typing import TYPE_CHECKING

from monotone_cover.config import eps as default_eps
from monotone_cover.config import get_config
from monotone_cover.core.constraints import Constraint, FloorSumConstraint
from monotone_cover.core.costs import CostModel
from monotone_cover.core.domains import DomainSpec, MuView
from monotone_cover.core.instance import Instance
from monotone_cover.core.vectors import Point, Vector, as_solution
from monotone_cover.engine.trace import StepRecord, StepTrace
from monotone_cover.utils.errors import (
    InvalidStepSizeError,
    PreconditionError,
    SafetyLimitExceededError,
    UnboundedConstraintError,
)

if TYPE_CHECKING:
    from monotone_cover.engine.policies import StepSizePolicy

logger = logging.getLogger(__name__)


class ConstraintOrder(StrEnum):
    """How the main loop picks the next unmet constraint."""

    ROUND_ROBIN = "round-robin"
    SEQUENTIAL = "sequential"


def _view(x: Point, domains: Sequence[DomainSpec] | None, tol: float) -> Point:
    return x if domains is None else MuView(x, domains, tol)


def clamp_raise(
    x: Vector,
    j: int,
    constraint: Constraint,
    domains: Sequence[DomainSpec] | None,
    tol: float,
) -> float:
    """Finite value for a raise of x_j that costs nothing beyond some point."""
    v = constraint.clamp(j, _view(x, domains, tol))
    if domains is not None:
        up = domains[j].ceil(v, tol)
        v = domains[j].maximum if up is None else up
    if math.isinf(v):
        raise UnboundedConstraintError(
            f"constraint {constraint.id}: free raise of x[{j}] has no finite stopping point",
            constraint_id=constraint.id,
        )
    return max(float(x[j]), v)


def raise_all(
    x: Vector,
    constraint: Constraint,
    cost: CostModel,
    beta: float,
    *,
    domains: Sequence[DomainSpec] | None = None,
    eps: float | None = None,
) -> Vector:
    """x after raising every dep to the largest value costing <= β.

    Raises are priced against the pre-step ``x``; unbounded raises are
    clamped to the constraint's satisfaction point.
    """
    tol = default_eps() if eps is None else eps
    new = x.copy()
    for j in constraint.deps:
        v = cost.raise_budget(x, j, beta)
        if math.isinf(v):
            v = clamp_raise(x, j, constraint, domains, tol)
        new[j] = max(float(x[j]), v)
    return new


def step(
    x: Vector,
    constraint: Constraint,
    cost: CostModel,
    beta: float,
    *,
    domains: Sequence[DomainSpec] | None = None,
    eps: float | None = None,
) -> tuple[Vector, StepRecord]:
    """One greedy step for an unmet constraint.

    Args:
        x: Current solution (not modified)
        constraint: Unmet constraint S
        cost: Objective
        beta: Per-coordinate budget, >= 0
        domains: Variable domains when S is read through μ
        eps: Tolerance override

    Returns:
        The raised vector and its StepRecord

    Raises:
        PreconditionError: If x already satisfies S
        InvalidStepSizeError: If beta is negative or NaN

    Example:
        >>> x, rec = step(np.zeros(2), row, LinearCost.of([1, 2]), 1.0)
        >>> x
        array([1. , 0.5])
    """
    tol = default_eps() if eps is None else eps
    if math.isnan(beta) or beta < 0:
        raise InvalidStepSizeError(f"step size must be >= 0, got {beta}")
    if constraint.is_satisfied(_view(x, domains, tol), tol):
        raise PreconditionError(f"constraint {constraint.id} is already satisfied")
    new = raise_all(x, constraint, cost, beta, domains=domains, eps=tol)
    raised = tuple(
        (j, float(x[j]), float(new[j])) for j in constraint.deps if new[j] > x[j]
    )
    record = StepRecord(
        constraint_id=constraint.id,
        beta=float(beta),
        raised=raised,
        cost_before=cost(x),
        cost_after=cost(new),
    )
    return new, record


def _floor_sum_unbounded(
    x: Vector,
    constraint: FloorSumConstraint,
    domains: Sequence[DomainSpec] | None,
    tol: float,
) -> bool:
    top = x.copy()
    for t in constraint.terms:
        sat = t.saturation
        if domains is not None:
            sat = min(sat, domains[t.var].maximum)
        if math.isinf(sat):
            return False
        top[t.var] = max(top[t.var], sat)
    return not constraint.is_satisfied(_view(top, domains, tol), tol)


def minimal_beta(
    x: Vector,
    constraint: Constraint,
    cost: CostModel,
    *,
    domains: Sequence[DomainSpec] | None = None,
    eps: float | None = None,
) -> float:
    """Smallest β for which step(x, S, β) lands in S.

    Floor-sum constraints under piecewise-linear costs are solved by
    enumerating satisfaction events (a variable reaching a floor breakpoint,
    a domain point or a cost knot) and closing the remaining continuous
    slack by affine interpolation between events. Everything else falls back
    to doubling plus bisection.

    Raises:
        PreconditionError: If x already satisfies S
        UnboundedConstraintError: If no finite β satisfies S

    Example:
        >>> minimal_beta(np.zeros(2), row, LinearCost.of([1, 2]))
        0.6666666666666666
    """
    tol = default_eps() if eps is None else eps
    if constraint.is_satisfied(_view(x, domains, tol), tol):
        raise PreconditionError(f"constraint {constraint.id} is already satisfied")

    def satisfied_at(beta: float) -> bool:
        y = raise_all(x, constraint, cost, beta, domains=domains, eps=tol)
        return constraint.is_satisfied(_view(y, domains, tol), tol)

    if isinstance(constraint, FloorSumConstraint) and _floor_sum_unbounded(
        x, constraint, domains, tol
    ):
        raise UnboundedConstraintError(
            f"constraint {constraint.id} cannot be met by raising its variables",
            constraint_id=constraint.id,
        )
    if satisfied_at(0.0):
        return 0.0
    if cost.piecewise_linear and isinstance(constraint, FloorSumConstraint):
        return _event_search(x, constraint, cost, domains, tol, satisfied_at)
    return _bisection(0.0, None, satisfied_at, constraint.id)


def _events(
    x: Vector,
    constraint: FloorSumConstraint,
    cost: CostModel,
    domains: Sequence[DomainSpec] | None,
    tol: float,
) -> list[float]:
    view = _view(x, domains, tol)
    betas: set[float] = set()
    for j in constraint.deps:
        xj = float(x[j])
        upto = clamp_raise(x, j, constraint, domains, tol)
        values = set(constraint.breakpoints(j, view, upto))
        values.update(v for v in cost.knots(x, j) if v <= upto)
        if domains is not None:
            values.update(domains[j].points_between(xj, upto))
        values.add(upto)
        for v in values:
            if v > xj:
                betas.add(cost.raise_cost(x, j, v))
    return sorted(b for b in betas if b > 0)


def _event_search(
    x: Vector,
    constraint: FloorSumConstraint,
    cost: CostModel,
    domains: Sequence[DomainSpec] | None,
    tol: float,
    satisfied_at: Callable[[float], bool],
) -> float:
    events = _events(x, constraint, cost, domains, tol)

    def lhs_at(beta: float) -> float:
        y = raise_all(x, constraint, cost, beta, domains=domains, eps=tol)
        return constraint.lhs(_view(y, domains, tol), tol)

    # first satisfying event, by binary search (satisfaction is monotone in β)
    lo_i, hi_i = 0, len(events)
    while lo_i < hi_i:
        mid = (lo_i + hi_i) // 2
        if satisfied_at(events[mid]):
            hi_i = mid
        else:
            lo_i = mid + 1
    prev = events[lo_i - 1] if lo_i > 0 else 0.0
    nxt = events[lo_i] if lo_i < len(events) else None

    # between two events the continuous part of the left-hand side is affine
    probe = (prev + nxt) / 2 if nxt is not None else prev + 1.0
    base, mid_val = lhs_at(prev), lhs_at(probe)
    slope = (mid_val - base) / (probe - prev)
    if slope > 0:
        root = prev + (constraint.rhs - base) / slope
        if root > prev and (nxt is None or root < nxt):
            if satisfied_at(root):
                return root
            return _bisection(root, nxt, satisfied_at, constraint.id)
    if nxt is None:
        return _bisection(prev, None, satisfied_at, constraint.id)
    return nxt


def _bisection(
    lo: float,
    hi: float | None,
    satisfied_at: Callable[[float], bool],
    constraint_id: str,
) -> float:
    if hi is None:
        hi = max(1.0, 2 * lo)
        for _ in range(200):
            if satisfied_at(hi):
                break
            lo, hi = hi, 2 * hi
        else:
            raise UnboundedConstraintError(
                f"constraint {constraint_id}: no finite step size satisfies it",
                constraint_id=constraint_id,
            )
    for _ in range(get_config().bisection_iterations):
        mid = (lo + hi) / 2
        if mid in (lo, hi):
            break
        if satisfied_at(mid):
            hi = mid
        else:
            lo = mid
    return hi


@dataclass
class SolveResult:
    """Output of :func:`solve`.

    Attributes:
        x: Final vector (satisfies every constraint through μ)
        mu: μ(x)
        trace: Complete step trace
        cost: c(x)
        mu_cost: c(μ(x))
        delta: Δ of the instance
    """

    x: Vector
    mu: Vector
    trace: StepTrace
    cost: float
    mu_cost: float
    delta: int

    @property
    def steps(self) -> int:
        return len(self.trace)

    def to_dict(self) -> dict[str, object]:
        return {
            "cost": self.cost,
            "mu_cost": self.mu_cost,
            "delta": self.delta,
            "steps": self.steps,
            "x": self.x.tolist(),
            "mu": self.mu.tolist(),
        }


def safety_limit(instance: Instance) -> int:
    """Maximum steps before :func:`solve` aborts."""
    return get_config().safety_factor * (instance.size + instance.n)


def solve(
    instance: Instance,
    policy: "StepSizePolicy | None" = None,
    order: ConstraintOrder | Sequence[str] = ConstraintOrder.ROUND_ROBIN,
    *,
    start: Vector | None = None,
    max_steps: int | None = None,
    eps: float | None = None,
) -> SolveResult:
    """Run the greedy algorithm until every constraint holds.

    Args:
        instance: Problem instance
        policy: Step size rule (minimal-to-satisfy by default)
        order: Round-robin or sequential over the input order, or an explicit
            sequence of constraint ids processed sequentially
        start: Start vector (defaults to ``instance.start_vector()``)
        max_steps: Override for the safety limit
        eps: Tolerance override

    Returns:
        SolveResult with the final vector, μ(x) and the complete trace

    Raises:
        SafetyLimitExceededError: If the step limit is hit (carries the
            partial trace)
        InvalidStepSizeError: If the policy returns β <= 0 that moves nothing
    """
    from monotone_cover.engine.policies import MinimalToSatisfy

    tol = default_eps() if eps is None else eps
    policy = policy or MinimalToSatisfy()
    domains = instance.domains if instance.restricted else None
    x = instance.start_vector() if start is None else as_solution(start, instance.n)
    trace = StepTrace(start=x.copy())
    limit = safety_limit(instance) if max_steps is None else max_steps

    if isinstance(order, ConstraintOrder):
        sequence = list(instance.constraints)
        rule = order
    else:
        sequence = [instance.constraint(cid) for cid in order]
        rule = ConstraintOrder.SEQUENTIAL

    def advance(s: Constraint) -> None:
        nonlocal x
        if len(trace) >= limit:
            trace.final_x = x.copy()
            raise SafetyLimitExceededError(
                f"{instance.name or 'instance'}: no feasible point after {limit} steps "
                f"(last constraint {s.id})",
                partial_trace=trace,
            )
        beta = policy(x, s, instance)
        x_new, record = step(x, s, instance.cost, beta, domains=domains, eps=tol)
        if beta <= 0 and not record.raised:
            raise InvalidStepSizeError(
                f"policy {policy.name} returned beta={beta} on unmet constraint {s.id}"
            )
        logger.debug(
            "step %d: %s beta=%.6g raised=%d cost=%.6g",
            len(trace) + 1,
            s.id,
            beta,
            len(record.raised),
            record.cost_after,
        )
        trace.append(record)
        x = x_new

    if rule is ConstraintOrder.SEQUENTIAL:
        for s in sequence:
            while not instance.satisfies(s, x, tol):
                advance(s)
    while True:
        pending = [s for s in sequence if not instance.satisfies(s, x, tol)]
        if not pending:
            break
        for s in pending:
            if not instance.satisfies(s, x, tol):
                advance(s)

    mu = instance.mu(x, tol)
    trace.final_x = x.copy()
    trace.final_mu = mu.copy()
    result = SolveResult(
        x=x,
        mu=mu,
        trace=trace,
        cost=instance.cost(x),
        mu_cost=instance.cost(mu),
        delta=instance.delta,
    )
    logger.info(
        "%s: %d steps, cost %.6g (mu %.6g), delta %d",
        instance.name or "instance",
        result.steps,
        result.cost,
        result.mu_cost,
        result.delta,
    )
    return result
