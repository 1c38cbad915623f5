"""Segmented file caching.

Files are split into segments and x_s counts the evicted segments of file s.
Keeping the cache within k segments is the covering constraint
Σ_{s∈Q} (size_s − ⌊x_s⌋) ≤ k, i.e. Σ ⌊x_s⌋ ≥ Σ size_s − k with x_s capped at
size_s. The cost of x_s is the retrieval cost of the cheapest x_s segments.
Δ counts files, not segments.
"""

import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field

from monotone_cover.core.constraints import FloorSumConstraint, Term
from monotone_cover.core.costs import PiecewiseLinearCurve, SeparableCost
from monotone_cover.core.domains import DomainSpec
from monotone_cover.core.instance import Instance
from monotone_cover.core.vectors import Vector
from monotone_cover.engine.greedy import SolveResult, solve
from monotone_cover.engine.trace import StepTrace
from monotone_cover.utils.errors import InvalidConstraintError


@dataclass(frozen=True)
class SegmentProblem:
    """Files, their per-segment retrieval costs and the covering instance."""

    sizes: tuple[int, ...]
    segment_costs: tuple[tuple[float, ...], ...]
    instance: Instance

    def retrieval_order(self, s: int) -> list[int]:
        """Segment indices of file s, cheapest retrieval first."""
        costs = self.segment_costs[s]
        return sorted(range(len(costs)), key=lambda i: (costs[i], i))


def retrieval_curve(costs: Sequence[float]) -> PiecewiseLinearCurve:
    """Cost of retrieving the cheapest x segments, linear between integers."""
    ordered = sorted(float(c) for c in costs)
    knots = [(0.0, 0.0)]
    total = 0.0
    for i, c in enumerate(ordered, start=1):
        total += c
        knots.append((float(i), total))
    return PiecewiseLinearCurve(tuple(knots), tail_slope=0.0)


def _segment_costs(
    sizes: Sequence[int], costs: Sequence[Sequence[float]] | None
) -> tuple[tuple[float, ...], ...]:
    if costs is None:
        return tuple((1.0,) * size for size in sizes)
    if len(costs) != len(sizes) or any(len(c) != s for c, s in zip(costs, sizes, strict=True)):
        raise InvalidConstraintError("one retrieval cost per segment of every file")
    return tuple(tuple(float(v) for v in c) for c in costs)


def _instance(
    sizes: Sequence[int],
    segment_costs: tuple[tuple[float, ...], ...],
    constraints: Sequence[FloorSumConstraint],
    name: str,
) -> Instance:
    domains = [DomainSpec.interval(0, size, 1.0) for size in sizes]
    cost = SeparableCost(tuple(retrieval_curve(c) for c in segment_costs))
    return Instance.build(domains, cost, constraints, name=name)


def build_segment_constraints(
    sizes: Sequence[int],
    k: int,
    costs: Sequence[Sequence[float]] | None = None,
    *,
    name: str = "segments",
) -> SegmentProblem:
    """The capacity constraint for caching every file at once.

    Args:
        sizes: Segments per file, all >= 1
        k: Cache capacity in segments
        costs: Retrieval cost per segment of each file (default 1)
        name: Instance label

    Returns:
        SegmentProblem; its instance has no constraints when everything fits

    Example:
        >>> problem = build_segment_constraints([5], 3)
        >>> problem.instance.constraints[0].rhs
        2.0
    """
    if any(s < 1 for s in sizes):
        raise InvalidConstraintError(f"file sizes must be >= 1: {list(sizes)}")
    seg_costs = _segment_costs(sizes, costs)
    overflow = sum(sizes) - k
    constraints = []
    if overflow > 0:
        terms = (Term(s, 1.0, True, 1.0, float(size)) for s, size in enumerate(sizes))
        constraints.append(FloorSumConstraint.of("capacity", terms, overflow))
    return SegmentProblem(tuple(sizes), seg_costs, _instance(sizes, seg_costs, constraints, name))


def segment_option_constraint(
    id: str, options: Mapping[int, int], sizes: Sequence[int]
) -> FloorSumConstraint:
    """Σ_s ⌊x_s / m_s⌋ >= 1: evict at least m_s segments of some file s.

    Example:
        >>> segment_option_constraint("c", {0: 3, 1: 4}, [3, 4]).is_satisfied([3, 0])
        True
    """
    terms = []
    for s, m in sorted(options.items()):
        if not 1 <= m <= sizes[s]:
            raise InvalidConstraintError(f"option on file {s} needs 1 <= {m} <= {sizes[s]}")
        terms.append(Term(s, 1.0, True, float(m), float(sizes[s])))
    return FloorSumConstraint.of(id, terms, 1.0)


def option_problem(
    sizes: Sequence[int],
    options: Sequence[Mapping[int, int]],
    costs: Sequence[Sequence[float]] | None = None,
    *,
    name: str = "segment-options",
) -> SegmentProblem:
    """Problem made of combination constraints, one per options mapping."""
    seg_costs = _segment_costs(sizes, costs)
    constraints = [segment_option_constraint(f"option-{i}", o, sizes) for i, o in enumerate(options)]
    return SegmentProblem(tuple(sizes), seg_costs, _instance(sizes, seg_costs, constraints, name))


@dataclass(frozen=True)
class PlanStep:
    """Segments newly evicted by one greedy step."""

    constraint_id: str
    evicted: dict[int, list[int]]


@dataclass
class EvictionPlan:
    """Segments to evict per file, plus the per-step breakdown.

    Attributes:
        evicted: File → segment indices (cheapest retrieval first)
        steps: Segments each step added
        cost: Retrieval cost of everything evicted
        result: Greedy solve behind the plan
    """

    evicted: dict[int, list[int]]
    steps: list[PlanStep] = field(default_factory=list)
    cost: float = 0.0
    result: SolveResult | None = None

    def to_dict(self) -> dict[str, object]:
        return {
            "cost": self.cost,
            "evicted": {str(s): segs for s, segs in sorted(self.evicted.items())},
            "steps": [
                {"constraint": p.constraint_id, "evicted": {str(s): v for s, v in p.evicted.items()}}
                for p in self.steps
            ],
        }


def _useful_counts(problem: SegmentProblem, mu: Vector) -> list[int]:
    """Per file, the fewest evicted segments that keep every term at its μ value.

    A term with step m only counts whole multiples of m, so the segments
    past the largest such multiple over all terms on the file buy nothing.
    """
    counts = [0] * len(problem.sizes)
    for row in problem.instance.constraints:
        for t in row.terms:
            whole = math.floor(min(mu[t.var], t.cap) / t.scale + 1e-9)
            counts[t.var] = max(counts[t.var], int(whole * t.scale))
    return counts


def _step_plan(problem: SegmentProblem, trace: StepTrace, useful: Sequence[int]) -> list[PlanStep]:
    plan = []
    for rec in trace:
        added: dict[int, list[int]] = {}
        for s, old, new in rec.raised:
            order = problem.retrieval_order(s)
            lo = min(math.floor(old + 1e-9), useful[s])
            hi = min(math.floor(new + 1e-9), useful[s])
            if hi > lo:
                added[s] = order[lo:hi]
        if added:
            plan.append(PlanStep(rec.constraint_id, added))
    return plan


def solve_segments(problem: SegmentProblem) -> EvictionPlan:
    """Run the greedy and translate μ(x) into concrete segments.

    Segments a file holds beyond what any of its terms counts are left
    cached, so the plan never costs more than c(μ(x)).

    Example:
        >>> solve_segments(build_segment_constraints([5], 3)).evicted
        {0: [0, 1]}
    """
    result = solve(problem.instance)
    useful = _useful_counts(problem, result.mu)
    evicted = {}
    for s, count in enumerate(useful):
        if count:
            evicted[s] = problem.retrieval_order(s)[:count]
    cost = sum(problem.segment_costs[s][i] for s, segs in evicted.items() for i in segs)
    return EvictionPlan(evicted, _step_plan(problem, result.trace, useful), cost, result)
