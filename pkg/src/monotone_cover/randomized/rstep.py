"""Randomized steps: each raise happens with probability p_j.

A plan fixes, per variable of S, a probability p_j and a target X_j: the
largest value whose raise costs at most β/p_j. Drawing the raises either
independently or as a single pick keeps the expected charge of a step at
β per variable, which is all the Δ bound needs.
"""

import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from enum import StrEnum

import numpy as np

from monotone_cover.config import eps as default_eps
from monotone_cover.core.constraints import Constraint
from monotone_cover.core.costs import CostModel
from monotone_cover.core.domains import DomainSpec, MuView
from monotone_cover.core.vectors import Point, Vector
from monotone_cover.engine.greedy import clamp_raise
from monotone_cover.engine.trace import StepRecord
from monotone_cover.utils.errors import InvalidStepSizeError, PreconditionError


class Correlation(StrEnum):
    """How the raises of one step are drawn."""

    INDEPENDENT = "independent"
    SINGLE_PICK = "single-pick"


def _check_probability(j: int, p: float) -> None:
    if math.isnan(p) or not 0.0 <= p <= 1.0:
        raise PreconditionError(f"probability for x[{j}] must lie in [0, 1], got {p}")


@dataclass(frozen=True)
class RandomStepPlan:
    """Probabilities and targets for one randomized step.

    Attributes:
        probabilities: p_j for every j in deps(S)
        beta: Step size the targets were priced with
        targets: X_j for every j in deps(S); X_j = x_j when p_j = 0
        mode: Independent draws or a single pick
        order: Draw order, deps(S) order when built from a constraint

    Example:
        >>> plan = RandomStepPlan.build(np.zeros(1), row, LinearCost.of([1]), 0.5, 0.5)
        >>> plan.targets
        {0: 1.0}
    """

    probabilities: dict[int, float]
    beta: float
    targets: dict[int, float]
    mode: Correlation = Correlation.INDEPENDENT
    order: tuple[int, ...] = field(default=())

    def __post_init__(self) -> None:
        if math.isnan(self.beta) or self.beta < 0:
            raise InvalidStepSizeError(f"step size must be >= 0, got {self.beta}")
        for j, p in self.probabilities.items():
            _check_probability(j, p)
        if set(self.targets) != set(self.probabilities):
            raise PreconditionError("plan needs one target per probability")
        if self.mode is Correlation.SINGLE_PICK:
            total = sum(self.probabilities.values())
            if total > 1.0 + default_eps():
                raise PreconditionError(
                    f"single-pick probabilities must sum to <= 1, got {total}"
                )
        if not self.order:
            object.__setattr__(self, "order", tuple(sorted(self.probabilities)))

    @classmethod
    def build(
        cls,
        x: Vector,
        constraint: Constraint,
        cost: CostModel,
        beta: float,
        probabilities: Mapping[int, float] | float = 1.0,
        *,
        mode: Correlation = Correlation.INDEPENDENT,
        domains: Sequence[DomainSpec] | None = None,
        eps: float | None = None,
    ) -> "RandomStepPlan":
        """Price targets X_j so that raising x_j to X_j costs <= β/p_j.

        In single-pick mode probabilities summing above 1 are scaled down
        together with β, which leaves every target unchanged.

        Args:
            x: Current solution
            constraint: Unmet constraint S
            cost: Objective
            beta: Step size (caller certified for non-linear costs)
            probabilities: One p for all deps, or p_j per dep (missing = 0)
            mode: Correlation of the draws
            domains: Variable domains when S is read through μ
            eps: Tolerance override
        """
        tol = default_eps() if eps is None else eps
        if isinstance(probabilities, Mapping):
            probs = {j: float(probabilities.get(j, 0.0)) for j in constraint.deps}
        else:
            probs = dict.fromkeys(constraint.deps, float(probabilities))
        for j, p in probs.items():
            _check_probability(j, p)

        targets: dict[int, float] = {}
        for j, p in probs.items():
            xj = float(x[j])
            if p == 0.0:
                targets[j] = xj
                continue
            v = cost.raise_budget(x, j, beta / p)
            if math.isinf(v):
                v = clamp_raise(x, j, constraint, domains, tol)
            targets[j] = max(xj, v)

        if mode is Correlation.SINGLE_PICK:
            scale = max(1.0, sum(probs.values()))
            probs = {j: p / scale for j, p in probs.items()}
            beta = beta / scale
        return cls(probs, float(beta), targets, mode, tuple(constraint.deps))

    def draw(self, rng: np.random.Generator) -> list[int]:
        """Variables to raise, in dependency order."""
        if self.mode is Correlation.INDEPENDENT:
            u = rng.random(len(self.order))
            return [j for j, r in zip(self.order, u, strict=True) if r < self.probabilities[j]]
        r = rng.random()
        acc = 0.0
        for j in self.order:
            acc += self.probabilities[j]
            if r < acc:
                return [j]
        return []

    def expected_charge(self, x: Vector, cost: CostModel) -> float:
        """Σ_j p_j · (cost of raising x_j alone to X_j)."""
        return sum(
            p * cost.raise_cost(x, j, self.targets[j])
            for j, p in self.probabilities.items()
            if p > 0
        )


def _view(x: Vector, domains: Sequence[DomainSpec] | None, tol: float) -> Point:
    return x if domains is None else MuView(x, domains, tol)


def rstep(
    x: Vector,
    constraint: Constraint,
    cost: CostModel,
    plan: RandomStepPlan,
    rng: np.random.Generator,
    *,
    domains: Sequence[DomainSpec] | None = None,
    eps: float | None = None,
) -> tuple[Vector, StepRecord]:
    """Apply a plan: each chosen x_j jumps to its target X_j.

    With every p_j = 1 in independent mode the result equals
    ``step(x, constraint, cost, plan.beta)``.

    Raises:
        PreconditionError: If x already satisfies S or a probability is
            outside [0, 1]

    Example:
        >>> rng = np.random.Generator(np.random.Philox(0))
        >>> x, rec = rstep(np.zeros(2), row, cost, RandomStepPlan.build(np.zeros(2), row, cost, 2 / 3), rng)
    """
    tol = default_eps() if eps is None else eps
    if constraint.is_satisfied(_view(x, domains, tol), tol):
        raise PreconditionError(f"constraint {constraint.id} is already satisfied")
    new = x.copy()
    for j in plan.draw(rng):
        new[j] = max(float(x[j]), plan.targets[j])
    raised = tuple(
        (j, float(x[j]), float(new[j])) for j in constraint.deps if new[j] > x[j]
    )
    record = StepRecord(
        constraint_id=constraint.id,
        beta=plan.beta,
        raised=raised,
        cost_before=cost(x),
        cost_after=cost(new),
    )
    return new, record
