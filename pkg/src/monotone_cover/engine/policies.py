"""Step size policies for the greedy loop.

A policy maps (x, S, instance) to the β used by one step. Every shipped
policy stays at or below distance_c(x, S), which is what the Δ guarantee
needs; callers plugging in their own rule through :class:`CustomLowerBound`
are responsible for the same bound.
"""

import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from typing import Protocol, runtime_checkable

from monotone_cover.core.constraints import Constraint
from monotone_cover.core.costs import LinearCost
from monotone_cover.core.domains import DomainSpec
from monotone_cover.core.instance import Instance
from monotone_cover.core.vectors import Vector
from monotone_cover.engine.greedy import minimal_beta
from monotone_cover.utils.errors import UnsupportedError


@runtime_checkable
class StepSizePolicy(Protocol):
    """Callable returning β for an unmet constraint."""

    name: str

    def __call__(self, x: Vector, constraint: Constraint, instance: Instance) -> float: ...


def _domains(instance: Instance) -> Sequence[DomainSpec] | None:
    return instance.domains if instance.restricted else None


@dataclass
class MinimalToSatisfy:
    """Smallest β for which one step satisfies S (the default)."""

    name: str = "minimal"

    def __call__(self, x: Vector, constraint: Constraint, instance: Instance) -> float:
        return minimal_beta(x, constraint, instance.cost, domains=_domains(instance))


@dataclass
class CustomLowerBound:
    """Caller-supplied β; must not exceed distance_c(x, S)."""

    fn: Callable[[Vector, Constraint, Instance], float]
    name: str = "custom"

    def __call__(self, x: Vector, constraint: Constraint, instance: Instance) -> float:
        return float(self.fn(x, constraint, instance))


@dataclass
class FixedFraction:
    """A fixed fraction of the minimal β, plus a small tail to guarantee progress.

    Useful in tests: several steps per constraint instead of one.
    """

    fraction: float = 0.5
    tail: float = 1e-6
    name: str = "fraction"

    def __post_init__(self) -> None:
        if not 0 < self.fraction <= 1:
            raise ValueError(f"fraction must lie in (0, 1], got {self.fraction}")

    def __call__(self, x: Vector, constraint: Constraint, instance: Instance) -> float:
        beta = minimal_beta(x, constraint, instance.cost, domains=_domains(instance))
        if beta == 0:
            return 0.0
        return min(beta, self.fraction * beta + self.tail)


@dataclass
class Maximal:
    """β = distance_c(x, S), the largest valid step, computed by the oracle.

    Only usable where :func:`monotone_cover.oracle.distance` is exact.
    """

    budget: int | None = None
    name: str = "maximal"

    def __call__(self, x: Vector, constraint: Constraint, instance: Instance) -> float:
        from monotone_cover.oracle import distance

        return distance(instance, x, constraint, budget=self.budget)


@dataclass
class InfinitesimalPolicy:
    """Approximates the continuous raise-at-rate-1/∂c process.

    Each step spends at most ``resolution``; smaller resolutions track the
    continuous process more closely at the price of more steps.
    """

    resolution: float = 1e-3
    name: str = "infinitesimal"

    def __post_init__(self) -> None:
        if not self.resolution > 0:
            raise ValueError(f"resolution must be positive, got {self.resolution}")

    def __call__(self, x: Vector, constraint: Constraint, instance: Instance) -> float:
        beta = minimal_beta(x, constraint, instance.cost, domains=_domains(instance))
        return min(beta, self.resolution)


def subset_sum_beta(x: Vector, constraint: Constraint, instance: Instance) -> float:
    """β = min over j ∈ deps(S) with x_j < 1 of c_j (1 − x_j).

    The cheapest way to bring one more item fully into a subset-sum row.

    Raises:
        UnsupportedError: For non-linear costs
    """
    cost = instance.cost
    if not isinstance(cost, LinearCost):
        raise UnsupportedError("the subset-sum rule needs a linear cost")
    candidates = [
        cost.coefficients[j] * (1.0 - float(x[j])) for j in constraint.deps if x[j] < 1.0
    ]
    return min(candidates, default=math.inf)


def subset_sum_policy() -> CustomLowerBound:
    """Policy form of :func:`subset_sum_beta`."""
    return CustomLowerBound(subset_sum_beta, name="subset-sum")


@dataclass
class PolicyRegistry:
    """Name → factory lookup used by the CLI ``--policy`` option."""

    factories: dict[str, Callable[[], StepSizePolicy]] = field(default_factory=dict)

    def register(self, name: str, factory: Callable[[], StepSizePolicy]) -> None:
        self.factories[name] = factory

    def create(self, name: str) -> StepSizePolicy:
        try:
            return self.factories[name]()
        except KeyError as e:
            known = ", ".join(sorted(self.factories))
            raise ValueError(f"unknown policy {name!r} (known: {known})") from e

    @property
    def names(self) -> list[str]:
        return sorted(self.factories)


policies = PolicyRegistry()
policies.register("minimal", MinimalToSatisfy)
policies.register("maximal", Maximal)
policies.register("fraction", FixedFraction)
policies.register("infinitesimal", InfinitesimalPolicy)
policies.register("subset-sum", subset_sum_policy)
