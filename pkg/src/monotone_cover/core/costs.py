"""Non-decreasing submodular cost models.

Every model answers two queries the greedy step needs:

* ``evaluate(x)``: the cost c(x);
* ``raise_budget(x, j, beta)``: the largest x'_j such that raising x_j alone
  to x'_j increases c by at most ``beta`` (``math.inf`` when the raise is free
  beyond some point).

Linear, separable piecewise-linear and facility-location models answer
``raise_budget`` in closed form; generic models must supply it.
"""

import bisect
import math
from abc import ABC, abstractmethod
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass, field
from enum import StrEnum
from typing import ClassVar

import numpy as np

from monotone_cover.core.domains import DomainSpec
from monotone_cover.core.vectors import Vector, as_solution, replace
from monotone_cover.utils.errors import InvalidCostModelError, UnsupportedError


class CostKind(StrEnum):
    """Cost model families."""

    LINEAR = "linear"
    SEPARABLE = "separable"
    FACILITY_LOCATION = "facility-location"
    GENERIC = "generic-submodular"


class CostModel(ABC):
    """Non-negative, non-decreasing, submodular c : ℝ₊ⁿ → ℝ₊."""

    kind: ClassVar[CostKind]

    @property
    @abstractmethod
    def n(self) -> int:
        """Number of variables."""

    @abstractmethod
    def evaluate(self, x: Vector) -> float:
        """c(x) for an already validated vector."""

    @abstractmethod
    def raise_budget(self, x: Vector, j: int, beta: float) -> float:
        """Largest x'_j >= x_j with c(x with x_j := x'_j) - c(x) <= beta."""

    def raise_cost(self, x: Vector, j: int, value: float) -> float:
        """Cost increase of raising x_j alone to ``value``."""
        if value <= x[j]:
            return 0.0
        return self.evaluate(replace(x, j, value)) - self.evaluate(x)

    def knots(self, x: Vector, j: int) -> list[float]:
        """Values above x_j where the slope of the raise curve of x_j changes."""
        return []

    @property
    def piecewise_linear(self) -> bool:
        """True when every raise curve is piecewise linear with known knots."""
        return False

    def __call__(self, x: Vector) -> float:
        return self.evaluate(x)


@dataclass(frozen=True)
class LinearCost(CostModel):
    """c(x) = Σ c_j x_j.

    Example:
        >>> LinearCost.of([1, 2]).evaluate(np.array([1.0, 0.5]))
        2.0
    """

    kind: ClassVar[CostKind] = CostKind.LINEAR

    coefficients: tuple[float, ...]

    def __post_init__(self) -> None:
        for j, c in enumerate(self.coefficients):
            if not math.isfinite(c) or c < 0:
                raise InvalidCostModelError(
                    f"linear coefficient c[{j}] = {c} must be finite and non-negative"
                )

    @classmethod
    def of(cls, coefficients: Sequence[float]) -> "LinearCost":
        """Build from any sequence of numbers."""
        return cls(tuple(float(c) for c in coefficients))

    @property
    def n(self) -> int:
        return len(self.coefficients)

    @property
    def vector(self) -> Vector:
        """Coefficients as an array."""
        return np.array(self.coefficients, dtype=np.float64)

    @property
    def piecewise_linear(self) -> bool:
        return True

    def evaluate(self, x: Vector) -> float:
        return float(np.dot(self.vector, x))

    def raise_budget(self, x: Vector, j: int, beta: float) -> float:
        c = self.coefficients[j]
        if c == 0:
            return math.inf
        return float(x[j]) + beta / c

    def raise_cost(self, x: Vector, j: int, value: float) -> float:
        return self.coefficients[j] * max(0.0, value - float(x[j]))

    def scaled(self, factors: Sequence[float]) -> "LinearCost":
        """Componentwise product with ``factors`` (e.g. c'_j = p_j c_j)."""
        return LinearCost(tuple(c * f for c, f in zip(self.coefficients, factors, strict=True)))


@dataclass(frozen=True)
class PiecewiseLinearCurve:
    """Non-decreasing piecewise-linear function of one variable.

    Constant ``knots[0][1]`` below the first knot; slope ``tail_slope``
    beyond the last one.
    """

    knots: tuple[tuple[float, float], ...]
    tail_slope: float = 0.0

    def __post_init__(self) -> None:
        if not self.knots:
            raise InvalidCostModelError("curve needs at least one knot")
        xs = [k[0] for k in self.knots]
        ys = [k[1] for k in self.knots]
        if any(b <= a for a, b in zip(xs, xs[1:], strict=False)):
            raise InvalidCostModelError(f"curve knots must have ascending x: {xs}")
        if any(b < a for a, b in zip(ys, ys[1:], strict=False)) or ys[0] < 0:
            raise InvalidCostModelError(f"curve values must be non-negative and non-decreasing: {ys}")
        if self.tail_slope < 0:
            raise InvalidCostModelError(f"tail slope must be >= 0: {self.tail_slope}")

    @property
    def xs(self) -> list[float]:
        return [k[0] for k in self.knots]

    @property
    def ys(self) -> list[float]:
        return [k[1] for k in self.knots]

    def __call__(self, v: float) -> float:
        xs, ys = self.xs, self.ys
        if v <= xs[0]:
            return ys[0]
        if v >= xs[-1]:
            return ys[-1] + self.tail_slope * (v - xs[-1])
        i = bisect.bisect_right(xs, v) - 1
        x0, x1, y0, y1 = xs[i], xs[i + 1], ys[i], ys[i + 1]
        return y0 + (y1 - y0) * (v - x0) / (x1 - x0)

    def inverse_max(self, target: float, start: float) -> float:
        """Largest v >= start with f(v) <= target (``inf`` if unbounded)."""
        xs, ys = self.xs, self.ys
        if target >= ys[-1]:
            if self.tail_slope == 0:
                return math.inf
            return max(start, xs[-1] + (target - ys[-1]) / self.tail_slope)
        idx = bisect.bisect_right(ys, target) - 1
        if idx < 0:
            return start
        x0, x1, y0, y1 = xs[idx], xs[idx + 1], ys[idx], ys[idx + 1]
        v = x0 + (target - y0) * (x1 - x0) / (y1 - y0)
        return max(start, v)


@dataclass(frozen=True)
class SeparableCost(CostModel):
    """c(x) = Σ f_j(x_j) with non-decreasing piecewise-linear f_j."""

    kind: ClassVar[CostKind] = CostKind.SEPARABLE

    curves: tuple[PiecewiseLinearCurve, ...]

    @property
    def n(self) -> int:
        return len(self.curves)

    @property
    def piecewise_linear(self) -> bool:
        return True

    def evaluate(self, x: Vector) -> float:
        return float(sum(f(float(x[j])) for j, f in enumerate(self.curves)))

    def raise_budget(self, x: Vector, j: int, beta: float) -> float:
        f = self.curves[j]
        xj = float(x[j])
        return f.inverse_max(f(xj) + beta, xj)

    def raise_cost(self, x: Vector, j: int, value: float) -> float:
        f = self.curves[j]
        xj = float(x[j])
        return max(0.0, f(value) - f(xj)) if value > xj else 0.0

    def knots(self, x: Vector, j: int) -> list[float]:
        xj = float(x[j])
        return [k for k in self.curves[j].xs if k > xj]


@dataclass(frozen=True)
class FacilityLocationCost(CostModel):
    """c(x) = Σ_j f_j max_i x_ij + Σ_ij d_ij x_ij.

    Variable ``k`` stands for the customer-facility pair ``pairs[k]``.

    Example:
        >>> cost = FacilityLocationCost((3.0,), ((0, 0),), (1.0,))
        >>> cost.evaluate(np.array([0.5]))
        2.0
    """

    kind: ClassVar[CostKind] = CostKind.FACILITY_LOCATION

    opening: tuple[float, ...]
    pairs: tuple[tuple[int, int], ...]
    assignment: tuple[float, ...]
    _by_facility: dict[int, list[int]] = field(
        default_factory=dict, init=False, repr=False, compare=False
    )

    def __post_init__(self) -> None:
        if len(self.pairs) != len(self.assignment):
            raise InvalidCostModelError("one assignment cost per (customer, facility) pair")
        if any(f < 0 or not math.isfinite(f) for f in self.opening):
            raise InvalidCostModelError("opening costs must be finite and non-negative")
        if any(d < 0 or not math.isfinite(d) for d in self.assignment):
            raise InvalidCostModelError("assignment costs must be finite and non-negative")
        for _, fac in self.pairs:
            if not 0 <= fac < len(self.opening):
                raise InvalidCostModelError(f"unknown facility {fac}")
        for k, (_, fac) in enumerate(self.pairs):
            self._by_facility.setdefault(fac, []).append(k)

    @property
    def n(self) -> int:
        return len(self.pairs)

    @property
    def piecewise_linear(self) -> bool:
        return True

    def facility_max(self, x: Vector, facility: int) -> float:
        """max_i x_ij over the customers eligible for ``facility``."""
        members = self._by_facility.get(facility, [])
        return max((float(x[k]) for k in members), default=0.0)

    def evaluate(self, x: Vector) -> float:
        total = float(np.dot(np.array(self.assignment), x))
        for fac, f in enumerate(self.opening):
            total += f * self.facility_max(x, fac)
        return total

    def raise_budget(self, x: Vector, j: int, beta: float) -> float:
        _, fac = self.pairs[j]
        d, f = self.assignment[j], self.opening[fac]
        xj = float(x[j])
        m = self.facility_max(x, fac)
        below = d * (m - xj)
        if beta <= below:
            return xj + beta / d if d > 0 else m
        rate = d + f
        if rate == 0:
            return math.inf
        return m + (beta - below) / rate

    def raise_cost(self, x: Vector, j: int, value: float) -> float:
        _, fac = self.pairs[j]
        xj = float(x[j])
        if value <= xj:
            return 0.0
        m = self.facility_max(x, fac)
        return self.assignment[j] * (value - xj) + self.opening[fac] * max(0.0, value - m)

    def knots(self, x: Vector, j: int) -> list[float]:
        m = self.facility_max(x, self.pairs[j][1])
        return [m] if m > float(x[j]) else []


@dataclass(frozen=True)
class GenericSubmodularCost(CostModel):
    """Caller-supplied submodular cost.

    The callback pair must honour the evaluation contract: ``evaluate`` is
    non-negative, non-decreasing and submodular, and ``budget(x, j, beta)``
    returns the largest raise of x_j costing at most ``beta``.
    """

    kind: ClassVar[CostKind] = CostKind.GENERIC

    size: int
    evaluate_fn: Callable[[Vector], float]
    budget_fn: Callable[[Vector, int, float], float]
    name: str = "generic"

    @property
    def n(self) -> int:
        return self.size

    def evaluate(self, x: Vector) -> float:
        return float(self.evaluate_fn(x))

    def raise_budget(self, x: Vector, j: int, beta: float) -> float:
        return max(float(x[j]), float(self.budget_fn(x, j, beta)))


def evaluate_cost(cost: CostModel, x: Sequence[float] | Vector) -> float:
    """Validate ``x`` and return c(x).

    Args:
        cost: Cost model
        x: Candidate solution of length ``cost.n``

    Returns:
        c(x) >= 0

    Raises:
        DimensionError: On a length mismatch
        InvalidSolutionError: On NaN or negative coordinates
    """
    return cost.evaluate(as_solution(x, cost.n))


def extend_cost_to_reals(
    restricted: Sequence[Mapping[float, float]],
    domains: Sequence[DomainSpec],
) -> SeparableCost:
    """Extend a separable cost given on domain points to all of ℝ₊.

    Between consecutive domain points a <= v <= b the extension is the
    expectation of randomized rounding to a or b; outside the listed points
    the nearest existing endpoint's cost is used.

    Args:
        restricted: Per variable, a mapping from domain points to costs
        domains: The variables' domains

    Returns:
        A separable cost agreeing with ``restricted`` on every listed point

    Raises:
        UnsupportedError: If ``restricted`` is not per-variable (non-separable)
        InvalidCostModelError: If a point is outside its domain or the costs
            decrease

    Example:
        >>> cost = extend_cost_to_reals([{0: 0, 1: 4}], [DomainSpec.binary()])
        >>> cost.evaluate(np.array([0.25]))
        1.0
    """
    if callable(restricted) or not isinstance(restricted, Sequence):
        raise UnsupportedError("only separable restricted costs can be extended")
    if len(restricted) != len(domains):
        raise InvalidCostModelError("one restricted cost table per variable")
    curves = []
    for j, (table, dom) in enumerate(zip(restricted, domains, strict=True)):
        if not isinstance(table, Mapping) or not table:
            raise UnsupportedError(f"variable {j}: restricted cost must be a point table")
        points = sorted((float(v), float(c)) for v, c in table.items())
        for v, _ in points:
            if not dom.contains(v):
                raise InvalidCostModelError(f"variable {j}: {v} is not in its domain")
        curves.append(PiecewiseLinearCurve(tuple(points), tail_slope=0.0))
    return SeparableCost(tuple(curves))
