"""Variable domains U_j and the μ-rounding map."""

import bisect
import math
from collections.abc import Sequence
from dataclasses import dataclass
from enum import StrEnum

import numpy as np

from monotone_cover.config import eps as default_eps
from monotone_cover.core.vectors import Point, Vector
from monotone_cover.utils.errors import DomainError, InvalidConstraintError


class DomainKind(StrEnum):
    """Supported closed subsets of the non-negative reals."""

    REALS = "nonnegative-reals"
    INTEGERS = "nonnegative-integers"
    FINITE = "finite-set"
    INTERVAL = "interval-with-step"


@dataclass(frozen=True)
class DomainSpec:
    """Closed set U_j a single variable must be rounded into.

    ``INTERVAL`` holds ``low, low + step, ...`` up to ``high``; with
    ``step=None`` it is the continuous interval ``[low, high]``.

    Example:
        >>> DomainSpec.finite([0, 0.25, 1]).floor(0.9)
        0.25
        >>> DomainSpec.integers().next_above(1.0)
        2.0
    """

    kind: DomainKind = DomainKind.REALS
    values: tuple[float, ...] = ()
    low: float = 0.0
    high: float = math.inf
    step: float | None = None

    def __post_init__(self) -> None:
        if self.kind is DomainKind.FINITE:
            vals = self.values
            if not vals:
                raise InvalidConstraintError("finite-set domain must be non-empty")
            if any(v < 0 or not math.isfinite(v) for v in vals):
                raise InvalidConstraintError(
                    f"finite-set values must be finite and non-negative: {vals}"
                )
            if any(b <= a for a, b in zip(vals, vals[1:], strict=False)):
                raise InvalidConstraintError(
                    f"finite-set values must be strictly ascending: {vals}"
                )
        if self.kind is DomainKind.INTERVAL:
            if self.low < 0 or self.high < self.low:
                raise InvalidConstraintError(
                    f"interval needs 0 <= low <= high, got [{self.low}, {self.high}]"
                )
            if self.step is not None and self.step <= 0:
                raise InvalidConstraintError(f"interval step must be positive: {self.step}")

    # Constructors

    @classmethod
    def reals(cls) -> "DomainSpec":
        """U_j = ℝ₊."""
        return cls(DomainKind.REALS)

    @classmethod
    def integers(cls) -> "DomainSpec":
        """U_j = ℤ₊."""
        return cls(DomainKind.INTEGERS)

    @classmethod
    def finite(cls, values: Sequence[float]) -> "DomainSpec":
        """U_j = the given ascending list of points."""
        return cls(DomainKind.FINITE, values=tuple(float(v) for v in values))

    @classmethod
    def interval(
        cls, low: float, high: float, step: float | None = None
    ) -> "DomainSpec":
        """U_j = {low, low+step, ...} ∩ [low, high], or [low, high] if no step."""
        return cls(DomainKind.INTERVAL, low=float(low), high=float(high), step=step)

    @classmethod
    def binary(cls) -> "DomainSpec":
        """U_j = {0, 1}."""
        return cls.finite((0.0, 1.0))

    # Queries

    @property
    def is_continuous(self) -> bool:
        """True when every real in the domain's hull belongs to it."""
        return self.kind is DomainKind.REALS or (
            self.kind is DomainKind.INTERVAL and self.step is None
        )

    @property
    def minimum(self) -> float:
        """Smallest element of U_j."""
        if self.kind is DomainKind.FINITE:
            return self.values[0]
        if self.kind is DomainKind.INTERVAL:
            return self.low
        return 0.0

    @property
    def maximum(self) -> float:
        """Largest element of U_j (``inf`` when unbounded)."""
        if self.kind is DomainKind.FINITE:
            return self.values[-1]
        if self.kind is DomainKind.INTERVAL:
            if self.step is None:
                return self.high
            k = math.floor((self.high - self.low) / self.step + 1e-12)
            return self.low + k * self.step
        return math.inf

    @property
    def is_binary(self) -> bool:
        """True for U_j = {0, 1} in any encoding."""
        if self.kind is DomainKind.FINITE:
            return self.values == (0.0, 1.0)
        if self.kind is DomainKind.INTERVAL:
            return self.low == 0.0 and self.step == 1.0 and self.maximum == 1.0
        return False

    def floor(self, v: float, eps: float | None = None) -> float | None:
        """μ_j(v) = max{z ∈ U_j : z ≤ v}, or ``None`` if no such z."""
        tol = default_eps() if eps is None else eps
        if self.kind is DomainKind.REALS:
            return v
        if self.kind is DomainKind.INTEGERS:
            return float(math.floor(v + tol))
        if self.kind is DomainKind.FINITE:
            idx = bisect.bisect_right(self.values, v + tol) - 1
            return self.values[idx] if idx >= 0 else None
        if v < self.low - tol:
            return None
        if self.step is None:
            return max(self.low, min(v, self.high))
        top = min(v, self.maximum)
        k = math.floor((top - self.low) / self.step + tol)
        return self.low + max(k, 0) * self.step

    def ceil(self, v: float, eps: float | None = None) -> float | None:
        """min{z ∈ U_j : z ≥ v}, or ``None`` if v exceeds every element."""
        tol = default_eps() if eps is None else eps
        if self.kind is DomainKind.REALS:
            return max(v, 0.0)
        if self.kind is DomainKind.INTEGERS:
            return float(max(math.ceil(v - tol), 0))
        if self.kind is DomainKind.FINITE:
            idx = bisect.bisect_left(self.values, v - tol)
            return self.values[idx] if idx < len(self.values) else None
        if v > self.maximum + tol:
            return None
        if v <= self.low:
            return self.low
        if self.step is None:
            return min(v, self.high)
        k = math.ceil((v - self.low) / self.step - tol)
        return min(self.low + k * self.step, self.maximum)

    def next_above(self, v: float, eps: float | None = None) -> float | None:
        """min{z ∈ U_j : z > v}, or ``None`` if v is at or above the top."""
        tol = default_eps() if eps is None else eps
        if self.is_continuous:
            raise DomainError(
                "next_above is undefined on a continuous domain", variable=-1
            )
        if self.kind is DomainKind.INTEGERS:
            return float(math.floor(v + tol) + 1)
        if self.kind is DomainKind.FINITE:
            idx = bisect.bisect_right(self.values, v + tol)
            return self.values[idx] if idx < len(self.values) else None
        assert self.step is not None
        if v < self.low - tol:
            return self.low
        k = math.floor((v - self.low) / self.step + tol) + 1
        z = self.low + k * self.step
        return z if z <= self.maximum + tol else None

    def contains(self, v: float, eps: float | None = None) -> bool:
        """Exact membership up to the tolerance."""
        tol = default_eps() if eps is None else eps
        z = self.floor(v, tol)
        return z is not None and abs(z - v) <= tol

    def points_between(self, lo: float, hi: float, limit: int = 100_000) -> list[float]:
        """Domain points in the half-open range (lo, hi], ascending.

        Args:
            lo: Exclusive lower end
            hi: Inclusive upper end
            limit: Maximum number of points to return

        Returns:
            Sorted points (empty for continuous domains)
        """
        if self.is_continuous or hi <= lo:
            return []
        out: list[float] = []
        z = self.next_above(lo, 0.0) if lo >= self.minimum else self.minimum
        while z is not None and z <= hi and len(out) < limit:
            out.append(z)
            z = self.next_above(z, 0.0)
        return out


def mu_round(
    domains: Sequence[DomainSpec], x: Vector, eps: float | None = None
) -> Vector:
    """Round every coordinate down into its domain.

    Args:
        domains: One DomainSpec per variable
        x: Solution vector
        eps: Tolerance (defaults to the configured epsilon)

    Returns:
        μ(x), with μ_j(x) = max{z ∈ U_j : z ≤ x_j}

    Raises:
        DomainError: If some U_j has no element at or below x_j

    Example:
        >>> mu_round([DomainSpec.integers()] * 2, np.array([1.0, 0.5]))
        array([1., 0.])
    """
    out = np.empty(len(domains), dtype=np.float64)
    for j, dom in enumerate(domains):
        z = dom.floor(float(x[j]), eps)
        if z is None:
            raise DomainError(
                f"variable {j}: no element of {dom.kind.value} domain is <= {x[j]}",
                variable=j,
            )
        out[j] = z
    return out


class MuView:
    """Read-only view that rounds coordinates into their domains on access.

    Constraints on restricted instances are evaluated through this view, so a
    constraint reads ``μ_j(x)`` wherever it reads ``x[j]``.
    """

    __slots__ = ("_domains", "_eps", "_x")

    def __init__(self, x: Point, domains: Sequence[DomainSpec], eps: float) -> None:
        self._x = x
        self._domains = domains
        self._eps = eps

    def __getitem__(self, j: int) -> float:
        v = float(self._x[j])
        z = self._domains[j].floor(v, self._eps)
        if z is None:
            raise DomainError(f"variable {j}: no domain element <= {v}", variable=j)
        return z

    def __len__(self) -> int:
        return len(self._domains)
