"""Monotone constraints S with dependency sets deps(S)."""

import math
from abc import ABC, abstractmethod
from collections.abc import Callable, Iterable, Mapping, Sequence
from dataclasses import dataclass
from enum import StrEnum

from monotone_cover.config import eps as default_eps
from monotone_cover.core.vectors import Point
from monotone_cover.utils.errors import InvalidConstraintError, UnboundedConstraintError


class ConstraintKind(StrEnum):
    """Constraint families."""

    FLOOR_SUM = "floor-sum"
    CMIP_ROW = "cmip-row"
    CACHABILITY = "cachability"
    GENERIC = "generic"


class Constraint(ABC):
    """Upward-closed set S ⊆ ℝ₊ⁿ whose membership reads only x[deps]."""

    id: str
    kind: ConstraintKind

    @property
    @abstractmethod
    def deps(self) -> tuple[int, ...]:
        """Indices of the variables S depends on."""

    @abstractmethod
    def is_satisfied(self, x: Point, eps: float | None = None) -> bool:
        """Membership test x ∈ S."""

    def clamp(self, j: int, x: Point) -> float:
        """Value at which raising x_j alone stops mattering.

        Used to store a finite value when a step would raise x_j without
        bound: the smallest value that satisfies S with the other coordinates
        fixed, or the point beyond which x_j no longer affects membership.
        """
        lo = float(x[j])
        if self.is_satisfied(_Patched(x, j, lo)):
            return lo
        hi = max(1.0, 2 * lo)
        for _ in range(64):
            if self.is_satisfied(_Patched(x, j, hi)):
                break
            hi *= 2
        else:
            raise UnboundedConstraintError(
                f"constraint {self.id}: raising x[{j}] alone never satisfies it"
            )
        for _ in range(64):
            mid = (lo + hi) / 2
            if self.is_satisfied(_Patched(x, j, mid)):
                hi = mid
            else:
                lo = mid
        return hi

    def breakpoints(self, j: int, x: Point, upto: float) -> list[float]:
        """Values in (x_j, upto] where membership as a function of x_j may jump."""
        return []

    def __contains__(self, x: Point) -> bool:
        return self.is_satisfied(x)


class _Patched:
    """x with one coordinate replaced, without copying."""

    __slots__ = ("_j", "_v", "_x")

    def __init__(self, x: Point, j: int, v: float) -> None:
        self._x, self._j, self._v = x, j, v

    def __getitem__(self, i: int) -> float:
        return self._v if i == self._j else float(self._x[i])


@dataclass(frozen=True)
class Term:
    """One summand ``coef * g(min(x_var, cap) / scale)`` of a floor-sum.

    ``g`` is the floor when ``integral`` is set and the identity otherwise.
    """

    var: int
    coef: float
    integral: bool = True
    scale: float = 1.0
    cap: float = math.inf

    def __post_init__(self) -> None:
        if self.var < 0:
            raise InvalidConstraintError(f"variable index must be >= 0: {self.var}")
        if not self.coef > 0 or not math.isfinite(self.coef):
            raise InvalidConstraintError(f"term on x[{self.var}] needs a positive finite coefficient")
        if not self.scale > 0:
            raise InvalidConstraintError(f"term on x[{self.var}] needs a positive scale")
        if self.cap < 0:
            raise InvalidConstraintError(f"term on x[{self.var}] has a negative cap")

    def value(self, v: float, eps: float) -> float:
        u = min(v, self.cap) / self.scale
        if self.integral:
            return self.coef * math.floor(u + eps)
        return self.coef * u

    @property
    def saturation(self) -> float:
        """Smallest x_var at which the term reaches its maximum value."""
        if math.isinf(self.cap):
            return math.inf
        if self.integral:
            return self.scale * math.floor(self.cap / self.scale + 1e-12)
        return self.cap

    def smallest_reaching(self, target: float, eps: float) -> float:
        """Smallest x_var whose term value is >= target (``inf`` if none)."""
        if target <= 0:
            return 0.0
        units = target / self.coef
        if self.integral:
            units = float(math.ceil(units - eps))
        v = units * self.scale
        if v > self.saturation + eps:
            return math.inf
        return v


@dataclass(frozen=True)
class FloorSumConstraint(Constraint):
    """Σ_t coef_t · g_t(min(x_t, cap_t) / scale_t) >= rhs.

    Covers vertex-cover edges ``⌊x_u⌋ + ⌊x_w⌋ >= 1``, subset-sum rows,
    continuous covering rows, caching overflow rows and segment combinations
    such as ``⌊x_s/3⌋ + ⌊x_t/4⌋ >= 1``.

    Example:
        >>> edge = FloorSumConstraint.of("e01", [Term(0, 1), Term(1, 1)], 1)
        >>> edge.is_satisfied([1.0, 0.3])
        True
    """

    id: str
    terms: tuple[Term, ...]
    rhs: float
    kind: ConstraintKind = ConstraintKind.FLOOR_SUM

    def __post_init__(self) -> None:
        seen = set()
        for t in self.terms:
            if t.var in seen:
                raise InvalidConstraintError(f"constraint {self.id}: x[{t.var}] appears twice")
            seen.add(t.var)
        if not math.isfinite(self.rhs):
            raise InvalidConstraintError(f"constraint {self.id}: rhs must be finite")

    @classmethod
    def of(cls, id: str, terms: Iterable[Term], rhs: float) -> "FloorSumConstraint":
        """Build from any iterable of terms."""
        return cls(id=id, terms=tuple(terms), rhs=float(rhs))

    @classmethod
    def at_least_one(cls, id: str, variables: Iterable[int]) -> "FloorSumConstraint":
        """Σ ⌊min(x_j, 1)⌋ >= 1 over ``variables``."""
        return cls.of(id, (Term(j, 1.0, True, 1.0, 1.0) for j in variables), 1.0)

    @property
    def deps(self) -> tuple[int, ...]:
        return tuple(t.var for t in self.terms)

    def term_for(self, j: int) -> Term:
        for t in self.terms:
            if t.var == j:
                return t
        raise KeyError(j)

    def lhs(self, x: Point, eps: float | None = None) -> float:
        tol = default_eps() if eps is None else eps
        return sum(t.value(float(x[t.var]), tol) for t in self.terms)

    def slack(self, x: Point, eps: float | None = None) -> float:
        """rhs minus the left-hand side (positive while unmet)."""
        return self.rhs - self.lhs(x, eps)

    def is_satisfied(self, x: Point, eps: float | None = None) -> bool:
        tol = default_eps() if eps is None else eps
        return self.lhs(x, tol) >= self.rhs - tol

    def max_lhs(self) -> float:
        """Supremum of the left-hand side over all x."""
        total = 0.0
        for t in self.terms:
            if math.isinf(t.cap):
                return math.inf
            total += t.value(t.cap, 0.0)
        return total

    def clamp(self, j: int, x: Point) -> float:
        tol = default_eps()
        t = self.term_for(j)
        xj = float(x[j])
        rest = self.lhs(x, tol) - t.value(xj, tol)
        v = t.smallest_reaching(self.rhs - rest, tol)
        return max(xj, min(v, t.saturation))

    def breakpoints(self, j: int, x: Point, upto: float) -> list[float]:
        t = self.term_for(j)
        xj = float(x[j])
        top = min(upto, t.saturation)
        if not t.integral:
            return [top] if math.isfinite(top) and top > xj else []
        out = []
        k = math.floor(xj / t.scale + 1e-12) + 1
        while k * t.scale <= top + 1e-12:
            out.append(k * t.scale)
            k += 1
            if len(out) > 100_000:
                break
        return out


class GenericConstraint(Constraint):
    """Monotone predicate over ``deps`` supplied as a callback."""

    def __init__(
        self,
        id: str,
        deps: Sequence[int],
        predicate: Callable[[Point], bool],
        *,
        kind: ConstraintKind = ConstraintKind.GENERIC,
        breakpoint_fn: Callable[[int, Point, float], list[float]] | None = None,
    ) -> None:
        self.id = id
        self.kind = kind
        self._deps = tuple(deps)
        self._predicate = predicate
        self._breakpoint_fn = breakpoint_fn

    @property
    def deps(self) -> tuple[int, ...]:
        return self._deps

    def is_satisfied(self, x: Point, eps: float | None = None) -> bool:
        return bool(self._predicate(x))

    def breakpoints(self, j: int, x: Point, upto: float) -> list[float]:
        if self._breakpoint_fn is None:
            return []
        return self._breakpoint_fn(j, x, upto)

    def __repr__(self) -> str:
        return f"GenericConstraint(id={self.id!r}, deps={self._deps})"


def cover_row(id: str, coefficients: Mapping[int, float], rhs: float, *, integral: bool = False) -> FloorSumConstraint:
    """Shorthand for Σ a_j x_j >= rhs (continuous) or Σ a_j ⌊x_j⌋ >= rhs."""
    return FloorSumConstraint.of(
        id, (Term(j, a, integral) for j, a in sorted(coefficients.items())), rhs
    )
