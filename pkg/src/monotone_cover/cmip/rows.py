"""Covering rows of a CMIP: Σ_{j∈I} A_j ⌊min(x_j, u_j)⌋ + Σ_{j∉I} A_j min(x_j, u_j) >= b."""

import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import Generic, TypeVar

from monotone_cover.core.constraints import ConstraintKind, FloorSumConstraint, Term
from monotone_cover.core.costs import LinearCost
from monotone_cover.core.domains import DomainSpec
from monotone_cover.core.instance import Instance
from monotone_cover.utils.errors import InvalidConstraintError

Num = TypeVar("Num", float, Fraction)


def exact(value: float) -> Fraction:
    """Decimal-faithful Fraction (0.1 becomes 1/10, not the binary float)."""
    return Fraction(str(value))


@dataclass(frozen=True)
class CmipRow(FloorSumConstraint):
    """One CMIP covering row.

    Example:
        >>> row = CmipRow.build("r0", {0: 3, 1: 2}, 4, I=[0], u={0: 1})
        >>> row.is_satisfied([1.0, 0.5])
        True
    """

    kind: ConstraintKind = ConstraintKind.CMIP_ROW

    @classmethod
    def build(
        cls,
        id: str,
        A: Mapping[int, float],
        b: float,
        I: Iterable[int] = (),  # noqa: E741
        u: Mapping[int, float] | None = None,
    ) -> "CmipRow":
        """Build a row from sparse coefficients.

        Raises:
            InvalidConstraintError: On non-positive coefficients, I outside
                the support, or a fractional bound on an integer variable
        """
        integral = set(I)
        bounds = dict(u or {})
        if not integral <= set(A):
            raise InvalidConstraintError(f"row {id}: I must be a subset of the row's support")
        terms = []
        for j in sorted(A):
            cap = float(bounds.get(j, math.inf))
            if j in integral and math.isfinite(cap) and cap != math.floor(cap):
                raise InvalidConstraintError(f"row {id}: integer variable {j} needs an integral bound")
            terms.append(Term(j, float(A[j]), j in integral, 1.0, cap))
        return cls(id=id, terms=tuple(terms), rhs=float(b))

    @property
    def A(self) -> dict[int, float]:  # noqa: N802
        return {t.var: t.coef for t in self.terms}

    @property
    def b(self) -> float:
        return self.rhs

    @property
    def I(self) -> frozenset[int]:  # noqa: E743, N802
        return frozenset(t.var for t in self.terms if t.integral)

    @property
    def u(self) -> dict[int, float]:
        return {t.var: t.cap for t in self.terms}

    def data(self, as_fraction: bool = False) -> "RowData[float] | RowData[Fraction]":
        """Plain-number view of the row for the stepsize routines."""
        conv = exact if as_fraction else float
        return RowData(
            id=self.id,
            A={t.var: conv(t.coef) for t in self.terms},
            b=conv(self.rhs),
            I=self.I,
            u={t.var: (None if math.isinf(t.cap) else conv(t.cap)) for t in self.terms},
        )

    def to_dict(self) -> dict[str, object]:
        return {
            "A": {str(j): a for j, a in self.A.items()},
            "b": self.b,
            "I": sorted(self.I),
            "u": {str(j): c for j, c in self.u.items() if math.isfinite(c)},
        }


@dataclass(frozen=True)
class RowData(Generic[Num]):
    """Row coefficients as plain numbers; ``u[j] is None`` means unbounded."""

    id: str
    A: dict[int, Num]
    b: Num
    I: frozenset[int]  # noqa: E741
    u: dict[int, Num | None]

    @property
    def deps(self) -> tuple[int, ...]:
        return tuple(self.A)

    @property
    def order(self) -> list[int]:
        """I by decreasing A_j, ties by ascending index."""
        return sorted(self.I, key=lambda j: (-self.A[j], j))

    def capped(self, j: int, v: Num) -> Num:
        cap = self.u[j]
        return v if cap is None or v < cap else cap

    def saturated(self, j: int, v: Num, eps: Num) -> bool:
        cap = self.u[j]
        return cap is not None and v >= cap - eps


def cmip_instance(
    rows: Sequence[CmipRow], costs: Sequence[float], name: str = "cmip"
) -> Instance:
    """Instance over ``rows`` with a linear cost.

    Variables that are integral in every row they appear in get the integer
    domain, so μ floors them; all others are continuous.
    """
    n = len(costs)
    in_rows: dict[int, list[bool]] = {}
    for row in rows:
        for t in row.terms:
            in_rows.setdefault(t.var, []).append(t.integral)
    domains = [
        DomainSpec.integers() if j in in_rows and all(in_rows[j]) else DomainSpec.reals()
        for j in range(n)
    ]
    return Instance.build(domains, LinearCost.of(costs), rows, name=name)
