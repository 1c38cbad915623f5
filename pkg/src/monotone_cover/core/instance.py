"""Monotone covering instances."""

from collections import Counter
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from monotone_cover.config import eps as default_eps
from monotone_cover.core.constraints import Constraint
from monotone_cover.core.costs import CostModel
from monotone_cover.core.domains import DomainSpec, MuView, mu_round
from monotone_cover.core.vectors import Point, Vector
from monotone_cover.utils.errors import DimensionError, InvalidConstraintError


@dataclass(frozen=True)
class Instance:
    """min{c(x) : x ∈ ℝ₊ⁿ, μ(x) ∈ S for all S} with per-variable domains.

    Instances are immutable and safe to share across threads.

    Attributes:
        domains: U_j per variable
        cost: Objective
        constraints: Ordered constraint list
        name: Free-form label used in reports
    """

    domains: tuple[DomainSpec, ...]
    cost: CostModel
    constraints: tuple[Constraint, ...] = ()
    name: str = ""
    meta: dict[str, object] = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self) -> None:
        if self.cost.n != len(self.domains):
            raise DimensionError(
                f"cost has {self.cost.n} variables but {len(self.domains)} domains were given"
            )
        ids = Counter(s.id for s in self.constraints)
        dupes = [i for i, c in ids.items() if c > 1]
        if dupes:
            raise InvalidConstraintError(f"duplicate constraint ids: {dupes}")
        for s in self.constraints:
            if not s.deps:
                raise InvalidConstraintError(f"constraint {s.id} has no variables")
            bad = [j for j in s.deps if not 0 <= j < self.n]
            if bad:
                raise InvalidConstraintError(f"constraint {s.id} references unknown variables {bad}")

    @classmethod
    def build(
        cls,
        domains: Sequence[DomainSpec] | DomainSpec,
        cost: CostModel,
        constraints: Sequence[Constraint] = (),
        name: str = "",
    ) -> "Instance":
        """Build an instance; a single DomainSpec is broadcast to all variables."""
        if isinstance(domains, DomainSpec):
            domains = [domains] * cost.n
        return cls(tuple(domains), cost, tuple(constraints), name)

    @property
    def n(self) -> int:
        """Variable count."""
        return len(self.domains)

    @property
    def delta(self) -> int:
        """Δ = max_S |deps(S)| (0 without constraints)."""
        return max((len(s.deps) for s in self.constraints), default=0)

    @property
    def delta_hat(self) -> int:
        """Δ̂ = maximum number of constraints any variable appears in."""
        counts = Counter(j for s in self.constraints for j in s.deps)
        return max(counts.values(), default=0)

    @property
    def size(self) -> int:
        """N = Σ_S |deps(S)|."""
        return sum(len(s.deps) for s in self.constraints)

    @property
    def restricted(self) -> bool:
        """True when some domain is not all of ℝ₊."""
        return any(not (d.is_continuous and d.minimum == 0.0 and d.maximum == float("inf")) for d in self.domains)

    def constraint(self, constraint_id: str) -> Constraint:
        """Look a constraint up by id."""
        for s in self.constraints:
            if s.id == constraint_id:
                return s
        raise KeyError(constraint_id)

    def start_vector(self) -> Vector:
        """x^0: zero, or min U_j where 0 ∉ U_j."""
        return np.array([d.minimum for d in self.domains], dtype=np.float64)

    def view(self, x: Point, eps: float | None = None) -> Point:
        """What constraints read: x itself, or μ(x) on restricted instances."""
        if not self.restricted:
            return x
        return MuView(x, self.domains, default_eps() if eps is None else eps)

    def satisfies(self, s: Constraint, x: Point, eps: float | None = None) -> bool:
        """μ(x) ∈ S."""
        return s.is_satisfied(self.view(x, eps), eps)

    def unmet(self, x: Point, eps: float | None = None) -> list[Constraint]:
        """Constraints not yet satisfied by μ(x), in order."""
        return [s for s in self.constraints if not self.satisfies(s, x, eps)]

    def is_feasible(self, x: Point, eps: float | None = None) -> bool:
        """True when μ(x) meets every constraint."""
        return not self.unmet(x, eps)

    def mu(self, x: Vector, eps: float | None = None) -> Vector:
        """μ(x)."""
        return mu_round(self.domains, x, eps)

    def with_constraints(self, constraints: Sequence[Constraint], name: str | None = None) -> "Instance":
        """Same variables and cost, different constraint list."""
        return Instance(self.domains, self.cost, tuple(constraints), self.name if name is None else name)
