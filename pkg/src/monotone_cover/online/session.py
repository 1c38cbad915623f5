"""Online monotone covering: constraints arrive one at a time.

The session keeps one vector x that is only ever raised. Each revealed
constraint is met by repeated greedy steps with the minimal step size, which
is Δ-competitive against the offline optimum of everything revealed so far.
"""

import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np

from monotone_cover.config import eps as default_eps
from monotone_cover.config import get_config
from monotone_cover.core.constraints import Constraint
from monotone_cover.core.costs import CostModel
from monotone_cover.core.domains import DomainSpec
from monotone_cover.core.instance import Instance
from monotone_cover.core.vectors import Vector
from monotone_cover.engine.greedy import minimal_beta, step
from monotone_cover.engine.trace import StepTrace
from monotone_cover.utils.errors import (
    InfeasibleError,
    InvalidConstraintError,
    SafetyLimitExceededError,
    UnboundedConstraintError,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RevealRecord:
    """What one reveal did."""

    constraint_id: str
    steps: int
    cost_after: float


@dataclass
class OnlineSession:
    """Mutable state of an online run.

    Attributes:
        domains: Variable domains
        cost: Objective
        x: Current vector (never decreased)
        revealed: Constraints seen so far, in arrival order
        trace: Every step taken
        log: One record per reveal

    Example:
        >>> session = OnlineSession.start([DomainSpec.reals()] * 3, LinearCost.of([1, 1, 1]))
        >>> session.reveal(cover_row("s1", {0: 1, 1: 1}, 1)).steps
        1
    """

    domains: tuple[DomainSpec, ...]
    cost: CostModel
    x: Vector
    name: str = "online"
    revealed: list[Constraint] = field(default_factory=list)
    trace: StepTrace | None = None
    log: list[RevealRecord] = field(default_factory=list)

    @classmethod
    def start(
        cls, domains: Sequence[DomainSpec], cost: CostModel, name: str = "online"
    ) -> "OnlineSession":
        """Empty session at the start vector of ``domains``."""
        inst = Instance.build(domains, cost, (), name=name)
        x = inst.start_vector()
        return cls(tuple(inst.domains), cost, x, name, trace=StepTrace(start=x.copy()))

    @classmethod
    def for_instance(cls, instance: Instance) -> "OnlineSession":
        """Empty session over the variables and cost of ``instance``."""
        return cls.start(instance.domains, instance.cost, instance.name or "online")

    @property
    def instance(self) -> Instance:
        """The instance made of everything revealed so far."""
        return Instance(self.domains, self.cost, tuple(self.revealed), self.name)

    @property
    def total_cost(self) -> float:
        return self.cost(self.x)

    @property
    def delta(self) -> int:
        return self.instance.delta

    def reveal(self, constraint: Constraint, *, eps: float | None = None) -> RevealRecord:
        """Raise x until it meets ``constraint``.

        Raises:
            InfeasibleError: If raising deps(S) can never satisfy S
            SafetyLimitExceededError: If S needs implausibly many steps
        """
        tol = default_eps() if eps is None else eps
        bad = [j for j in constraint.deps if not 0 <= j < len(self.domains)]
        if bad:
            raise InvalidConstraintError(f"constraint {constraint.id} references unknown variables {bad}")
        self.revealed.append(constraint)
        inst = self.instance
        domains = inst.domains if inst.restricted else None
        limit = get_config().safety_factor * (len(constraint.deps) + len(self.domains))
        assert self.trace is not None
        steps = 0
        while not inst.satisfies(constraint, self.x, tol):
            if steps >= limit:
                raise SafetyLimitExceededError(
                    f"constraint {constraint.id} unmet after {limit} steps", partial_trace=self.trace
                )
            try:
                beta = minimal_beta(self.x, constraint, self.cost, domains=domains, eps=tol)
            except UnboundedConstraintError as e:
                raise InfeasibleError(str(e), constraint_id=constraint.id) from e
            new, record = step(self.x, constraint, self.cost, beta, domains=domains, eps=tol)
            assert np.all(new >= self.x), "online vector decreased"
            self.x = new
            self.trace.append(record)
            steps += 1
        record = RevealRecord(constraint.id, steps, self.total_cost)
        self.log.append(record)
        logger.debug("revealed %s: %d steps, cost %.6g", constraint.id, steps, record.cost_after)
        return record

    def reveal_all(self, constraints: Iterable[Constraint]) -> list[RevealRecord]:
        return [self.reveal(s) for s in constraints]


def online_reveal(session: OnlineSession, constraint: Constraint) -> OnlineSession:
    """Functional form of :meth:`OnlineSession.reveal`."""
    session.reveal(constraint)
    return session
