"""Randomized spot checks of the model assumptions.

Nothing here proves monotonicity or submodularity; the audits sample points
and report the worst violation found, so malformed user models fail fast.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from monotone_cover.core.costs import CostModel
from monotone_cover.core.instance import Instance
from monotone_cover.core.vectors import Vector

logger = logging.getLogger(__name__)

AUDIT_TOLERANCE = 1e-9


@dataclass
class AuditReport:
    """Outcome of one audit.

    Attributes:
        name: Property audited
        samples: Number of sampled cases actually checked
        violations: Human-readable descriptions of failing samples
        worst_margin: Smallest (most negative) margin seen
    """

    name: str
    samples: int = 0
    violations: list[str] = field(default_factory=list)
    worst_margin: float = float("inf")

    @property
    def passed(self) -> bool:
        return not self.violations

    def record(self, margin: float, describe: str) -> None:
        self.samples += 1
        self.worst_margin = min(self.worst_margin, margin)
        if margin < -AUDIT_TOLERANCE:
            self.violations.append(describe)

    def to_dict(self) -> dict[str, object]:
        return {
            "name": self.name,
            "passed": self.passed,
            "samples": self.samples,
            "worst_margin": self.worst_margin,
            "violations": self.violations[:10],
        }


def _box(n: int, high: float | Vector) -> Vector:
    return np.broadcast_to(np.asarray(high, dtype=np.float64), (n,)).copy()


def audit_submodularity(
    cost: CostModel, samples: int = 100, *, seed: int = 0, high: float | Vector = 4.0
) -> AuditReport:
    """Check c(x) + c(y) >= c(x ∧ y) + c(x ∨ y) on random pairs."""
    rng = np.random.default_rng(seed)
    hi = _box(cost.n, high)
    report = AuditReport("submodularity")
    for _ in range(samples):
        x = rng.uniform(0, hi)
        y = rng.uniform(0, hi)
        margin = cost(x) + cost(y) - cost(np.minimum(x, y)) - cost(np.maximum(x, y))
        report.record(margin, f"x={x.tolist()}, y={y.tolist()}")
    return report


def audit_cost_monotonicity(
    cost: CostModel, samples: int = 100, *, seed: int = 0, high: float | Vector = 4.0
) -> AuditReport:
    """Check that raising coordinates never lowers the cost, and c(0) >= 0."""
    rng = np.random.default_rng(seed)
    hi = _box(cost.n, high)
    report = AuditReport("cost-monotonicity")
    zero = np.zeros(cost.n)
    report.record(cost(zero), "c(0) < 0")
    for _ in range(samples):
        x = rng.uniform(0, hi)
        y = x + rng.uniform(0, hi) * (rng.random(cost.n) < 0.5)
        report.record(cost(y) - cost(x), f"x={x.tolist()}, y={y.tolist()}")
    return report


def audit_cost_model(
    cost: CostModel, samples: int = 100, *, seed: int = 0, high: float | Vector = 4.0
) -> list[AuditReport]:
    """Run every cost audit.

    Example:
        >>> reports = audit_cost_model(LinearCost.of([1, 2]))
        >>> all(r.passed for r in reports)
        True
    """
    return [
        audit_cost_monotonicity(cost, samples, seed=seed, high=high),
        audit_submodularity(cost, samples, seed=seed + 1, high=high),
    ]


def audit_constraint_monotonicity(
    instance: Instance, samples: int = 100, *, seed: int = 0, high: float = 4.0
) -> AuditReport:
    """Check y >= x, x ∈ S ⟹ y ∈ S on random (constraint, point, raise) triples.

    Satisfying points are found by rejection sampling in ``[0, high]ⁿ``;
    constraints that no sample satisfies are skipped.
    """
    rng = np.random.default_rng(seed)
    report = AuditReport("constraint-monotonicity")
    if not instance.constraints:
        return report
    start = instance.start_vector()
    attempts = 0
    while report.samples < samples and attempts < 50 * samples:
        attempts += 1
        s = instance.constraints[int(rng.integers(len(instance.constraints)))]
        x = start + rng.uniform(0, high, instance.n)
        if not instance.satisfies(s, x):
            continue
        y = x.copy()
        raised = rng.choice(list(s.deps), size=int(rng.integers(1, len(s.deps) + 1)))
        y[raised] += rng.uniform(0, high, len(raised))
        ok = instance.satisfies(s, y)
        report.record(0.0 if ok else -1.0, f"{s.id}: x={x.tolist()} -> y={y.tolist()}")
    if report.samples < samples:
        logger.warning(
            "constraint monotonicity audit found only %d satisfying samples", report.samples
        )
    return report
