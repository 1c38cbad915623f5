"""Split a greedy run's cost into per-step pieces and check the pieces.

With distance(x, y) = c(x ∨ y) − c(x) and the trace points x^0 … x^T, step t
owns c^t(y) = distance(x^{t−1}, y) − distance(x^t, y) and the remainder is
r(y) = distance(x^T, y). The pieces telescope:

    c(y ∨ x^0) = c(x^0) + Σ_t c^t(y) + r(y)

and each c^t is within a factor Δ of its value on any feasible point. The
Δ guarantee for x^T follows from those two facts plus r(x^T) = 0.
"""

import itertools
import logging
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np

from monotone_cover.config import eps as default_eps
from monotone_cover.config import get_config
from monotone_cover.core.costs import CostModel, LinearCost
from monotone_cover.core.instance import Instance
from monotone_cover.core.vectors import Vector, as_solution
from monotone_cover.engine.trace import StepTrace
from monotone_cover.utils.errors import InfeasibleError, PreconditionError, TraceReplayError

logger = logging.getLogger(__name__)

LATTICE_LIMIT = 10
RANDOM_PROBES = 100


def join_distance(cost: CostModel, x: Vector, y: Vector) -> float:
    """c(x ∨ y) − c(x)."""
    return cost(np.maximum(x, y)) - cost(x)


@dataclass(frozen=True)
class Decomposition:
    """Per-step cost pieces of one trace.

    Attributes:
        points: x^0, x^1, ..., x^T
        betas: Step size of each step
        constraint_ids: Constraint of each step
        cost: Objective the pieces split
        instance: Instance the trace came from, when known

    Example:
        >>> d = build_decomposition(result.trace, instance.cost)
        >>> d.r(d.points[-1])
        0.0
    """

    points: tuple[Vector, ...]
    betas: tuple[float, ...]
    constraint_ids: tuple[str, ...]
    cost: CostModel
    instance: Instance | None = field(default=None, compare=False)

    @property
    def steps(self) -> int:
        return len(self.betas)

    @property
    def n(self) -> int:
        return len(self.points[0])

    @property
    def start(self) -> Vector:
        return self.points[0]

    @property
    def final(self) -> Vector:
        return self.points[-1]

    def c_t(self, t: int, y: Vector) -> float:
        """c^t(y) for 1 <= t <= T."""
        if not 1 <= t <= self.steps:
            raise IndexError(f"step {t} outside 1..{self.steps}")
        return join_distance(self.cost, self.points[t - 1], y) - join_distance(
            self.cost, self.points[t], y
        )

    def c_t_linear(self, t: int, y: Vector) -> float:
        """Closed form Σ_j c_j |[0, y_j] ∩ [x_j^{t−1}, x_j^t]| for linear costs."""
        if not isinstance(self.cost, LinearCost):
            raise PreconditionError("closed-form pieces need a linear cost")
        lo, hi = self.points[t - 1], self.points[t]
        overlap = np.clip(np.minimum(y, hi) - lo, 0.0, None)
        return float(np.dot(self.cost.vector, overlap))

    def r(self, y: Vector) -> float:
        """r(y) = distance(x^T, y)."""
        return join_distance(self.cost, self.final, y)

    def pieces(self, y: Vector) -> list[float]:
        """[c^1(y), ..., c^T(y)]."""
        return [self.c_t(t, y) for t in range(1, self.steps + 1)]

    def telescoping_gap(self, y: Vector) -> float:
        """c(y ∨ x^0) − c(x^0) − Σ_t c^t(y) − r(y); zero up to rounding."""
        lhs = self.cost(np.maximum(y, self.start)) - self.cost(self.start)
        return lhs - sum(self.pieces(y)) - self.r(y)


def build_decomposition(
    trace: StepTrace,
    cost: CostModel | Instance,
) -> Decomposition:
    """Replay a trace and wrap its points.

    Args:
        trace: Complete step trace
        cost: Objective, or the instance the trace solved (enables the
            feasibility checks of :func:`check_property_b`)

    Raises:
        TraceReplayError: If the trace does not replay, or its replay
            disagrees with the recorded final vector
    """
    instance = cost if isinstance(cost, Instance) else None
    model = cost.cost if isinstance(cost, Instance) else cost
    points = tuple(trace.points())
    if trace.final_x is not None and not np.array_equal(points[-1], trace.final_x):
        raise TraceReplayError("replayed trace does not reach the recorded final vector")
    if len(points[0]) != model.n:
        raise TraceReplayError(f"trace has {len(points[0])} variables, cost has {model.n}")
    return Decomposition(
        points=points,
        betas=tuple(r.beta for r in trace),
        constraint_ids=tuple(r.constraint_id for r in trace),
        cost=model,
        instance=instance,
    )


def probe_vectors(
    decomp: Decomposition,
    *,
    count: int = RANDOM_PROBES,
    seed: int | None = None,
    extra: Iterable[Vector] = (),
) -> list[Vector]:
    """Probe points for the property checks.

    The corners of the box [0, max(1, x^T)] when n <= 10, otherwise
    ``count`` uniform points in that box; the trace points and ``extra``
    are always included.
    """
    top = np.maximum(decomp.final, 1.0)
    probes: list[Vector] = []
    if decomp.n <= LATTICE_LIMIT:
        for corner in itertools.product((0, 1), repeat=decomp.n):
            probes.append(np.where(np.array(corner, dtype=bool), top, 0.0))
    else:
        rng = np.random.Generator(np.random.Philox(get_config().default_seed if seed is None else seed))
        probes.extend(rng.random((count, decomp.n)) * top)
    probes.extend(p.copy() for p in decomp.points)
    probes.extend(np.asarray(v, dtype=np.float64) for v in extra)
    return probes


@dataclass
class PropertyReport:
    """Pass/fail, smallest slack and probe count of one property check."""

    name: str
    passed: bool
    min_slack: float
    probes: int
    details: dict[str, object] = field(default_factory=dict)

    def to_dict(self) -> dict[str, object]:
        return {
            "property": self.name,
            "passed": self.passed,
            "min_slack": self.min_slack,
            "probes": self.probes,
            **self.details,
        }


def check_telescoping(
    decomp: Decomposition, probes: Sequence[Vector], tol: float = 1e-9
) -> PropertyReport:
    """The telescoping identity on every probe, within ``tol`` (relative above 1)."""
    worst = 0.0
    for y in probes:
        scale = max(1.0, abs(decomp.cost(np.maximum(y, decomp.start))))
        worst = max(worst, abs(decomp.telescoping_gap(y)) / scale)
    return PropertyReport("telescoping", worst <= tol, -worst, len(probes))


def check_final_residual(decomp: Decomposition) -> PropertyReport:
    """r(x^T) = 0 exactly."""
    value = decomp.r(decomp.final)
    return PropertyReport("final-residual", value == 0.0, -abs(value), 1)


def _require_feasible(instance: Instance, x_star: Vector, tol: float) -> None:
    unmet = instance.unmet(x_star, tol)
    if unmet:
        raise InfeasibleError(
            f"reference point violates constraint {unmet[0].id}", constraint_id=unmet[0].id
        )


def check_property_b(
    decomp: Decomposition,
    x_star: Sequence[float] | Vector,
    probes: Sequence[Vector] | Vector,
    *,
    instance: Instance | None = None,
    eps: float | None = None,
) -> PropertyReport:
    """c^t(x) <= Δ·c^t(x*) for every step t and probe x.

    Also checks the chain behind it: c^t(x) <= |deps(S_t)|·β_t and
    β_t <= c^t(x*) for the recorded β_t.

    Args:
        decomp: Decomposition of a trace
        x_star: A feasible point
        probes: One probe vector or several
        instance: Instance for the feasibility test (defaults to the one
            the decomposition was built from)
        eps: Tolerance override

    Returns:
        PropertyReport; ``min_slack`` is min over (t, x) of Δ·c^t(x*) − c^t(x)

    Raises:
        PreconditionError: If no instance is available
        InfeasibleError: If x* is not feasible
    """
    tol = default_eps() if eps is None else eps
    inst = instance or decomp.instance
    if inst is None:
        raise PreconditionError("checking property (b) needs the instance for x*")
    star = as_solution(x_star, inst.n)
    _require_feasible(inst, star, tol)
    xs = [probes] if isinstance(probes, np.ndarray) and probes.ndim == 1 else list(probes)
    delta = inst.delta

    slack = math.inf
    chain = math.inf
    for t in range(1, decomp.steps + 1):
        at_star = decomp.c_t(t, star)
        beta = decomp.betas[t - 1]
        width = len(inst.constraint(decomp.constraint_ids[t - 1]).deps)
        chain = min(chain, at_star - beta)
        for y in xs:
            piece = decomp.c_t(t, y)
            slack = min(slack, delta * at_star - piece)
            chain = min(chain, width * beta - piece)
    slack = 0.0 if math.isinf(slack) else slack
    chain = 0.0 if math.isinf(chain) else chain
    passed = slack >= -tol and chain >= -tol
    if not passed:
        logger.warning("property (b) fails: slack %.3g, chain slack %.3g", slack, chain)
    return PropertyReport(
        "delta-bound",
        passed,
        slack,
        len(xs),
        {"chain_slack": chain, "delta": delta},
    )


@dataclass
class GuaranteeReport:
    """c(x^T) <= Δ·c(x*) rebuilt from the decomposition alone.

    Attributes:
        final_cost: c(x^T)
        derived: c(x^0) + Δ·Σ_t c^t(x*), the bound the pieces give
        target: Δ·c(x*)
        holds: final_cost <= derived <= target (within tolerance)
    """

    final_cost: float
    derived: float
    target: float
    holds: bool

    def to_dict(self) -> dict[str, object]:
        return {
            "final_cost": self.final_cost,
            "derived": self.derived,
            "target": self.target,
            "holds": self.holds,
        }


def replicate_guarantee(
    decomp: Decomposition,
    x_star: Sequence[float] | Vector,
    *,
    delta: int | None = None,
    eps: float | None = None,
) -> GuaranteeReport:
    """Recover the approximation bound from the three properties.

    c(x^T) = c(x^0) + Σ_t c^t(x^T) <= c(x^0) + Δ·Σ_t c^t(x*) <= Δ·c(x* ∨ x^0).

    Example:
        >>> replicate_guarantee(d, opt.x).holds
        True
    """
    tol = default_eps() if eps is None else eps
    if delta is None:
        if decomp.instance is None:
            raise PreconditionError("pass delta when the decomposition has no instance")
        delta = decomp.instance.delta
    star = as_solution(x_star, decomp.n)
    base = decomp.cost(decomp.start)
    final_cost = decomp.cost(decomp.final)
    derived = base + delta * sum(decomp.pieces(star))
    target = delta * decomp.cost(np.maximum(star, decomp.start))
    scale = max(1.0, abs(target))
    holds = final_cost <= derived + tol * scale and derived <= target + tol * scale
    return GuaranteeReport(final_cost, derived, target, holds)
