"""Greedy for two-stage probabilistic CMIP.

Each row S is driven to feasibility on its own vector x^S. A step prices the
variables with the marginal rates c′ (constant until x^S_j reaches the next
threshold t_j) and takes β = min(β_t, CMIP step size under c′), where β_t is
the cheapest way to bring some x^S_j up to its threshold.
"""

import logging
import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from monotone_cover.cmip.stepsize import breakdown
from monotone_cover.config import eps as default_eps
from monotone_cover.config import get_config
from monotone_cover.engine.trace import StepRecord, StepTrace
from monotone_cover.probabilistic.model import (
    FirstStageMatrix,
    TwoStageInstance,
    expected_total_cost,
    rates,
    threshold,
)
from monotone_cover.utils.errors import InvalidStepSizeError, SafetyLimitExceededError

logger = logging.getLogger(__name__)


@dataclass
class ProbabilisticResult:
    """Output of :func:`solve_probabilistic_cmip`.

    Attributes:
        X: Committed first stage (integer coordinates floored, caps applied)
        raw: First stage as the greedy left it
        trace: Steps over the flattened (row, variable) layout
        cost: C(X) of the committed first stage
        steps: Steps per row id
        threshold_crossings: Steps that brought some x^S_j to its threshold
        rate_ops: Marginal-rate evaluations (one per touching row)
    """

    X: FirstStageMatrix
    raw: FirstStageMatrix
    trace: StepTrace
    cost: float
    steps: Counter[str] = field(default_factory=Counter)
    threshold_crossings: int = 0
    rate_ops: int = 0

    def to_dict(self) -> dict[str, object]:
        return {
            "cost": self.cost,
            "steps": sum(self.steps.values()),
            "threshold_crossings": self.threshold_crossings,
            "rate_ops": self.rate_ops,
            "X": self.X.to_dict(),
        }


def step_limit(inst: TwoStageInstance) -> int:
    """Per-row step limit: the counting bound times the configured safety factor."""
    bound = max(1, 2 * inst.delta + inst.delta * inst.delta_hat)
    return get_config().safety_factor * bound


def solve_probabilistic_cmip(
    inst: TwoStageInstance, *, eps: float | None = None
) -> ProbabilisticResult:
    """Δ-approximate first stage for a two-stage CMIP.

    Args:
        inst: Two-stage instance with a linear second-stage cost
        eps: Tolerance override

    Returns:
        ProbabilisticResult

    Raises:
        InfeasibleError: If some row cannot be met
        UnsupportedError: For a non-linear second-stage cost
        SafetyLimitExceededError: If a row needs more steps than allowed

    Example:
        >>> row = CmipRow.build("S", {0: 1}, 1, I=[0])
        >>> inst = TwoStageInstance.build([row], [4], p=0.5, W={"S": {0: 1}})
        >>> solve_probabilistic_cmip(inst).cost
        3.0
    """
    tol = default_eps() if eps is None else eps
    X = FirstStageMatrix.zeros(inst)
    layout = inst.layout()
    position = {key: i for i, key in enumerate(layout)}
    trace = StepTrace(start=np.zeros(len(layout)))
    steps: Counter[str] = Counter()
    crossings = 0
    rate_ops = 0
    limit = step_limit(inst)

    for row in inst.rows:
        data = row.data()
        col = X.columns[row.id]
        while not row.is_satisfied(X.vector(row.id, inst.n), tol):
            if steps[row.id] >= limit:
                raise SafetyLimitExceededError(
                    f"row {row.id} exceeded {limit} steps", partial_trace=trace
                )
            cprime = rates(inst, X, row.id)
            rate_ops += sum(len(inst.touching(j)) for j in row.deps)
            t = {j: threshold(inst, X, row.id, j) for j in row.deps}
            beta_t = min(
                ((t[j] - col[j]) * cprime[j] for j in row.deps if math.isfinite(t[j]) and cprime[j] > 0),
                default=math.inf,
            )
            beta = min(beta_t, breakdown(col, data, cprime, tol).beta)

            dense = X.vector(row.id, inst.n)
            raised = []
            crossed = False
            for j in row.deps:
                old = col[j]
                new = old + beta / cprime[j] if cprime[j] > 0 else min(t[j], row.clamp(j, dense))
                if math.isfinite(t[j]) and new >= t[j] - tol:
                    new = t[j]
                    crossed = True
                if new > old:
                    raised.append((position[(row.id, j)], old, new))
            if not raised:
                raise InvalidStepSizeError(f"row {row.id}: step of size {beta} raised nothing")

            before = expected_total_cost(inst, X)
            for pos, _, new in raised:
                col[layout[pos][1]] = new
            trace.append(
                StepRecord(
                    constraint_id=row.id,
                    beta=float(beta),
                    raised=tuple(raised),
                    cost_before=before,
                    cost_after=expected_total_cost(inst, X),
                )
            )
            steps[row.id] += 1
            crossings += int(crossed)
            logger.debug("row %s: beta=%.6g, %d raised", row.id, beta, len(raised))

    raw = X.copy()
    committed = X.copy()
    for row in inst.rows:
        caps = row.u
        for j, v in committed.columns[row.id].items():
            v = min(v, caps[j])
            if j in row.I:
                v = float(math.floor(v + tol))
            committed.columns[row.id][j] = v
    trace.final_x = raw.flat(inst)
    trace.final_mu = committed.flat(inst)
    cost = expected_total_cost(inst, committed)
    logger.info(
        "%s: %d rows, %d steps, %d threshold crossings, C(X) = %.6g",
        inst.name,
        len(inst.rows),
        sum(steps.values()),
        crossings,
        cost,
    )
    return ProbabilisticResult(
        X=committed,
        raw=raw,
        trace=trace,
        cost=cost,
        steps=steps,
        threshold_crossings=crossings,
        rate_ops=rate_ops,
    )
