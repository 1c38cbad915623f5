"""Exhaustive two-stage optimum over per-row minimal feasible points."""

import itertools
import logging
import math
from dataclasses import dataclass

import numpy as np

from monotone_cover.config import get_config
from monotone_cover.probabilistic.model import (
    FirstStageMatrix,
    TwoStageInstance,
    expected_total_cost,
)
from monotone_cover.utils.errors import InfeasibleError, OracleUnavailableError

logger = logging.getLogger(__name__)

DEFAULT_GRID = 0.25


@dataclass
class TwoStageOpt:
    """Best first stage found.

    ``approximate`` is set when some row has continuous variables, so the
    candidates are a grid and the value is only an upper bound on OPT.
    """

    X: FirstStageMatrix
    value: float
    approximate: bool
    states: int


def _candidates(inst: TwoStageInstance, sid: str, j: int, grid: float) -> list[float]:
    row = inst.row(sid)
    a = row.A[j]
    cap = row.u[j]
    reach = row.b / a
    top = min(cap, math.ceil(reach)) if j in row.I else min(cap, reach)
    if j in row.I:
        return [float(v) for v in range(int(top) + 1)]
    count = int(math.floor(top / grid + 1e-9))
    points = {round(k * grid, 12) for k in range(count + 1)} | {float(top)}
    return sorted(points)


def _minimal_points(inst: TwoStageInstance, sid: str, grid: float, budget: int) -> list[dict[int, float]]:
    """Feasible points of one row that no other feasible candidate lies below."""
    row = inst.row(sid)
    deps = row.deps
    options = [_candidates(inst, sid, j, grid) for j in deps]
    if math.prod(len(o) for o in options) > budget:
        raise OracleUnavailableError(f"row {sid}: candidate grid exceeds the oracle budget")
    feasible = []
    for combo in itertools.product(*options):
        x = np.zeros(inst.n)
        for j, v in zip(deps, combo, strict=True):
            x[j] = v
        if row.is_satisfied(x):
            feasible.append(combo)
    minimal = [
        p
        for p in feasible
        if not any(q != p and all(a <= b for a, b in zip(q, p, strict=True)) for q in feasible)
    ]
    if not minimal:
        raise InfeasibleError(f"row {sid} has no feasible candidate", constraint_id=sid)
    return [dict(zip(deps, p, strict=True)) for p in minimal]


def two_stage_opt(
    inst: TwoStageInstance,
    *,
    grid: float = DEFAULT_GRID,
    max_states: int | None = None,
) -> TwoStageOpt:
    """Minimize C(X) by enumerating every row's minimal feasible candidates.

    Exact when every row variable is integral (C is non-decreasing in X, so
    some optimum uses only minimal integer points); a grid search otherwise.

    Raises:
        OracleUnavailableError: If the joint enumeration exceeds the budget
        InfeasibleError: If some row has no feasible candidate
    """
    budget = get_config().oracle_budget if max_states is None else max_states
    per_row = [_minimal_points(inst, r.id, grid, budget) for r in inst.rows]
    total = math.prod(len(p) for p in per_row)
    if total > budget:
        raise OracleUnavailableError(f"{total} first-stage combinations exceed the oracle budget")
    approximate = any(set(r.deps) - r.I for r in inst.rows)
    if approximate:
        logger.warning("%s: continuous first-stage variables; grid oracle is approximate", inst.name)

    best = FirstStageMatrix({r.id: {} for r in inst.rows})
    best_value = math.inf
    for choice in itertools.product(*per_row):
        X = FirstStageMatrix({r.id: dict(col) for r, col in zip(inst.rows, choice, strict=True)})
        value = expected_total_cost(inst, X)
        if value < best_value:
            best, best_value = X, value
    return TwoStageOpt(X=best, value=best_value, approximate=approximate, states=total)
