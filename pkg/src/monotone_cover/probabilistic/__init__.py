"""Two-stage probabilistic covering."""

from monotone_cover.probabilistic.model import (
    CostEstimate,
    FirstStageMatrix,
    TwoStageInstance,
    estimate_total_cost,
    expected_max,
    expected_total_cost,
    first_stage_cost,
    marginal_rate,
    near_threshold,
    rates,
    threshold,
)
from monotone_cover.probabilistic.solver import ProbabilisticResult, solve_probabilistic_cmip

__all__ = [
    "CostEstimate",
    "FirstStageMatrix",
    "ProbabilisticResult",
    "TwoStageInstance",
    "estimate_total_cost",
    "expected_max",
    "expected_total_cost",
    "first_stage_cost",
    "marginal_rate",
    "near_threshold",
    "rates",
    "solve_probabilistic_cmip",
    "threshold",
]
