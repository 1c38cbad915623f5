"""Greedy engine: step, minimal β, the main loop and step size policies."""

from monotone_cover.engine.greedy import (
    ConstraintOrder,
    SolveResult,
    minimal_beta,
    raise_all,
    safety_limit,
    solve,
    step,
)
from monotone_cover.engine.policies import (
    CustomLowerBound,
    FixedFraction,
    InfinitesimalPolicy,
    Maximal,
    MinimalToSatisfy,
    StepSizePolicy,
    policies,
    subset_sum_beta,
    subset_sum_policy,
)
from monotone_cover.engine.trace import StepRecord, StepTrace

__all__ = [
    "ConstraintOrder",
    "CustomLowerBound",
    "FixedFraction",
    "InfinitesimalPolicy",
    "Maximal",
    "MinimalToSatisfy",
    "SolveResult",
    "StepRecord",
    "StepSizePolicy",
    "StepTrace",
    "minimal_beta",
    "policies",
    "raise_all",
    "safety_limit",
    "solve",
    "step",
    "subset_sum_beta",
    "subset_sum_policy",
]
