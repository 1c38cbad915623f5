"""Randomized and stateless variants of the greedy step."""

from monotone_cover.randomized.montecarlo import (
    MonteCarloReport,
    RandomizedRun,
    Variant,
    montecarlo_ratio,
    philox,
    run_randomized,
)
from monotone_cover.randomized.rstep import Correlation, RandomStepPlan, rstep
from monotone_cover.randomized.stateless import in_domain, stateless_plan, stateless_rstep

__all__ = [
    "Correlation",
    "MonteCarloReport",
    "RandomStepPlan",
    "RandomizedRun",
    "Variant",
    "in_domain",
    "montecarlo_ratio",
    "philox",
    "rstep",
    "run_randomized",
    "stateless_plan",
    "stateless_rstep",
]
