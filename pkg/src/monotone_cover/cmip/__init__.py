"""Covering mixed integer programs with variable upper bounds."""

from monotone_cover.cmip.rows import CmipRow, RowData, cmip_instance, exact
from monotone_cover.cmip.solver import CmipCounters, CmipResult, solve_cmip
from monotone_cover.cmip.stepsize import (
    CmipStepsizePolicy,
    StepsizeBreakdown,
    breakdown,
    cmip_stepsize,
    row_lhs,
)
from monotone_cover.engine.policies import policies

policies.register("cmip", CmipStepsizePolicy)

__all__ = [
    "CmipCounters",
    "CmipResult",
    "CmipRow",
    "CmipStepsizePolicy",
    "RowData",
    "StepsizeBreakdown",
    "breakdown",
    "cmip_instance",
    "cmip_stepsize",
    "exact",
    "row_lhs",
    "solve_cmip",
]
