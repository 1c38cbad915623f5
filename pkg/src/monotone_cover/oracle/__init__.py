"""Exact small-instance oracles: the ground truth for every guarantee check."""

from monotone_cover.oracle.caching import (
    ScheduleCosts,
    belady_faults,
    connection_opt,
    paging_opt,
    schedule_opt,
)
from monotone_cover.oracle.exact import (
    LP_TOLERANCE,
    OracleBudget,
    OracleResult,
    distance,
    exact_opt,
    residual,
)
from monotone_cover.oracle.facility import FacilityOpt, facility_opt
from monotone_cover.oracle.two_stage import TwoStageOpt, two_stage_opt

__all__ = [
    "LP_TOLERANCE",
    "FacilityOpt",
    "OracleBudget",
    "OracleResult",
    "ScheduleCosts",
    "TwoStageOpt",
    "belady_faults",
    "connection_opt",
    "distance",
    "exact_opt",
    "facility_opt",
    "paging_opt",
    "residual",
    "schedule_opt",
    "two_stage_opt",
]
