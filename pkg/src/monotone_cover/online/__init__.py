"""Online covering and the caching problems built on it."""

from monotone_cover.online.connection import (
    ConnectionReport,
    Eviction,
    connection,
    simulate_connection_caching,
)
from monotone_cover.online.paging import (
    PagingReport,
    fifo_cost,
    fwf_cost,
    greedy_paging,
    lru_cost,
    simulate_paging,
)
from monotone_cover.online.segments import (
    EvictionPlan,
    PlanStep,
    SegmentProblem,
    build_segment_constraints,
    option_problem,
    retrieval_curve,
    segment_option_constraint,
    solve_segments,
)
from monotone_cover.online.session import OnlineSession, RevealRecord, online_reveal
from monotone_cover.online.traces import (
    ConnectionRequest,
    FileRequest,
    connection_inputs,
    file_inputs,
    parse_connection_trace,
    parse_file_trace,
)
from monotone_cover.online.upgradable import (
    CacheModel,
    CallbackModel,
    CapacityThreshold,
    ConflictPairs,
    UpgradableReport,
    audit_cache_model,
    simulate_upgradable_caching,
    spend_grid,
    upgradable_opt,
)

__all__ = [
    "CacheModel",
    "CallbackModel",
    "CapacityThreshold",
    "ConflictPairs",
    "ConnectionReport",
    "ConnectionRequest",
    "Eviction",
    "EvictionPlan",
    "FileRequest",
    "OnlineSession",
    "PagingReport",
    "PlanStep",
    "RevealRecord",
    "SegmentProblem",
    "UpgradableReport",
    "audit_cache_model",
    "build_segment_constraints",
    "connection",
    "connection_inputs",
    "fifo_cost",
    "file_inputs",
    "fwf_cost",
    "greedy_paging",
    "lru_cost",
    "online_reveal",
    "option_problem",
    "parse_connection_trace",
    "parse_file_trace",
    "retrieval_curve",
    "segment_option_constraint",
    "simulate_connection_caching",
    "simulate_paging",
    "simulate_upgradable_caching",
    "solve_segments",
    "spend_grid",
    "upgradable_opt",
]
