"""Utility modules for monotone-cover."""

from monotone_cover.utils.errors import (
    DimensionError,
    DomainError,
    InfeasibleError,
    InputError,
    InvalidConstraintError,
    InvalidCostModelError,
    InvalidSolutionError,
    InvalidStepSizeError,
    ModelError,
    MonotoneCoverError,
    OracleUnavailableError,
    PreconditionError,
    SafetyLimitExceededError,
    SchemaError,
    SolverError,
    TraceParseError,
    TraceReplayError,
    UnboundedConstraintError,
    UnsupportedError,
)
from monotone_cover.utils.logging import configure_logging

__all__ = [
    "DimensionError",
    "DomainError",
    "InfeasibleError",
    "InputError",
    "InvalidConstraintError",
    "InvalidCostModelError",
    "InvalidSolutionError",
    "InvalidStepSizeError",
    "ModelError",
    "MonotoneCoverError",
    "OracleUnavailableError",
    "PreconditionError",
    "SafetyLimitExceededError",
    "SchemaError",
    "SolverError",
    "TraceParseError",
    "TraceReplayError",
    "UnboundedConstraintError",
    "UnsupportedError",
    "configure_logging",
]
