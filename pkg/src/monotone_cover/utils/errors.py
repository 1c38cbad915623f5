"""Custom exception classes for monotone-cover."""

from __future__ import annotations

from typing import TYPE_CHECKING, Any

if TYPE_CHECKING:
    from monotone_cover.engine.trace import StepTrace


class MonotoneCoverError(Exception):
    """Base exception for all monotone-cover errors."""

    pass


class ModelError(MonotoneCoverError):
    """Malformed problem data (vectors, domains, costs, constraints)."""

    pass


class DimensionError(ModelError):
    """Vector length does not match the variable count."""

    pass


class InvalidSolutionError(ModelError):
    """Solution vector has a NaN or negative coordinate."""

    pass


class DomainError(ModelError):
    """No domain element lies at or below a coordinate."""

    def __init__(self, message: str, variable: int) -> None:
        super().__init__(message)
        self.variable = variable


class InvalidCostModelError(ModelError):
    """Cost data is malformed or not non-decreasing."""

    pass


class InvalidConstraintError(ModelError):
    """Constraint data is malformed."""

    pass


class UnsupportedError(MonotoneCoverError):
    """Operation is not available for this kind of model."""

    pass


class SolverError(MonotoneCoverError):
    """Errors raised while running a solver."""

    pass


class PreconditionError(SolverError):
    """Operation called outside its precondition."""

    pass


class InvalidStepSizeError(SolverError):
    """Negative step size, or a non-positive one that makes no progress."""

    pass


class SafetyLimitExceededError(SolverError):
    """Solve exceeded its step limit; carries the partial trace."""

    def __init__(self, message: str, partial_trace: StepTrace) -> None:
        super().__init__(message)
        self.partial_trace = partial_trace


class InfeasibleError(SolverError):
    """Constraint (or instance) admits no feasible raise."""

    def __init__(self, message: str, constraint_id: str | None = None) -> None:
        super().__init__(message)
        self.constraint_id = constraint_id


class UnboundedConstraintError(InfeasibleError):
    """Constraint cannot be satisfied at any finite cost by raising its deps."""

    pass


class TraceReplayError(SolverError):
    """Step trace does not replay onto its recorded start vector."""

    pass


class OracleUnavailableError(MonotoneCoverError):
    """Exact enumeration exceeded its state budget."""

    pass


class InputError(MonotoneCoverError):
    """Problems with input files."""

    pass


class SchemaError(InputError):
    """Instance file failed validation.

    Attributes:
        diagnostics: ``(json_pointer, message)`` pairs, one per violation
    """

    def __init__(self, diagnostics: list[tuple[str, str]]) -> None:
        lines = "; ".join(f"{ptr or '/'}: {msg}" for ptr, msg in diagnostics)
        super().__init__(f"Schema validation failed: {lines}")
        self.diagnostics = diagnostics

    def to_dict(self) -> dict[str, Any]:
        """Diagnostics as a JSON-friendly mapping."""
        return {
            "error": "schema",
            "diagnostics": [{"pointer": p, "message": m} for p, m in self.diagnostics],
        }


class TraceParseError(InputError):
    """Request trace line could not be parsed."""

    def __init__(self, message: str, line: int) -> None:
        super().__init__(f"line {line}: {message}")
        self.line = line
