"""Step audit log: the sequence x^0, x^1, ..., x^T of a solve."""

import json
from collections import Counter
from collections.abc import Iterator
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from monotone_cover.core.vectors import Vector
from monotone_cover.utils.errors import TraceReplayError


@dataclass(frozen=True)
class StepRecord:
    """One call to step().

    Attributes:
        constraint_id: Constraint the step was taken for
        beta: Step size
        raised: ``(j, old, new)`` for every coordinate that moved
        cost_before: Objective before the step
        cost_after: Objective after the step
    """

    constraint_id: str
    beta: float
    raised: tuple[tuple[int, float, float], ...]
    cost_before: float
    cost_after: float

    @property
    def cost_increase(self) -> float:
        return self.cost_after - self.cost_before

    def to_dict(self) -> dict[str, Any]:
        return {
            "constraint": self.constraint_id,
            "beta": self.beta,
            "raised": [[j, old, new] for j, old, new in self.raised],
            "cost_before": self.cost_before,
            "cost_after": self.cost_after,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "StepRecord":
        return cls(
            constraint_id=str(data["constraint"]),
            beta=float(data["beta"]),
            raised=tuple((int(j), float(o), float(v)) for j, o, v in data["raised"]),
            cost_before=float(data["cost_before"]),
            cost_after=float(data["cost_after"]),
        )


@dataclass
class StepTrace:
    """Ordered step records plus the start and final vectors.

    Example:
        >>> result = solve(instance)
        >>> np.array_equal(result.trace.replay(), result.x)
        True
    """

    start: Vector
    records: list[StepRecord] = field(default_factory=list)
    final_x: Vector | None = None
    final_mu: Vector | None = None
    seed: int | None = None

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[StepRecord]:
        return iter(self.records)

    def append(self, record: StepRecord) -> None:
        self.records.append(record)

    def steps_per_constraint(self) -> Counter[str]:
        """Number of steps taken for each constraint id."""
        return Counter(r.constraint_id for r in self.records)

    def points(self) -> Iterator[Vector]:
        """Yield x^0, x^1, ..., x^T.

        Raises:
            TraceReplayError: If a record's old value disagrees with the
                replayed vector
        """
        x = np.array(self.start, dtype=np.float64)
        yield x.copy()
        for t, rec in enumerate(self.records, start=1):
            for j, old, new in rec.raised:
                if not 0 <= j < len(x):
                    raise TraceReplayError(f"step {t} raises unknown variable {j}")
                if x[j] != old:
                    raise TraceReplayError(
                        f"step {t} expects x[{j}] = {old}, replay has {x[j]}"
                    )
                if new < old:
                    raise TraceReplayError(f"step {t} lowers x[{j}] from {old} to {new}")
                x[j] = new
            yield x.copy()

    def replay(self) -> Vector:
        """Final vector obtained by re-applying every record."""
        last = None
        for last in self.points():
            pass
        assert last is not None
        return last

    def to_dict(self) -> dict[str, Any]:
        return {
            "start": self.start.tolist(),
            "steps": [r.to_dict() for r in self.records],
            "final_x": None if self.final_x is None else self.final_x.tolist(),
            "final_mu": None if self.final_mu is None else self.final_mu.tolist(),
            "seed": self.seed,
        }

    def to_json(self, indent: int | None = 2) -> str:
        """Serialize for the CLI ``--trace`` flag."""
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "StepTrace":
        def vec(v: Any) -> Vector | None:
            return None if v is None else np.array(v, dtype=np.float64)

        start = vec(data["start"])
        assert start is not None
        return cls(
            start=start,
            records=[StepRecord.from_dict(r) for r in data.get("steps", [])],
            final_x=vec(data.get("final_x")),
            final_mu=vec(data.get("final_mu")),
            seed=data.get("seed"),
        )
