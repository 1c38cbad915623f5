"""Greedy CMIP solver in exact rational arithmetic.

Rows are processed in input order; each unmet row is stepped with the CMIP
step size until it holds. Two drivers produce bit-identical traces:

* naive: recompute the step size from scratch every step, O(|deps(S)|) each;
* heap: keep the row's state incrementally. Every positive-cost variable
  moves as x_j = x0_j + B / c_j in the cumulative budget B, so saturation
  times, integer-crossing times and coefficient ratios sit in priority queues
  and each step costs O(log Δ).

Operation counters make the running-time difference observable.
"""

import heapq
import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np

from monotone_cover.cmip.rows import CmipRow, RowData, exact
from monotone_cover.cmip.stepsize import breakdown, row_lhs
from monotone_cover.config import get_config
from monotone_cover.core.costs import LinearCost
from monotone_cover.core.domains import DomainKind
from monotone_cover.core.instance import Instance
from monotone_cover.core.vectors import Vector
from monotone_cover.engine.trace import StepRecord, StepTrace
from monotone_cover.utils.errors import InfeasibleError, UnsupportedError

logger = logging.getLogger(__name__)


def _log_cost(size: int) -> int:
    return max(1, math.ceil(math.log2(size + 1)))


@dataclass
class CmipCounters:
    """Operation counts of one solve.

    Attributes:
        stepsize_ops: Work spent computing step sizes (heap operations are
            weighted by log of the heap size)
        step_ops: Work spent applying steps
    """

    stepsize_ops: int = 0
    step_ops: int = 0

    @property
    def total(self) -> int:
        return self.stepsize_ops + self.step_ops

    def to_dict(self) -> dict[str, int]:
        return {"stepsize_ops": self.stepsize_ops, "step_ops": self.step_ops, "total": self.total}


@dataclass
class CmipResult:
    """Output of :func:`solve_cmip`.

    Attributes:
        x: Final vector (floats)
        exact: Final vector as Fractions
        mu: μ(x), integer variables floored
        cost: c(μ(x))
        trace: Step trace (None when not recorded)
        steps: Steps taken per row id
        counters: Operation counters
        delta: Δ of the instance
    """

    x: Vector
    exact: list[Fraction]
    mu: Vector
    cost: float
    trace: StepTrace | None
    steps: Counter[str] = field(default_factory=Counter)
    counters: CmipCounters = field(default_factory=CmipCounters)
    delta: int = 0

    def to_dict(self) -> dict[str, object]:
        return {
            "cost": self.cost,
            "delta": self.delta,
            "steps": sum(self.steps.values()),
            "counters": self.counters.to_dict(),
            "x": self.x.tolist(),
            "mu": self.mu.tolist(),
        }


class _Run:
    """Shared state of one solve: the exact vector, costs, trace and counters."""

    def __init__(self, instance: Instance, record_trace: bool) -> None:
        assert isinstance(instance.cost, LinearCost)
        self.c = [exact(v) for v in instance.cost.coefficients]
        self.x = [exact(float(v)) for v in instance.start_vector()]
        self.trace = StepTrace(start=instance.start_vector()) if record_trace else None
        self.counters = CmipCounters()
        self.steps: Counter[str] = Counter()

    def cost_of(self, values: dict[int, Fraction] | None = None) -> Fraction:
        x = self.x if values is None else [values.get(j, v) for j, v in enumerate(self.x)]
        return sum((c * v for c, v in zip(self.c, x, strict=True)), Fraction(0))

    def record(self, row: RowData[Fraction], beta: Fraction, new: dict[int, Fraction]) -> None:
        self.steps[row.id] += 1
        raised = tuple(
            (j, float(self.x[j]), float(v)) for j, v in sorted(new.items()) if v > self.x[j]
        )
        if self.trace is not None:
            before = self.cost_of()
            after = self.cost_of(new)
            self.trace.append(
                StepRecord(
                    constraint_id=row.id,
                    beta=float(beta),
                    raised=raised,
                    cost_before=float(before),
                    cost_after=float(after),
                )
            )
        for j, v in new.items():
            if v > self.x[j]:
                self.x[j] = v

    def satisfied(self, row: RowData[Fraction]) -> bool:
        return bool(row_lhs(row, self.x, row.I, 0) >= row.b)

    def raise_step(self, row: RowData[Fraction], beta: Fraction) -> dict[int, Fraction]:
        """New values after a step of size β; zero-cost deps clamp."""
        full = row_lhs(row, self.x, row.I, 0)
        new: dict[int, Fraction] = {}
        for j in row.deps:
            xj = self.x[j]
            if self.c[j] > 0:
                new[j] = xj + beta / self.c[j]
                continue
            cur = row.capped(j, xj)
            term = row.A[j] * (math.floor(cur) if j in row.I else cur)
            need = row.b - (full - term)
            target: Any = need / row.A[j]
            if j in row.I:
                target = Fraction(math.ceil(target))
            cap = row.u[j]
            if cap is not None:
                target = min(target, cap)
            new[j] = max(xj, target)
        return new


def _naive_row(run: _Run, row: RowData[Fraction]) -> None:
    while not run.satisfied(row):
        bd = breakdown(run.x, row, run.c, 0)
        run.counters.stepsize_ops += len(row.deps) + len(row.I) * _log_cost(len(row.I))
        run.record(row, bd.beta, run.raise_step(row, bd.beta))
        run.counters.step_ops += len(row.deps)


class _HeapRow:
    """Incremental step sizes for one row; requires every zero-cost dep saturated."""

    def __init__(self, run: _Run, row: RowData[Fraction]) -> None:
        self.run = run
        self.row = row
        self.c = run.c
        self.x0 = {j: run.x[j] for j in row.deps}
        self.B = Fraction(0)
        self.order = row.order
        self.p = 0
        self.in_j: set[int] = set()
        self.floor: dict[int, int] = {}
        self.T: dict[int, Fraction] = {}
        self.sat = {j: row.saturated(j, run.x[j], 0) for j in row.deps}
        self.F = Fraction(0)
        self.const = Fraction(0)
        self.rate = Fraction(0)
        self.sat_heap: list[tuple[Fraction, int]] = []
        self.j_heap: list[tuple[Fraction, int]] = []
        self.jbar_heap: list[tuple[Fraction, int]] = []
        ops = len(row.deps) + len(row.I) * _log_cost(len(row.I))
        for j in row.deps:
            self._suffix(j, +1)
            if self.sat[j]:
                continue
            assert self.c[j] > 0, "zero-cost dependency left unsaturated"
            cap = row.u[j]
            if cap is not None:
                self.sat_heap.append(((cap - self.x0[j]) * self.c[j], j))
            self.jbar_heap.append((self.c[j] / row.A[j], j))
        heapq.heapify(self.sat_heap)
        heapq.heapify(self.jbar_heap)
        run.counters.stepsize_ops += ops + len(self.sat_heap) + len(self.jbar_heap)

    # Lazy values

    def value(self, j: int) -> Fraction:
        if self.c[j] > 0:
            return self.x0[j] + self.B / self.c[j]
        return self.x0[j]

    def _suffix(self, j: int, sign: int) -> None:
        a = self.row.A[j]
        if self.sat[j]:
            cap = self.row.u[j]
            assert cap is not None
            self.const += sign * a * cap
        else:
            self.const += sign * a * self.x0[j]
            self.rate += sign * a / self.c[j]

    def lhs(self) -> Fraction:
        return self.F + self.const + self.rate * self.B

    def _push(self, heap: list[tuple[Fraction, int]], item: tuple[Fraction, int]) -> None:
        heapq.heappush(heap, item)
        self.run.counters.stepsize_ops += _log_cost(len(heap))

    def _pop(self, heap: list[tuple[Fraction, int]]) -> tuple[Fraction, int]:
        self.run.counters.stepsize_ops += _log_cost(len(heap))
        return heapq.heappop(heap)

    def _arm(self, j: int) -> None:
        """Schedule the next integer crossing of a J variable."""
        if self.sat[j]:
            self.T.pop(j, None)
            return
        self.T[j] = (self.floor[j] + 1 - self.x0[j]) * self.c[j]
        self._push(self.j_heap, (self.T[j], j))

    # Events

    def _advance(self) -> bool:
        """Lengthen J while the row holds with J floored; True when fully met."""
        while self.lhs() >= self.row.b:
            if self.p == len(self.order):
                return True
            j = self.order[self.p]
            self.p += 1
            self._suffix(j, -1)
            self.in_j.add(j)
            self.floor[j] = math.floor(self.row.capped(j, self.value(j)))
            self.F += self.row.A[j] * self.floor[j]
            self._arm(j)
            self.run.counters.stepsize_ops += 1
        return False

    def _settle(self) -> None:
        while self.sat_heap and self.sat_heap[0][0] <= self.B:
            _, j = self._pop(self.sat_heap)
            if self.sat[j]:
                continue
            if j in self.in_j:
                self.sat[j] = True
            else:
                self._suffix(j, -1)
                self.sat[j] = True
                self._suffix(j, +1)
        while self.j_heap and self.j_heap[0][0] <= self.B:
            key, j = self._pop(self.j_heap)
            if self.T.get(j) != key:
                continue
            new_floor = math.floor(self.row.capped(j, self.value(j)))
            self.F += self.row.A[j] * (new_floor - self.floor[j])
            self.floor[j] = new_floor
            self._arm(j)

    def _beta(self) -> Fraction:
        beta_j: Any = math.inf
        while self.j_heap:
            key, j = self.j_heap[0]
            if self.T.get(j) == key:
                beta_j = key - self.B
                break
            self._pop(self.j_heap)
        ratio = None
        while self.jbar_heap:
            r, j = self.jbar_heap[0]
            if j not in self.in_j and not self.sat[j]:
                ratio = r
                break
            self._pop(self.jbar_heap)
        slack = self.row.b - self.lhs()
        assert slack > 0
        beta_jbar: Any = math.inf if ratio is None else slack * ratio
        if beta_j == math.inf and beta_jbar == math.inf:
            raise InfeasibleError(
                f"row {self.row.id}: every variable is at its upper bound",
                constraint_id=self.row.id,
            )
        beta: Fraction = min(beta_j, beta_jbar)
        return beta

    def drive(self) -> None:
        if self._advance():
            return
        while True:
            beta = self._beta()
            self.run.counters.step_ops += 1
            if self.run.trace is not None:
                new = {
                    j: self.x0[j] + (self.B + beta) / self.c[j]
                    for j in self.row.deps
                    if self.c[j] > 0
                }
                self.run.record(self.row, beta, new)
            else:
                self.run.steps[self.row.id] += 1
            self.B += beta
            self._settle()
            if self._advance():
                break
        for j in self.row.deps:
            self.run.x[j] = max(self.run.x[j], self.value(j))
        self.run.counters.step_ops += len(self.row.deps)


def _heap_row(run: _Run, row: RowData[Fraction]) -> None:
    if not run.satisfied(row) and any(
        run.c[j] == 0 and not row.saturated(j, run.x[j], 0) for j in row.deps
    ):
        run.record(row, Fraction(0), run.raise_step(row, Fraction(0)))
        run.counters.step_ops += len(row.deps)
    if run.satisfied(row):
        return
    _HeapRow(run, row).drive()


def _check(instance: Instance) -> list[CmipRow]:
    if not isinstance(instance.cost, LinearCost):
        raise UnsupportedError("CMIP solving needs a linear cost")
    rows = []
    for s in instance.constraints:
        if not isinstance(s, CmipRow):
            raise UnsupportedError(f"constraint {s.id} is not a CMIP row")
        rows.append(s)
    integral: dict[int, bool] = {}
    for row in rows:
        for t in row.terms:
            integral[t.var] = integral.get(t.var, True) and t.integral
    for j, dom in enumerate(instance.domains):
        if dom.kind is DomainKind.REALS:
            continue
        if dom.kind is DomainKind.INTEGERS and integral.get(j, True):
            continue
        raise UnsupportedError(
            f"variable {j}: CMIP solving supports real domains and integer variables only"
        )
    return rows


def solve_cmip(
    instance: Instance,
    *,
    heap: bool | None = None,
    record_trace: bool = True,
) -> CmipResult:
    """Δ-approximate CMIP solution.

    Args:
        instance: Instance whose constraints are all CmipRows, linear cost
        heap: Use the heap driver (defaults to ``Config.heap_stepsize``)
        record_trace: Keep a StepTrace (costs O(|deps|) per step)

    Returns:
        CmipResult

    Raises:
        UnsupportedError: For non-CMIP instances
        InfeasibleError: If some row cannot be met; names the row

    Example:
        >>> row = CmipRow.build("r", {0: 10, 1: 10}, 11, u={1: 1})
        >>> solve_cmip(cmip_instance([row], [1, 0])).cost
        0.1
    """
    rows = _check(instance)
    use_heap = get_config().heap_stepsize if heap is None else heap
    run = _Run(instance, record_trace)
    drive = _heap_row if use_heap else _naive_row
    for row in rows:
        data = row.data(as_fraction=True)
        if run.satisfied(data):
            continue
        drive(run, data)  # type: ignore[arg-type]

    x = np.array([float(v) for v in run.x], dtype=np.float64)
    mu_exact = [
        Fraction(math.floor(v)) if instance.domains[j].kind is DomainKind.INTEGERS else v
        for j, v in enumerate(run.x)
    ]
    mu = np.array([float(v) for v in mu_exact], dtype=np.float64)
    if run.trace is not None:
        run.trace.final_x = x.copy()
        run.trace.final_mu = mu.copy()
    cost = float(sum((c * v for c, v in zip(run.c, mu_exact, strict=True)), Fraction(0)))
    result = CmipResult(
        x=x,
        exact=list(run.x),
        mu=mu,
        cost=cost,
        trace=run.trace,
        steps=run.steps,
        counters=run.counters,
        delta=instance.delta,
    )
    logger.info(
        "%s: %d rows, %d steps, cost %.6g, %d ops (%s driver)",
        instance.name or "cmip",
        len(rows),
        sum(run.steps.values()),
        cost,
        run.counters.total,
        "heap" if use_heap else "naive",
    )
    return result
