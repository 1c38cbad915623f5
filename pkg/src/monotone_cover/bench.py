"""Fixture benchmarks and operation-counter regressions.

``run_bench`` runs every fixture in a directory and reports wall time,
step counts, operation counters and (optionally) ratios against the exact
oracle. Counters, not wall time, back the complexity claims:
``counter_regression`` fits ops ≈ C·N·log₂Δ over a generated CMIP family
and checks that ops grow at most linearly in N.
"""

import logging
import math
import time
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from monotone_cover.classic.facility import FacilityInstance, solve_facility_location
from monotone_cover.classic.set_cover import solve_set_cover
from monotone_cover.cmip.rows import CmipRow, cmip_instance
from monotone_cover.cmip.solver import solve_cmip
from monotone_cover.core.instance import Instance
from monotone_cover.engine.greedy import solve
from monotone_cover.io.documents import DIMACS_SUFFIXES, Problem, ProblemKind, load_problem
from monotone_cover.online.upgradable import simulate_upgradable_caching
from monotone_cover.oracle.exact import exact_opt
from monotone_cover.probabilistic.solver import solve_probabilistic_cmip
from monotone_cover.randomized.montecarlo import philox
from monotone_cover.utils.errors import MonotoneCoverError, OracleUnavailableError

logger = logging.getLogger(__name__)

FIXTURE_SUFFIXES = (".json", *DIMACS_SUFFIXES)
SLOPE_LIMIT = 1.15
FAMILY_SIZES = (100, 1_000, 10_000)


@dataclass
class BenchRow:
    """One fixture's measurements.

    ``checks`` holds counter assertions (name → passed); ``error`` is set
    instead of the measurements when the fixture failed.
    """

    fixture: str
    kind: str = ""
    seconds: float = 0.0
    cost: float | None = None
    delta: int | None = None
    steps: int | None = None
    ops: int | None = None
    opt: float | None = None
    checks: dict[str, bool] = field(default_factory=dict)
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None and all(self.checks.values())

    @property
    def ratio(self) -> float | None:
        if self.opt is None or self.cost is None:
            return None
        if self.opt == 0:
            return 1.0 if self.cost == 0 else math.inf
        return self.cost / self.opt

    def to_dict(self) -> dict[str, Any]:
        return {
            "fixture": self.fixture,
            "kind": self.kind,
            "ok": self.ok,
            "seconds": self.seconds,
            "cost": self.cost,
            "delta": self.delta,
            "steps": self.steps,
            "ops": self.ops,
            "opt": self.opt,
            "ratio": self.ratio,
            "checks": dict(sorted(self.checks.items())),
            "error": self.error,
        }


@dataclass
class BenchReport:
    rows: list[BenchRow] = field(default_factory=list)

    @property
    def failures(self) -> list[BenchRow]:
        return [r for r in self.rows if not r.ok]

    def to_dict(self) -> dict[str, Any]:
        return {
            "fixtures": len(self.rows),
            "failures": len(self.failures),
            "rows": [r.to_dict() for r in self.rows],
        }


def _measure(problem: Problem, row: BenchRow) -> None:
    """Run the solver matching ``problem.kind`` once and fill ``row``."""
    match problem.kind:
        case ProblemKind.CMIP:
            instance = problem.require_instance()
            res = solve_cmip(instance, record_trace=False)
            row.cost, row.delta = res.cost, res.delta
            row.steps, row.ops = sum(res.steps.values()), res.counters.total
            row.checks["steps-per-row"] = all(
                res.steps[s.id] <= 2 * len(s.deps) for s in instance.constraints
            )
        case ProblemKind.FACILITY:
            assert problem.facility is not None
            fres = solve_facility_location(problem.facility)
            row.cost, row.delta = fres.cost, problem.facility.delta
            row.steps, row.ops = len(fres.betas), fres.touches
            row.checks["touches"] = fres.touches <= 2 * problem.facility.size
        case ProblemKind.SET_COVER:
            assert problem.set_cover is not None
            sres = solve_set_cover(problem.set_cover)
            row.cost, row.delta = sres.cost, problem.set_cover.delta
            row.steps, row.ops = len(problem.set_cover.elements), sres.touches
            row.checks["touches"] = sres.touches <= 2 * problem.set_cover.to_facility().size
        case ProblemKind.TWO_STAGE:
            assert problem.two_stage is not None
            pres = solve_probabilistic_cmip(problem.two_stage)
            row.cost = pres.cost
            row.steps, row.ops = sum(pres.steps.values()), pres.rate_ops
        case ProblemKind.UPGRADABLE:
            assert problem.cache_model is not None
            ures = simulate_upgradable_caching(problem.requests, problem.cache_model)
            row.cost, row.delta = ures.cost, ures.delta
            row.steps = len(ures.evictions)
        case _:
            instance = problem.require_instance()
            res_g = solve(instance)
            row.cost, row.delta, row.steps = res_g.mu_cost, res_g.delta, res_g.steps


def _oracle(problem: Problem, row: BenchRow, budget: int | None) -> None:
    if problem.instance is None or problem.kind is ProblemKind.UPGRADABLE:
        return
    try:
        result = exact_opt(problem.instance, budget=budget)
    except OracleUnavailableError as e:
        logger.warning("%s: %s", row.fixture, e)
        return
    if result.feasible:
        row.opt = result.value
        if row.cost is not None and row.delta is not None and not result.approximate:
            row.checks["delta-ratio"] = row.cost <= row.delta * result.value + 1e-9


def run_fixture(
    path: Path, repeat: int = 1, *, oracle: bool = False, budget: int | None = None
) -> BenchRow:
    """Benchmark one fixture file; failures land in ``BenchRow.error``."""
    row = BenchRow(fixture=path.name)
    try:
        problem = load_problem(path)
        row.kind = problem.kind.value
        start = time.perf_counter()
        for _ in range(max(1, repeat)):
            _measure(problem, row)
        row.seconds = (time.perf_counter() - start) / max(1, repeat)
        if oracle:
            _oracle(problem, row, budget)
    except MonotoneCoverError as e:
        logger.warning("fixture %s failed: %s", path.name, e)
        row.error = f"{type(e).__name__}: {e}"
    return row


def run_bench(
    directory: str | Path,
    repeat: int = 1,
    *,
    oracle: bool = False,
    budget: int | None = None,
    jobs: int = 1,
) -> BenchReport:
    """Run every fixture under ``directory`` (sorted by name).

    Args:
        directory: Folder with ``.json`` instance files and DIMACS graphs
        repeat: Runs per fixture; ``seconds`` is their mean
        oracle: Also compute OPT and the ratio where an oracle applies
        budget: Oracle state budget
        jobs: Fixtures run concurrently; each run is independent

    Raises:
        FileNotFoundError: If ``directory`` does not exist
    """
    root = Path(directory)
    if not root.is_dir():
        raise FileNotFoundError(f"benchmark directory not found: {root}")
    paths = sorted(p for p in root.iterdir() if p.suffix in FIXTURE_SUFFIXES)

    def one(p: Path) -> BenchRow:
        return run_fixture(p, repeat, oracle=oracle, budget=budget)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(one, paths))
    else:
        rows = [one(p) for p in paths]
    report = BenchReport(rows)
    logger.info("bench %s: %d fixtures, %d failures", root, len(rows), len(report.failures))
    return report


# Generated families


def cmip_family(
    n: int, seed: int = 0, *, delta: int = 4, integral: float = 0.5
) -> Instance:
    """Random feasible CMIP with n variables and n rows of ``delta`` terms each.

    Variables are integer with probability ``integral`` (in every row they
    appear in); integer variables get a finite bound when the row stays
    satisfiable with it.
    """
    if delta > n:
        raise ValueError(f"delta={delta} exceeds n={n}")
    rng = philox(seed)
    is_int = rng.random(n) < integral
    costs = rng.integers(1, 10, size=n).astype(float)
    rows = []
    for i in range(n):
        deps = sorted(int(j) for j in rng.choice(n, size=delta, replace=False))
        A = {j: int(a) for j, a in zip(deps, rng.integers(1, 10, size=delta), strict=True)}
        b = int(rng.integers(1, 30))
        I = [j for j in deps if is_int[j]]  # noqa: E741
        u = {j: int(rng.integers(1, 4)) for j in I}
        if all(is_int[j] for j in deps) and sum(A[j] * u[j] for j in deps) < b:
            u = {}
        rows.append(CmipRow.build(f"r{i}", A, b, I=I, u=u))
    return cmip_instance(rows, costs.tolist(), name=f"cmip-family-{n}")


def facility_family(
    customers: int, facilities: int, seed: int = 0, *, degree: int = 3
) -> FacilityInstance:
    """Random facility instance; each customer may use ``degree`` facilities."""
    rng = philox(seed)
    opening = rng.integers(1, 20, size=facilities).astype(float).tolist()
    rows = []
    for _ in range(customers):
        facs = rng.choice(facilities, size=min(degree, facilities), replace=False)
        rows.append({int(j): float(rng.integers(0, 10)) for j in facs})
    return FacilityInstance.build(opening, rows)


@dataclass
class CounterPoint:
    n: int
    size: int
    delta: int
    ops: int
    steps: int
    max_row_ratio: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "N": self.size,
            "delta": self.delta,
            "ops": self.ops,
            "steps": self.steps,
            "max_steps_per_dep": self.max_row_ratio,
        }


@dataclass
class CounterFit:
    """ops ≈ C·N·log₂Δ over a family.

    Attributes:
        points: One measurement per family member
        constant: Smallest C with ops <= C·N·log₂Δ on every member
        slope: Least-squares slope of log(ops) against log(N)
        limit: Largest accepted slope
    """

    points: list[CounterPoint]
    constant: float
    slope: float
    limit: float = SLOPE_LIMIT

    @property
    def linear(self) -> bool:
        return self.slope <= self.limit

    @property
    def steps_bounded(self) -> bool:
        return all(p.max_row_ratio <= 2.0 for p in self.points)

    def to_dict(self) -> dict[str, Any]:
        return {
            "constant": self.constant,
            "slope": self.slope,
            "limit": self.limit,
            "linear": self.linear,
            "steps_bounded": self.steps_bounded,
            "points": [p.to_dict() for p in self.points],
        }


def counter_regression(
    sizes: Sequence[int] = FAMILY_SIZES,
    seed: int = 0,
    *,
    delta: int = 4,
    heap: bool | None = None,
) -> CounterFit:
    """Solve a CMIP family and fit the operation counters.

    Raises:
        ValueError: With fewer than two sizes
    """
    if len(sizes) < 2:
        raise ValueError("counter regression needs at least two family sizes")
    points = []
    for k, n in enumerate(sizes):
        instance = cmip_family(n, seed + k, delta=delta)
        res = solve_cmip(instance, heap=heap, record_trace=False)
        ratio = max(res.steps[s.id] / len(s.deps) for s in instance.constraints)
        points.append(
            CounterPoint(
                n, instance.size, instance.delta, res.counters.total, sum(res.steps.values()), ratio
            )
        )
    constant = max(p.ops / (p.size * math.log2(max(2, p.delta))) for p in points)
    slope = float(
        np.polyfit(np.log([p.size for p in points]), np.log([max(1, p.ops) for p in points]), 1)[0]
    )
    fit = CounterFit(points, constant, slope)
    logger.info("counter fit: C=%.3f slope=%.3f over N=%s", constant, slope, [p.size for p in points])
    return fit
