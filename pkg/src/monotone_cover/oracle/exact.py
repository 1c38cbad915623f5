"""Exact branch-and-bound oracle for small monotone covering instances.

Every variable gets a finite list of options: the anchor value (x_j, or the
domain minimum) plus each value at which some constraint reading x_j can
change, up to the point where x_j alone would satisfy or saturate every
constraint it appears in. Costs are non-decreasing, so the cheapest
representative of each option is enough.

Variables with a continuous contribution to a floor-sum row cannot be
enumerated. Under a linear cost they become LP columns bounded by the
interval between two consecutive floor breakpoints, and each leaf of the
search solves the remaining covering LP with HiGHS. Other cost models fall
back to a grid and the result is flagged ``approximate``.
"""

import logging
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from monotone_cover.config import eps as default_eps
from monotone_cover.config import get_config
from monotone_cover.core.constraints import Constraint, FloorSumConstraint
from monotone_cover.core.costs import LinearCost
from monotone_cover.core.domains import DomainKind
from monotone_cover.core.instance import Instance
from monotone_cover.core.vectors import Vector, as_solution
from monotone_cover.utils.errors import OracleUnavailableError, UnboundedConstraintError

logger = logging.getLogger(__name__)

GRID_POINTS = 9
LP_TOLERANCE = 1e-7


@dataclass(frozen=True)
class OracleBudget:
    """Limits for one oracle call.

    Attributes:
        max_states: Search nodes allowed before giving up
        candidates: Optional per-variable candidate values overriding the
            derived ones (caller-certified)
    """

    max_states: int
    candidates: Mapping[int, Sequence[float]] = field(default_factory=dict)

    @classmethod
    def default(cls) -> "OracleBudget":
        """Budget from the global configuration."""
        return cls(get_config().oracle_budget)

    @classmethod
    def resolve(cls, budget: "OracleBudget | int | None") -> "OracleBudget":
        if budget is None:
            return cls.default()
        if isinstance(budget, int):
            return cls(budget)
        return budget


@dataclass
class OracleResult:
    """Outcome of an exact search.

    Attributes:
        x: Optimal point, or None when infeasible
        value: Optimal cost (``inf`` when infeasible)
        feasible: False when no candidate satisfies every constraint
        approximate: True when some variable was searched on a grid
        lp_backed: True when the value came from an LP solve (compare with
            tolerance ``LP_TOLERANCE``)
        states: Search nodes visited
    """

    x: Vector | None
    value: float
    feasible: bool
    approximate: bool = False
    lp_backed: bool = False
    states: int = 0

    def to_dict(self) -> dict[str, object]:
        return {
            "value": self.value if self.feasible else None,
            "feasible": self.feasible,
            "approximate": self.approximate,
            "lp_backed": self.lp_backed,
            "states": self.states,
            "x": None if self.x is None else self.x.tolist(),
        }


@dataclass
class _Var:
    j: int
    options: list[tuple[float, float]]
    lp: bool = False


class _Search:
    """Depth-first branch and bound over per-variable options."""

    def __init__(
        self,
        instance: Instance,
        constraints: Sequence[Constraint],
        anchor: Vector,
        budget: OracleBudget,
        eps: float,
    ) -> None:
        self.instance = instance
        self.constraints = list(constraints)
        self.anchor = anchor
        self.budget = budget
        self.eps = eps
        self.approximate = False
        self.lp_backed = False
        self.states = 0
        self.best_value = math.inf
        self.best_x: Vector | None = None
        self.touching: dict[int, list[Constraint]] = {}
        for s in self.constraints:
            for j in s.deps:
                self.touching.setdefault(j, []).append(s)
        self.linear = isinstance(instance.cost, LinearCost)
        self.vars = [self._options(j) for j in sorted(self.touching)]

    # Candidate construction

    def _reach(self, j: int) -> float:
        """Largest value of x_j worth considering."""
        a = float(self.anchor[j])
        m = a
        for s in self.touching[j]:
            if isinstance(s, FloorSumConstraint):
                t = s.term_for(j)
                m = max(m, min(t.smallest_reaching(s.rhs, self.eps), t.saturation))
            else:
                try:
                    m = max(m, s.clamp(j, self.instance.view(self.anchor, self.eps)))
                except UnboundedConstraintError:
                    continue
        dom = self.instance.domains[j]
        up = dom.ceil(m, self.eps)
        return max(a, dom.maximum if up is None else up)

    def _options(self, j: int) -> _Var:
        a = float(self.anchor[j])
        if j in self.budget.candidates:
            vals = sorted({a} | {float(v) for v in self.budget.candidates[j] if v > a})
            return _Var(j, [(v, v) for v in vals])

        dom = self.instance.domains[j]
        top = self._reach(j)
        generic = any(not isinstance(s, FloorSumConstraint) for s in self.touching[j])
        continuous_term = any(
            isinstance(s, FloorSumConstraint) and not s.term_for(j).integral
            for s in self.touching[j]
        )

        if not dom.is_continuous:
            if dom.kind is DomainKind.FINITE or not generic:
                pts = dom.points_between(a, top)
            else:
                self.approximate = True
                pts = dom.points_between(a, top, limit=64)
            vals = sorted({a, *pts})
            return _Var(j, [(v, v) for v in vals])

        levels = {a}
        view = self.instance.view(self.anchor, self.eps)
        for s in self.touching[j]:
            levels.update(v for v in s.breakpoints(j, view, top) if a < v <= top)
        levels_sorted = sorted(levels)

        if generic or (continuous_term and not self.linear):
            self.approximate = True
            grid = set(levels_sorted) | set(np.linspace(a, top, GRID_POINTS).tolist())
            vals = sorted(v for v in grid if a <= v <= top)
            return _Var(j, [(v, v) for v in vals])
        if continuous_term:
            bounds = list(zip(levels_sorted, [*levels_sorted[1:], max(top, levels_sorted[-1])], strict=True))
            return _Var(j, bounds, lp=True)
        return _Var(j, [(v, v) for v in levels_sorted])

    # Search

    def run(self) -> OracleResult:
        lo = self.anchor.copy()
        hi = self.anchor.copy()
        for v in self.vars:
            hi[v.j] = v.options[-1][1]
        if any(not self.instance.satisfies(s, hi, self.eps) for s in self.constraints):
            return self._result()
        self._dfs(0, lo, hi)
        return self._result()

    def _result(self) -> OracleResult:
        feasible = self.best_x is not None
        return OracleResult(
            x=self.best_x,
            value=self.best_value,
            feasible=feasible,
            approximate=self.approximate,
            lp_backed=self.lp_backed and feasible,
            states=self.states,
        )

    def _dfs(self, i: int, lo: Vector, hi: Vector) -> None:
        self.states += 1
        if self.states > self.budget.max_states:
            raise OracleUnavailableError(
                f"exact search exceeded {self.budget.max_states} states"
            )
        if i == len(self.vars):
            self._leaf(lo)
            return
        var = self.vars[i]
        j = var.j
        saved_lo, saved_hi = lo[j], hi[j]
        for low, high in var.options:
            lo[j], hi[j] = low, high
            if self.instance.cost(lo) >= self.best_value - self.eps:
                # options are ascending, so every later one costs at least as much
                break
            if all(self.instance.satisfies(s, hi, self.eps) for s in self.touching[j]):
                self._dfs(i + 1, lo, hi)
        lo[j], hi[j] = saved_lo, saved_hi

    def _leaf(self, lo: Vector) -> None:
        lp_vars = [v.j for v in self.vars if v.lp]
        if not lp_vars:
            value = self.instance.cost(lo)
            if value < self.best_value:
                self.best_value, self.best_x = value, lo.copy()
            return
        solved = self._solve_lp(lo, lp_vars)
        if solved is not None and solved[0] < self.best_value:
            self.best_value, self.best_x = solved
            self.lp_backed = True

    def _solve_lp(self, lo: Vector, lp_vars: list[int]) -> tuple[float, Vector] | None:
        assert isinstance(self.instance.cost, LinearCost)
        coef = self.instance.cost.coefficients
        col = {j: k for k, j in enumerate(lp_vars)}
        bounds: list[tuple[float, float | None]] = []
        upper = {v.j: v for v in self.vars if v.lp}
        for j in lp_vars:
            k = next(idx for idx, (l, _) in enumerate(upper[j].options) if l == lo[j])
            bounds.append(upper[j].options[k])
        objective = [coef[j] for j in lp_vars]
        rows: list[dict[int, float]] = []
        rhs: list[float] = []
        links: list[tuple[int, int]] = []
        view = self.instance.view(lo, self.eps)
        lp_set = set(lp_vars)
        for s in self.constraints:
            if not lp_set.intersection(s.deps):
                continue
            assert isinstance(s, FloorSumConstraint)
            fixed = 0.0
            row: dict[int, float] = {}
            for t in s.terms:
                if t.var in col and not t.integral:
                    z = len(bounds)
                    bounds.append((0.0, None if math.isinf(t.cap) else t.cap))
                    objective.append(0.0)
                    links.append((z, col[t.var]))
                    row[z] = t.coef / t.scale
                else:
                    fixed += t.value(float(view[t.var]), self.eps)
            need = s.rhs - fixed
            if need <= self.eps:
                continue
            if not row:
                return None
            rows.append(row)
            rhs.append(need)
        width = len(bounds)
        a_ub = []
        b_ub = []
        for row, need in zip(rows, rhs, strict=True):
            line = np.zeros(width)
            for k, a in row.items():
                line[k] = -a
            a_ub.append(line)
            b_ub.append(-need)
        for z, v in links:
            line = np.zeros(width)
            line[z], line[v] = 1.0, -1.0
            a_ub.append(line)
            b_ub.append(0.0)
        res = linprog(
            np.array(objective),
            A_ub=np.array(a_ub) if a_ub else None,
            b_ub=np.array(b_ub) if b_ub else None,
            bounds=bounds,
            method="highs",
        )
        if res.status != 0:
            return None
        x = lo.copy()
        for j, k in col.items():
            x[j] = max(float(res.x[k]), bounds[k][0])
        return self.instance.cost(x), x


def _search(
    instance: Instance,
    constraints: Sequence[Constraint],
    anchor: Vector,
    budget: "OracleBudget | int | None",
    eps: float | None,
) -> OracleResult:
    tol = default_eps() if eps is None else eps
    search = _Search(instance, constraints, anchor, OracleBudget.resolve(budget), tol)
    result = search.run()
    if result.approximate:
        logger.warning(
            "%s: oracle searched a grid for some variables; result is approximate",
            instance.name or "instance",
        )
    logger.debug("oracle visited %d states", result.states)
    return result


def exact_opt(
    instance: Instance,
    *,
    budget: OracleBudget | int | None = None,
    eps: float | None = None,
) -> OracleResult:
    """min c(x) over x >= start with μ(x) in every constraint.

    Args:
        instance: Problem instance
        budget: State budget (an int, an OracleBudget, or the configured default)
        eps: Tolerance override

    Returns:
        OracleResult; ``feasible`` is False when no candidate survives

    Raises:
        OracleUnavailableError: If the search exceeds its budget

    Example:
        >>> exact_opt(triangle_vertex_cover).value
        2.0
    """
    return _search(instance, instance.constraints, instance.start_vector(), budget, eps)


def residual(
    instance: Instance,
    x: Sequence[float] | Vector,
    *,
    budget: OracleBudget | int | None = None,
    eps: float | None = None,
) -> float:
    """Minimum cost increase taking x to full feasibility (``inf`` if none).

    Raises:
        OracleUnavailableError: If the search exceeds its budget
    """
    point = as_solution(x, instance.n)
    if instance.is_feasible(point, eps):
        return 0.0
    result = _search(instance, instance.constraints, point, budget, eps)
    if not result.feasible:
        return math.inf
    return max(0.0, result.value - instance.cost(point))


def distance(
    instance: Instance,
    x: Sequence[float] | Vector,
    constraint: Constraint,
    *,
    budget: OracleBudget | int | None = None,
    eps: float | None = None,
) -> float:
    """distance_c(x, S): minimum cost increase taking x into one constraint.

    Example:
        >>> distance(running_example, np.zeros(2), running_example.constraints[0])
        1.0
    """
    point = as_solution(x, instance.n)
    if instance.satisfies(constraint, point, eps):
        return 0.0
    result = _search(instance, [constraint], point, budget, eps)
    if not result.feasible:
        return math.inf
    return max(0.0, result.value - instance.cost(point))
