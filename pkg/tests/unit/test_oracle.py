"""Unit tests for the exact oracles."""

import math

import networkx as nx
import numpy as np
import pytest

from monotone_cover.classic import FacilityInstance, vertex_cover_instance
from monotone_cover.cmip import CmipRow
from monotone_cover.config import get_config
from monotone_cover.core.constraints import cover_row
from monotone_cover.core.costs import LinearCost
from monotone_cover.core.domains import DomainSpec
from monotone_cover.core.instance import Instance
from monotone_cover.oracle import (
    LP_TOLERANCE,
    OracleBudget,
    ScheduleCosts,
    belady_faults,
    connection_opt,
    distance,
    exact_opt,
    facility_opt,
    paging_opt,
    residual,
    schedule_opt,
    two_stage_opt,
)
from monotone_cover.probabilistic import TwoStageInstance, expected_total_cost
from monotone_cover.utils.errors import InfeasibleError, OracleUnavailableError


@pytest.fixture
def triangle_cover(triangle: nx.Graph) -> Instance:
    """Binary vertex cover of the triangle.

    Args:
        triangle: Unweighted 3-cycle

    Returns:
        Instance: OPT is 2
    """
    inst, _ = vertex_cover_instance(triangle, binary=True)
    return inst


@pytest.fixture
def impossible() -> Instance:
    """⌊x0⌋ >= 2 over a binary variable.

    Returns:
        Instance: No feasible point
    """
    return Instance.build(
        DomainSpec.binary(), LinearCost.of([1]), [cover_row("high", {0: 1}, 2, integral=True)]
    )


@pytest.mark.unit
class TestExactOpt:
    """Test suite for the branch-and-bound oracle."""

    def test_binary_cover(self, triangle_cover: Instance):
        """Test the triangle needs two vertices.

        Args:
            triangle_cover: Binary triangle cover
        """
        result = exact_opt(triangle_cover)

        assert result.feasible
        assert result.value == 2.0
        assert not result.approximate
        assert not result.lp_backed
        assert triangle_cover.is_feasible(result.x)

    def test_continuous_row_uses_lp(self, small_instance: Instance):
        """Test continuous terms go through the LP.

        Args:
            small_instance: x0 + x1 >= 1 with costs 1 and 2
        """
        result = exact_opt(small_instance)

        assert result.lp_backed
        assert result.value == pytest.approx(1.0, abs=LP_TOLERANCE)
        assert result.x[0] == pytest.approx(1.0, abs=LP_TOLERANCE)

    def test_infeasible(self, impossible: Instance):
        """Test an unreachable row reports infeasibility.

        Args:
            impossible: Binary instance with rhs 2
        """
        result = exact_opt(impossible)

        assert not result.feasible
        assert result.value == math.inf
        assert result.to_dict()["value"] is None

    def test_budget(self, triangle_cover: Instance):
        """Test the state budget is enforced.

        Args:
            triangle_cover: Binary triangle cover
        """
        with pytest.raises(OracleUnavailableError):
            exact_opt(triangle_cover, budget=1)

    def test_budget_resolution(self):
        """Test ints, budgets and the configured default."""
        assert OracleBudget.resolve(5).max_states == 5
        assert OracleBudget.resolve(None).max_states == get_config().oracle_budget
        budget = OracleBudget(10)
        assert OracleBudget.resolve(budget) is budget


@pytest.mark.unit
class TestDistances:
    """Test suite for residual and distance."""

    def test_residual(self, triangle_cover: Instance):
        """Test one vertex still missing costs one.

        Args:
            triangle_cover: Binary triangle cover
        """
        assert residual(triangle_cover, [1, 0, 0]) == 1.0
        assert residual(triangle_cover, [1, 1, 0]) == 0.0

    def test_distance(self, triangle_cover: Instance):
        """Test the distance to a single edge row.

        Args:
            triangle_cover: Binary triangle cover
        """
        first = triangle_cover.constraints[0]

        assert distance(triangle_cover, np.zeros(3), first) == 1.0
        assert distance(triangle_cover, np.ones(3), first) == 0.0

    def test_unreachable(self, impossible: Instance):
        """Test infinite distances.

        Args:
            impossible: Binary instance with rhs 2
        """
        assert distance(impossible, [0], impossible.constraints[0]) == math.inf
        assert residual(impossible, [0]) == math.inf


@pytest.mark.unit
class TestCachingOracles:
    """Test suite for the offline caching optima."""

    def test_belady(self):
        """Test farthest-in-future on a cyclic trace."""
        assert belady_faults(list("abcabc"), 2) == 4
        assert paging_opt(list("abcabc"), 2) == 4.0
        with pytest.raises(ValueError):
            belady_faults(["a"], 0)

    def test_weighted_and_sized(self):
        """Test the exhaustive schedule with costs and sizes."""
        assert paging_opt(list("abca"), 2, costs={"a": 1.0, "b": 3.0, "c": 1.0}) == 5.0
        assert paging_opt(["a", "big", "a"], 2, sizes={"big": 2}) == 3.0

    def test_connections(self):
        """Test keeping or dropping the just-requested connection."""
        requests = [("a", "b"), ("a", "c"), ("a", "b")]

        assert connection_opt(requests, 1) == 2.0
        assert connection_opt(requests, 1, keep_last=False) == 1.0

    def test_schedule_budget(self):
        """Test the memo table limit."""
        with pytest.raises(OracleUnavailableError):
            schedule_opt(
                list("abcabc"),
                lambda cache: len(cache) <= 2,
                ScheduleCosts(fetch={"a": 1.0, "b": 1.0, "c": 1.0}, evict={}),
                max_states=1,
            )


@pytest.mark.unit
class TestFacilityOpt:
    """Test suite for the facility location oracle."""

    def test_enumeration(self):
        """Test the first cheapest opened set wins."""
        inst = FacilityInstance.build([3, 2, 4], [{0: 1, 1: 2}, {1: 1, 2: 0}, {0: 2, 2: 1}])

        opt = facility_opt(inst)

        assert opt.value == 9.0
        assert opt.opened == [0, 1]
        assert opt.choice == [0, 1, 0]

    def test_budget(self):
        """Test 2^m is checked against the budget."""
        inst = FacilityInstance.build([3, 2, 4], [{0: 1, 1: 2}, {1: 1, 2: 0}, {0: 2, 2: 1}])

        with pytest.raises(OracleUnavailableError):
            facility_opt(inst, max_states=4)


@pytest.mark.unit
class TestTwoStageOpt:
    """Test suite for the two-stage oracle."""

    def test_integral_rows(self):
        """Test an integral row is solved exactly."""
        inst = TwoStageInstance.build(
            [CmipRow.build("S", {0: 1}, 1, I=[0])], [4], p=0.5, W={"S": {0: 1}}
        )

        opt = two_stage_opt(inst)

        assert opt.value == 3.0
        assert not opt.approximate
        assert opt.states == 1

    def test_continuous_rows(self):
        """Test continuous rows fall back to a grid."""
        inst = TwoStageInstance.build([CmipRow.build("S", {0: 2}, 1)], [4], p=0.5)

        opt = two_stage_opt(inst, grid=0.25)

        assert opt.approximate
        assert opt.value == pytest.approx(expected_total_cost(inst, opt.X))
        assert opt.X.value("S", 0) == 0.5

    def test_limits(self):
        """Test the budget and rows no candidate can meet."""
        inst = TwoStageInstance.build([CmipRow.build("S", {0: 1}, 1, I=[0])], [4], p=0.5)
        capped = TwoStageInstance.build(
            [CmipRow.build("S", {0: 1}, 2, I=[0], u={0: 1})], [4], p=0.5
        )

        with pytest.raises(OracleUnavailableError):
            two_stage_opt(inst, max_states=1)
        with pytest.raises(InfeasibleError):
            two_stage_opt(capped)
