"""Unit tests for randomized steps, stateless steps and the Monte-Carlo harness."""

import networkx as nx
import numpy as np
import pytest

from monotone_cover.classic import vertex_cover_instance
from monotone_cover.core.constraints import FloorSumConstraint, cover_row
from monotone_cover.core.costs import LinearCost
from monotone_cover.core.domains import DomainSpec
from monotone_cover.core.instance import Instance
from monotone_cover.engine.greedy import solve, step
from monotone_cover.randomized import (
    Correlation,
    RandomStepPlan,
    Variant,
    in_domain,
    montecarlo_ratio,
    philox,
    rstep,
    run_randomized,
    stateless_plan,
    stateless_rstep,
)
from monotone_cover.utils.errors import (
    DomainError,
    InfeasibleError,
    InvalidStepSizeError,
    PreconditionError,
    SafetyLimitExceededError,
    UnsupportedError,
)


@pytest.fixture
def edge() -> FloorSumConstraint:
    """Binary edge row ⌊x0⌋ + ⌊x1⌋ >= 1.

    Returns:
        FloorSumConstraint: The row, id ``e``
    """
    return cover_row("e", {0: 1, 1: 1}, 1, integral=True)


@pytest.fixture
def triangle_instance(triangle: nx.Graph) -> Instance:
    """Binary vertex cover of the triangle.

    Args:
        triangle: Unweighted 3-cycle

    Returns:
        Instance: OPT is 2
    """
    inst, _ = vertex_cover_instance(triangle, binary=True)
    return inst


@pytest.mark.unit
class TestRandomStepPlan:
    """Test suite for RandomStepPlan and rstep."""

    def test_certain_plan_is_the_greedy_step(self, covering_row: FloorSumConstraint):
        """Test p = 1 reproduces the deterministic step.

        Args:
            covering_row: Row x0 + x1 >= 1
        """
        cost = LinearCost.of([1, 2])
        x = np.zeros(2)
        plan = RandomStepPlan.build(x, covering_row, cost, 2 / 3)

        new, record = rstep(x, covering_row, cost, plan, philox(0))
        expected, _ = step(x, covering_row, cost, 2 / 3)

        np.testing.assert_allclose(new, expected)
        assert record.beta == pytest.approx(2 / 3)
        assert [j for j, _, _ in record.raised] == [0, 1]

    def test_targets_scale_with_probability(self, covering_row: FloorSumConstraint):
        """Test X_j is priced at β/p_j and the expected charge stays β per variable.

        Args:
            covering_row: Row x0 + x1 >= 1
        """
        cost = LinearCost.of([1, 2])
        x = np.zeros(2)

        plan = RandomStepPlan.build(x, covering_row, cost, 2 / 3, 0.5)

        assert plan.targets == pytest.approx({0: 4 / 3, 1: 2 / 3})
        assert plan.expected_charge(x, cost) == pytest.approx(2 * 2 / 3)

    def test_missing_probability_keeps_value(self, covering_row: FloorSumConstraint):
        """Test variables without a probability are never raised.

        Args:
            covering_row: Row x0 + x1 >= 1
        """
        plan = RandomStepPlan.build(np.zeros(2), covering_row, LinearCost.of([1, 1]), 1.0, {0: 1.0})

        assert plan.probabilities == {0: 1.0, 1: 0.0}
        assert plan.targets[1] == 0.0
        assert plan.draw(philox(0)) == [0]

    def test_single_pick(self, covering_row: FloorSumConstraint):
        """Test oversubscribed probabilities are scaled with β.

        Args:
            covering_row: Row x0 + x1 >= 1
        """
        cost = LinearCost.of([1, 1])

        plan = RandomStepPlan.build(
            np.zeros(2), covering_row, cost, 2 / 3, 0.75, mode=Correlation.SINGLE_PICK
        )
        rng = philox(4)

        assert plan.probabilities == pytest.approx({0: 0.5, 1: 0.5})
        assert plan.beta == pytest.approx(4 / 9)
        assert plan.targets == pytest.approx({0: 8 / 9, 1: 8 / 9})
        assert all(len(plan.draw(rng)) == 1 for _ in range(50))

    def test_invalid_plans(self, covering_row: FloorSumConstraint):
        """Test probability, β and target validation.

        Args:
            covering_row: Row x0 + x1 >= 1
        """
        cost = LinearCost.of([1, 1])

        with pytest.raises(PreconditionError):
            RandomStepPlan.build(np.zeros(2), covering_row, cost, 1.0, 1.5)
        with pytest.raises(PreconditionError, match="sum"):
            RandomStepPlan({0: 0.6, 1: 0.6}, 1.0, {0: 1.0, 1: 1.0}, Correlation.SINGLE_PICK)
        with pytest.raises(PreconditionError, match="target"):
            RandomStepPlan({0: 0.5}, 1.0, {})
        with pytest.raises(InvalidStepSizeError):
            RandomStepPlan({0: 0.5}, -1.0, {0: 1.0})

    def test_satisfied_constraint(self, covering_row: FloorSumConstraint):
        """Test rstep refuses a met constraint.

        Args:
            covering_row: Row x0 + x1 >= 1
        """
        cost = LinearCost.of([1, 1])
        plan = RandomStepPlan.build(np.zeros(2), covering_row, cost, 0.5)

        with pytest.raises(PreconditionError):
            rstep(np.ones(2), covering_row, cost, plan, philox(0))

    def test_philox_is_reproducible(self):
        """Test one seed gives one stream."""
        assert philox(3).random() == philox(3).random()


@pytest.mark.unit
class TestStatelessStep:
    """Test suite for the stateless step."""

    def test_plan(self, edge: FloorSumConstraint):
        """Test the cheapest move is certain and the other proportional.

        Args:
            edge: Binary edge row
        """
        plan = stateless_plan(np.zeros(2), edge, LinearCost.of([1, 3]), [DomainSpec.binary()] * 2)

        assert plan.beta == 1.0
        assert plan.targets == {0: 1.0, 1: 1.0}
        assert plan.probabilities == pytest.approx({0: 1.0, 1: 1 / 3})

    def test_step_stays_in_domain(self, edge: FloorSumConstraint):
        """Test the cheap endpoint always moves and x stays on domain points.

        Args:
            edge: Binary edge row
        """
        domains = [DomainSpec.binary()] * 2
        rng = philox(11)

        for _ in range(20):
            x, _ = stateless_rstep(np.zeros(2), edge, LinearCost.of([1, 3]), domains, rng)
            assert x[0] == 1.0
            assert in_domain(x, domains)

    def test_free_move(self, edge: FloorSumConstraint):
        """Test zero-cost moves always happen.

        Args:
            edge: Binary edge row
        """
        plan = stateless_plan(np.zeros(2), edge, LinearCost.of([0, 2]), [DomainSpec.binary()] * 2)

        assert plan.probabilities == {0: 1.0, 1: 1.0}
        assert plan.beta == 2.0

    def test_stepped_interval(self):
        """Test the target is the next grid point."""
        row = cover_row("s", {0: 1}, 1)

        plan = stateless_plan(np.zeros(1), row, LinearCost.of([2]), [DomainSpec.interval(0, 2, 0.5)])

        assert plan.targets == {0: 0.5}
        assert plan.beta == 1.0

    def test_in_domain(self):
        """Test exact membership."""
        domains = [DomainSpec.binary(), DomainSpec.integers()]

        assert in_domain(np.array([1.0, 3.0]), domains)
        assert not in_domain(np.array([0.5, 3.0]), domains)

    def test_errors(self, edge: FloorSumConstraint):
        """Test continuous domains, off-grid values and exhausted domains.

        Args:
            edge: Binary edge row
        """
        cost = LinearCost.of([1, 1])
        binary = [DomainSpec.binary()] * 2
        high = cover_row("h", {0: 1, 1: 1}, 3, integral=True)

        with pytest.raises(UnsupportedError):
            stateless_plan(np.zeros(2), edge, cost, [DomainSpec.reals()] * 2)
        with pytest.raises(DomainError):
            stateless_plan(np.array([0.5, 0.0]), edge, cost, binary)
        with pytest.raises(InfeasibleError) as exc:
            stateless_plan(np.ones(2), high, cost, binary)
        assert exc.value.constraint_id == "h"


@pytest.mark.unit
class TestRunRandomized:
    """Test suite for run_randomized."""

    def test_certain_rstep_matches_solve(self, overlap_instance: Instance):
        """Test p ≡ 1 is the deterministic greedy.

        Args:
            overlap_instance: Two rows over three variables
        """
        run = run_randomized(overlap_instance, seed=5)

        np.testing.assert_allclose(run.x, solve(overlap_instance).x)
        assert run.seed == 5
        assert run.to_dict()["variant"] == "rstep"

    def test_seed_replays(self, overlap_instance: Instance):
        """Test the same seed gives the same run.

        Args:
            overlap_instance: Two rows over three variables
        """
        first = run_randomized(overlap_instance, probability=0.5, seed=3)
        again = run_randomized(overlap_instance, probability=0.5, seed=3)

        np.testing.assert_array_equal(first.x, again.x)
        assert overlap_instance.is_feasible(first.x)

    def test_stateless_triangle(self, triangle_instance: Instance):
        """Test unit costs make every stateless step take both endpoints.

        Args:
            triangle_instance: Binary triangle cover
        """
        run = run_randomized(triangle_instance, Variant.STATELESS, seed=7)

        assert run.mu_cost == 2.0
        assert run.steps == 1
        assert in_domain(run.x, triangle_instance.domains)

    def test_refusals(self, overlap_instance: Instance):
        """Test continuous stateless runs and zero probabilities.

        Args:
            overlap_instance: Two rows over three variables
        """
        with pytest.raises(UnsupportedError):
            run_randomized(overlap_instance, Variant.STATELESS)
        with pytest.raises(PreconditionError):
            run_randomized(overlap_instance, probability=0.0)

    def test_step_limit(self, overlap_instance: Instance):
        """Test the limit raises with the partial trace.

        Args:
            overlap_instance: Two rows over three variables
        """
        with pytest.raises(SafetyLimitExceededError) as exc:
            run_randomized(overlap_instance, max_steps=0)

        assert exc.value.partial_trace is not None
        assert len(exc.value.partial_trace) == 0


@pytest.mark.unit
class TestMonteCarlo:
    """Test suite for montecarlo_ratio."""

    def test_deterministic_triangle(self, triangle_instance: Instance):
        """Test a zero-variance sample against the oracle optimum.

        Args:
            triangle_instance: Binary triangle cover
        """
        report = montecarlo_ratio(triangle_instance, Variant.STATELESS, trials=20, seed=1)

        assert report.mean == 2.0
        assert report.stderr == 0.0
        assert report.opt == 2.0
        assert report.ratio == 1.0
        assert report.interval == (1.0, 1.0)
        assert report.bound_ok
        assert report.to_dict()["bound"] == 4.0

    def test_given_optimum(self, overlap_instance: Instance):
        """Test a supplied optimum skips the oracle.

        Args:
            overlap_instance: Two rows over three variables
        """
        report = montecarlo_ratio(overlap_instance, Variant.RSTEP, trials=3, seed=0, opt=2.0)

        assert report.mean == pytest.approx(2.5)
        assert report.ratio == pytest.approx(1.25)
        assert report.mean_steps == 2.0
        assert report.bound_ok

    def test_trials(self, triangle_instance: Instance):
        """Test at least one trial is required.

        Args:
            triangle_instance: Binary triangle cover
        """
        with pytest.raises(PreconditionError):
            montecarlo_ratio(triangle_instance, trials=0)
