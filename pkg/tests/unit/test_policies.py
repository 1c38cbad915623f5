"""Unit tests for step size policies."""

import math

import numpy as np
import pytest

from monotone_cover.core.constraints import FloorSumConstraint
from monotone_cover.core.costs import GenericSubmodularCost
from monotone_cover.core.domains import DomainSpec
from monotone_cover.core.instance import Instance
from monotone_cover.engine.greedy import solve
from monotone_cover.engine.policies import (
    CustomLowerBound,
    FixedFraction,
    InfinitesimalPolicy,
    Maximal,
    MinimalToSatisfy,
    StepSizePolicy,
    policies,
    subset_sum_beta,
    subset_sum_policy,
)
from monotone_cover.utils.errors import UnsupportedError


@pytest.mark.unit
class TestPolicies:
    """Test suite for the shipped policies."""

    def test_minimal(self, small_instance: Instance, covering_row: FloorSumConstraint):
        """Test the default policy.

        Args:
            small_instance: x0 + x1 >= 1 with costs 1, 2
            covering_row: Its only row
        """
        assert MinimalToSatisfy()(np.zeros(2), covering_row, small_instance) == pytest.approx(2 / 3)

    def test_fixed_fraction(self, small_instance: Instance, covering_row: FloorSumConstraint):
        """Test half the minimal β plus the tail.

        Args:
            small_instance: x0 + x1 >= 1 with costs 1, 2
            covering_row: Its only row
        """
        beta = FixedFraction(0.5)(np.zeros(2), covering_row, small_instance)

        assert beta == pytest.approx(0.5 * 2 / 3 + 1e-6)

    @pytest.mark.parametrize("fraction", [0.0, -0.5, 1.5])
    def test_fixed_fraction_range(self, fraction: float):
        """Test the fraction must lie in (0, 1].

        Args:
            fraction: Rejected fraction
        """
        with pytest.raises(ValueError, match="fraction"):
            FixedFraction(fraction)

    def test_infinitesimal(self, small_instance: Instance, covering_row: FloorSumConstraint):
        """Test each step spends at most the resolution.

        Args:
            small_instance: x0 + x1 >= 1 with costs 1, 2
            covering_row: Its only row
        """
        assert InfinitesimalPolicy(0.1)(np.zeros(2), covering_row, small_instance) == 0.1
        assert InfinitesimalPolicy(1.0)(
            np.zeros(2), covering_row, small_instance
        ) == pytest.approx(2 / 3)
        with pytest.raises(ValueError):
            InfinitesimalPolicy(0.0)

    def test_infinitesimal_solve(self, small_instance: Instance):
        """Test the small-step process ends at the same cost on one row.

        Args:
            small_instance: x0 + x1 >= 1 with costs 1, 2
        """
        result = solve(small_instance, InfinitesimalPolicy(0.05))

        assert result.steps == 14
        assert result.cost == pytest.approx(4 / 3)

    def test_maximal(self, small_instance: Instance, covering_row: FloorSumConstraint):
        """Test β equals the oracle distance.

        Args:
            small_instance: x0 + x1 >= 1 with costs 1, 2
            covering_row: Its only row
        """
        assert Maximal()(np.zeros(2), covering_row, small_instance) == pytest.approx(1.0, abs=1e-7)

    def test_custom(self, small_instance: Instance, covering_row: FloorSumConstraint):
        """Test a caller-supplied rule is passed through.

        Args:
            small_instance: x0 + x1 >= 1 with costs 1, 2
            covering_row: Its only row
        """
        policy = CustomLowerBound(lambda x, s, inst: 0.25, name="quarter")

        assert policy(np.zeros(2), covering_row, small_instance) == 0.25
        assert isinstance(policy, StepSizePolicy)


@pytest.mark.unit
class TestSubsetSum:
    """Test suite for the subset-sum rule."""

    def test_cheapest_completion(self, small_instance: Instance, covering_row: FloorSumConstraint):
        """Test β = min c_j (1 − x_j).

        Args:
            small_instance: x0 + x1 >= 1 with costs 1, 2
            covering_row: Its only row
        """
        assert subset_sum_beta(np.array([0.5, 0.0]), covering_row, small_instance) == 0.5
        assert subset_sum_beta(np.ones(2), covering_row, small_instance) == math.inf
        assert subset_sum_policy().name == "subset-sum"

    def test_needs_linear_cost(self, covering_row: FloorSumConstraint):
        """Test non-linear costs are refused.

        Args:
            covering_row: x0 + x1 >= 1
        """
        cost = GenericSubmodularCost(2, lambda x: 0.0, lambda x, j, b: float(x[j]) + b)
        inst = Instance.build(DomainSpec.reals(), cost, [covering_row])

        with pytest.raises(UnsupportedError):
            subset_sum_beta(np.zeros(2), covering_row, inst)


@pytest.mark.unit
class TestPolicyRegistry:
    """Test suite for name lookup."""

    def test_builtin_names(self):
        """Test the shipped policies are registered."""
        assert {"minimal", "maximal", "fraction", "infinitesimal", "subset-sum"} <= set(
            policies.names
        )
        assert policies.create("fraction").name == "fraction"

    def test_unknown_name(self):
        """Test a helpful error for unknown names."""
        with pytest.raises(ValueError, match="unknown policy 'nope'"):
            policies.create("nope")
