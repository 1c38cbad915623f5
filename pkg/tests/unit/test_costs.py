"""Unit tests for cost models."""

import math

import numpy as np
import pytest

from monotone_cover.core.costs import (
    FacilityLocationCost,
    GenericSubmodularCost,
    LinearCost,
    PiecewiseLinearCurve,
    SeparableCost,
    evaluate_cost,
    extend_cost_to_reals,
)
from monotone_cover.core.domains import DomainSpec
from monotone_cover.utils.errors import (
    DimensionError,
    InvalidCostModelError,
    InvalidSolutionError,
    UnsupportedError,
)


@pytest.mark.unit
class TestLinearCost:
    """Test suite for LinearCost."""

    def test_evaluate(self):
        """Test c(x) = Σ c_j x_j."""
        assert LinearCost.of([1, 2]).evaluate(np.array([1.0, 0.5])) == 2.0

    def test_raise_budget(self):
        """Test the largest raise within a budget."""
        cost = LinearCost.of([1, 2, 0])
        x = np.array([0.0, 1.0, 0.0])

        assert cost.raise_budget(x, 1, 1.0) == 1.5
        assert cost.raise_budget(x, 2, 1.0) == math.inf
        assert cost.raise_cost(x, 1, 3.0) == 4.0
        assert cost.raise_cost(x, 1, 0.5) == 0.0

    def test_scaled(self):
        """Test componentwise scaling."""
        assert LinearCost.of([1, 2]).scaled([2, 0.5]).coefficients == (2.0, 1.0)

    def test_negative_coefficient(self):
        """Test negative coefficients are rejected."""
        with pytest.raises(InvalidCostModelError, match="non-negative"):
            LinearCost.of([1, -1])


@pytest.mark.unit
class TestPiecewiseLinear:
    """Test suite for curves and separable costs."""

    @pytest.fixture
    def curve(self) -> PiecewiseLinearCurve:
        """Curve through (0,0), (1,2), (3,3) with tail slope 1.

        Returns:
            PiecewiseLinearCurve: Test curve
        """
        return PiecewiseLinearCurve(((0.0, 0.0), (1.0, 2.0), (3.0, 3.0)), tail_slope=1.0)

    def test_curve_values(self, curve: PiecewiseLinearCurve):
        """Test interpolation and the tail.

        Args:
            curve: Test curve
        """
        assert curve(0.5) == 1.0
        assert curve(2.0) == 2.5
        assert curve(5.0) == 5.0

    def test_inverse_max(self, curve: PiecewiseLinearCurve):
        """Test the largest argument within a value.

        Args:
            curve: Test curve
        """
        assert curve.inverse_max(2.5, 0.0) == 2.0
        assert curve.inverse_max(5.0, 0.0) == 5.0
        flat = PiecewiseLinearCurve(((0.0, 0.0), (1.0, 1.0)))
        assert flat.inverse_max(1.0, 0.0) == math.inf

    @pytest.mark.parametrize(
        ("knots", "tail"),
        [
            ((), 0.0),
            (((1.0, 0.0), (0.0, 1.0)), 0.0),
            (((0.0, 2.0), (1.0, 1.0)), 0.0),
            (((0.0, 0.0),), -1.0),
        ],
    )
    def test_invalid_curves(self, knots, tail):
        """Test malformed curves are rejected.

        Args:
            knots: Knot tuple
            tail: Tail slope
        """
        with pytest.raises(InvalidCostModelError):
            PiecewiseLinearCurve(knots, tail)

    def test_separable(self, curve: PiecewiseLinearCurve):
        """Test the separable cost built from one curve.

        Args:
            curve: Test curve
        """
        cost = SeparableCost((curve,))
        x = np.array([0.5])

        assert cost.evaluate(x) == 1.0
        assert cost.raise_budget(x, 0, 1.5) == 2.0
        assert cost.raise_cost(x, 0, 3.0) == 2.0
        assert cost.knots(x, 0) == [1.0, 3.0]
        assert cost.piecewise_linear


@pytest.mark.unit
class TestFacilityLocationCost:
    """Test suite for FacilityLocationCost."""

    @pytest.fixture
    def cost(self) -> FacilityLocationCost:
        """Two customers sharing facility 0 (opening 4, assignment 1 each).

        Returns:
            FacilityLocationCost: Test cost
        """
        return FacilityLocationCost(opening=(4.0,), pairs=((0, 0), (1, 0)), assignment=(1.0, 1.0))

    def test_evaluate(self, cost: FacilityLocationCost):
        """Test opening is charged on the largest assignment.

        Args:
            cost: Test cost
        """
        assert cost.evaluate(np.array([1.0, 0.0])) == 5.0
        assert cost.evaluate(np.array([1.0, 1.0])) == 6.0

    def test_raise_budget_below_and_above_max(self, cost: FacilityLocationCost):
        """Test the raise is cheap up to the facility max and dearer beyond.

        Args:
            cost: Test cost
        """
        x = np.array([1.0, 0.0])

        assert cost.raise_budget(x, 1, 1.0) == 1.0
        assert cost.raise_budget(x, 1, 6.0) == 2.0
        assert cost.raise_cost(x, 1, 2.0) == 6.0
        assert cost.knots(x, 1) == [1.0]

    def test_unknown_facility(self):
        """Test a pair naming a missing facility is rejected."""
        with pytest.raises(InvalidCostModelError, match="unknown facility"):
            FacilityLocationCost(opening=(1.0,), pairs=((0, 3),), assignment=(1.0,))

    def test_mismatched_assignment(self):
        """Test one assignment cost per pair is required."""
        with pytest.raises(InvalidCostModelError):
            FacilityLocationCost(opening=(1.0,), pairs=((0, 0),), assignment=())


@pytest.mark.unit
class TestCostHelpers:
    """Test suite for evaluate_cost, generic costs and real extensions."""

    def test_evaluate_cost_validates(self):
        """Test vectors are validated before evaluation."""
        cost = LinearCost.of([1, 1])

        assert evaluate_cost(cost, [1, 2]) == 3.0
        with pytest.raises(DimensionError):
            evaluate_cost(cost, [1])
        with pytest.raises(InvalidSolutionError, match="negative"):
            evaluate_cost(cost, [1, -1])
        with pytest.raises(InvalidSolutionError, match="NaN"):
            evaluate_cost(cost, [1, float("nan")])

    def test_generic_cost(self):
        """Test callbacks drive the generic model and raises never go down."""
        cost = GenericSubmodularCost(
            size=1,
            evaluate_fn=lambda x: float(np.sqrt(x[0])),
            budget_fn=lambda x, j, beta: 0.0,
        )

        assert cost.evaluate(np.array([4.0])) == 2.0
        assert cost.raise_budget(np.array([3.0]), 0, 1.0) == 3.0
        assert cost.n == 1

    def test_extend_cost_to_reals(self):
        """Test the extension interpolates between domain points."""
        cost = extend_cost_to_reals([{0: 0, 1: 4}], [DomainSpec.binary()])

        assert cost.evaluate(np.array([0.25])) == 1.0
        assert cost.evaluate(np.array([1.0])) == 4.0
        assert cost.evaluate(np.array([3.0])) == 4.0

    def test_extend_rejects_bad_tables(self):
        """Test extension errors."""
        binary = [DomainSpec.binary()]

        with pytest.raises(InvalidCostModelError, match="not in its domain"):
            extend_cost_to_reals([{0: 0, 0.5: 1}], binary)
        with pytest.raises(InvalidCostModelError):
            extend_cost_to_reals([{0: 0}, {0: 0}], binary)
        with pytest.raises(UnsupportedError):
            extend_cost_to_reals(lambda x: 0.0, binary)  # type: ignore[arg-type]
        with pytest.raises(UnsupportedError):
            extend_cost_to_reals([{}], binary)
