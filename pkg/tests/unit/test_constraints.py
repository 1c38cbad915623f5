"""Unit tests for monotone constraints and instances."""

import math

import numpy as np
import pytest

from monotone_cover.core.constraints import (
    ConstraintKind,
    FloorSumConstraint,
    GenericConstraint,
    Term,
    cover_row,
)
from monotone_cover.core.costs import LinearCost
from monotone_cover.core.domains import DomainSpec
from monotone_cover.core.instance import Instance
from monotone_cover.utils.errors import (
    DimensionError,
    InvalidConstraintError,
    UnboundedConstraintError,
)


@pytest.mark.unit
class TestTerm:
    """Test suite for floor-sum terms."""

    def test_value_and_saturation(self):
        """Test floor, scale and cap."""
        term = Term(0, 2.0, True, 3.0)
        capped = Term(0, 2.0, True, 3.0, cap=7.0)

        assert term.value(7.0, 1e-9) == 4.0
        assert term.saturation == math.inf
        assert capped.value(100.0, 1e-9) == 4.0
        assert capped.saturation == 6.0

    def test_smallest_reaching(self):
        """Test the smallest argument reaching a term value."""
        capped = Term(0, 2.0, True, 3.0, cap=7.0)

        assert capped.smallest_reaching(3.0, 1e-9) == 6.0
        assert capped.smallest_reaching(5.0, 1e-9) == math.inf
        assert capped.smallest_reaching(0.0, 1e-9) == 0.0
        assert Term(0, 2.0, False).smallest_reaching(3.0, 1e-9) == 1.5

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"var": -1, "coef": 1.0},
            {"var": 0, "coef": 0.0},
            {"var": 0, "coef": math.inf},
            {"var": 0, "coef": 1.0, "scale": 0.0},
            {"var": 0, "coef": 1.0, "cap": -1.0},
        ],
    )
    def test_invalid_terms(self, kwargs):
        """Test malformed terms are rejected.

        Args:
            kwargs: Term fields
        """
        with pytest.raises(InvalidConstraintError):
            Term(**kwargs)


@pytest.mark.unit
class TestFloorSumConstraint:
    """Test suite for FloorSumConstraint."""

    def test_at_least_one(self):
        """Test the vertex-cover edge form."""
        edge = FloorSumConstraint.at_least_one("e", [0, 1])

        assert edge.is_satisfied([1.0, 0.3])
        assert not edge.is_satisfied([0.9, 0.9])
        assert edge.lhs([5.0, 5.0]) == 2.0
        assert edge.max_lhs() == 2.0
        assert edge.deps == (0, 1)
        assert edge.kind is ConstraintKind.FLOOR_SUM

    def test_continuous_row(self, covering_row: FloorSumConstraint):
        """Test a continuous covering row.

        Args:
            covering_row: x0 + x1 >= 1
        """
        assert covering_row.slack([0.25, 0.25]) == 0.5
        assert covering_row.max_lhs() == math.inf
        assert [0.5, 0.5] in covering_row
        assert covering_row.clamp(0, [0.0, 0.25]) == 0.75

    def test_integral_cover_row(self):
        """Test cover_row with floors."""
        row = cover_row("r", {0: 2, 1: 1}, 3, integral=True)

        assert not row.is_satisfied([1.9, 0.9])
        assert row.is_satisfied([1.0, 1.0])

    def test_breakpoints(self):
        """Test breakpoints of integral and continuous terms."""
        row = FloorSumConstraint.of("b", [Term(0, 1, True, 2.0), Term(1, 1, False)], 10)

        assert row.breakpoints(0, [1.0, 0.0], 7.0) == [2.0, 4.0, 6.0]
        assert row.breakpoints(1, [1.0, 0.0], 3.0) == [3.0]
        assert row.breakpoints(1, [1.0, 0.0], math.inf) == []

    def test_duplicate_variable(self):
        """Test a variable may appear only once."""
        with pytest.raises(InvalidConstraintError, match="appears twice"):
            FloorSumConstraint.of("d", [Term(0, 1), Term(0, 2)], 1)

    def test_infinite_rhs(self):
        """Test the right-hand side must be finite."""
        with pytest.raises(InvalidConstraintError, match="finite"):
            FloorSumConstraint.of("d", [Term(0, 1)], math.inf)


@pytest.mark.unit
class TestGenericConstraint:
    """Test suite for callback constraints."""

    def test_predicate_and_clamp(self):
        """Test membership and the bisection clamp."""
        s = GenericConstraint("g", [0], lambda x: x[0] >= 2.5)

        assert s.is_satisfied([3.0])
        assert not s.is_satisfied([2.0])
        assert s.clamp(0, [0.0]) == pytest.approx(2.5, abs=1e-9)
        assert s.breakpoints(0, [0.0], 10.0) == []
        assert "g" in repr(s)

    def test_never_satisfied(self):
        """Test clamp fails when raising alone never helps."""
        s = GenericConstraint("never", [0], lambda x: False)

        with pytest.raises(UnboundedConstraintError):
            s.clamp(0, [0.0])

    def test_breakpoint_callback(self):
        """Test a supplied breakpoint function is used."""
        s = GenericConstraint("g", [0], lambda x: x[0] >= 1, breakpoint_fn=lambda j, x, upto: [1.0])

        assert s.breakpoints(0, [0.0], 5.0) == [1.0]


@pytest.mark.unit
class TestInstance:
    """Test suite for Instance."""

    def test_measures(self):
        """Test Δ, Δ̂ and N."""
        rows = [cover_row("a", {0: 1, 1: 1, 2: 1}, 1), cover_row("b", {0: 1}, 1)]
        inst = Instance.build(DomainSpec.reals(), LinearCost.of([1, 1, 1]), rows)

        assert inst.n == 3
        assert inst.delta == 3
        assert inst.delta_hat == 2
        assert inst.size == 4
        assert not inst.restricted
        assert inst.constraint("b").deps == (0,)
        with pytest.raises(KeyError):
            inst.constraint("missing")

    def test_empty_instance(self):
        """Test an instance without constraints."""
        inst = Instance.build(DomainSpec.reals(), LinearCost.of([1]))

        assert inst.delta == 0
        assert inst.delta_hat == 0
        assert inst.is_feasible(np.zeros(1))

    def test_restricted_reads_through_mu(self):
        """Test constraints on integer variables read the floor of x."""
        inst = Instance.build(
            DomainSpec.integers(), LinearCost.of([1, 1]), [cover_row("s", {0: 1, 1: 1}, 1)]
        )
        x = np.array([0.5, 0.6])

        assert inst.restricted
        assert [s.id for s in inst.unmet(x)] == ["s"]
        assert inst.is_feasible(np.array([1.2, 0.0]))
        np.testing.assert_array_equal(inst.mu(np.array([1.2, 0.6])), [1.0, 0.0])

    def test_start_vector(self):
        """Test x^0 is the smallest domain point."""
        inst = Instance.build(
            [DomainSpec.finite([1, 2]), DomainSpec.interval(0.5, 3)], LinearCost.of([1, 1])
        )

        np.testing.assert_array_equal(inst.start_vector(), [1.0, 0.5])

    def test_unbounded_interval_is_unrestricted(self):
        """Test [0, ∞) given as an interval counts as plain reals."""
        inst = Instance.build(DomainSpec.interval(0, math.inf), LinearCost.of([1]))

        assert not inst.restricted

    def test_with_constraints(self, small_instance: Instance):
        """Test replacing the constraint list keeps the rest.

        Args:
            small_instance: Two-variable instance
        """
        other = small_instance.with_constraints([cover_row("t", {1: 1}, 2)], name="other")

        assert other.name == "other"
        assert other.cost is small_instance.cost
        assert [s.id for s in other.constraints] == ["t"]

    def test_validation(self):
        """Test dimension, duplicate id and variable range checks."""
        cost = LinearCost.of([1, 1])

        with pytest.raises(DimensionError):
            Instance.build([DomainSpec.reals()], cost)
        with pytest.raises(InvalidConstraintError, match="duplicate"):
            Instance.build(DomainSpec.reals(), cost, [cover_row("s", {0: 1}, 1)] * 2)
        with pytest.raises(InvalidConstraintError, match="unknown variables"):
            Instance.build(DomainSpec.reals(), cost, [cover_row("s", {5: 1}, 1)])
        with pytest.raises(InvalidConstraintError, match="no variables"):
            Instance.build(DomainSpec.reals(), cost, [FloorSumConstraint.of("e", [], 1)])
