"""Unit tests for the model audits."""

import numpy as np
import pytest

from monotone_cover.core.audit import (
    AuditReport,
    audit_constraint_monotonicity,
    audit_cost_model,
    audit_cost_monotonicity,
    audit_submodularity,
)
from monotone_cover.core.constraints import GenericConstraint
from monotone_cover.core.costs import FacilityLocationCost, GenericSubmodularCost, LinearCost
from monotone_cover.core.domains import DomainSpec
from monotone_cover.core.instance import Instance


def _generic(fn) -> GenericSubmodularCost:
    return GenericSubmodularCost(size=2, evaluate_fn=fn, budget_fn=lambda x, j, beta: x[j])


@pytest.mark.unit
class TestCostAudits:
    """Test suite for cost audits."""

    def test_linear_and_facility_pass(self):
        """Test the shipped models pass both audits."""
        facility = FacilityLocationCost((4.0,), ((0, 0), (1, 0)), (1.0, 1.0))

        for cost in (LinearCost.of([1, 2]), facility):
            reports = audit_cost_model(cost, samples=50)
            assert [r.name for r in reports] == ["cost-monotonicity", "submodularity"]
            assert all(r.passed for r in reports)

    def test_supermodular_cost_fails(self):
        """Test (Σx)² is caught as not submodular."""
        report = audit_submodularity(_generic(lambda x: float(np.sum(x)) ** 2), samples=100)

        assert not report.passed
        assert report.worst_margin < 0
        assert report.samples == 100

    def test_decreasing_cost_fails(self):
        """Test a decreasing cost is caught."""
        report = audit_cost_monotonicity(_generic(lambda x: 100.0 - float(np.sum(x))), samples=100)

        assert not report.passed
        assert report.samples == 101

    def test_report_to_dict(self):
        """Test violations are truncated in the serialized report."""
        report = AuditReport("x")
        for i in range(12):
            report.record(-1.0, f"case {i}")

        data = report.to_dict()
        assert data["passed"] is False
        assert data["samples"] == 12
        assert len(data["violations"]) == 10


@pytest.mark.unit
class TestConstraintAudit:
    """Test suite for the constraint monotonicity audit."""

    def test_monotone_rows_pass(self, small_instance: Instance):
        """Test covering rows are upward closed.

        Args:
            small_instance: Two-variable instance
        """
        report = audit_constraint_monotonicity(small_instance, samples=50)

        assert report.passed
        assert report.samples == 50

    def test_downward_closed_predicate_fails(self):
        """Test x0 <= 1 is reported."""
        s = GenericConstraint("low", [0], lambda x: x[0] <= 1.0)
        inst = Instance.build(DomainSpec.reals(), LinearCost.of([1]), [s])

        report = audit_constraint_monotonicity(inst, samples=50)

        assert not report.passed

    def test_no_constraints(self):
        """Test an empty instance yields an empty, passing report."""
        inst = Instance.build(DomainSpec.reals(), LinearCost.of([1]))

        report = audit_constraint_monotonicity(inst)

        assert report.passed
        assert report.samples == 0
