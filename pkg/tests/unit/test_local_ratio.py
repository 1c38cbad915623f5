"""Unit tests for the local-ratio decomposition and weight views."""

import networkx as nx
import numpy as np
import pytest

from monotone_cover.classic import vertex_cover_instance
from monotone_cover.core.constraints import cover_row
from monotone_cover.core.costs import GenericSubmodularCost, LinearCost
from monotone_cover.core.domains import DomainSpec
from monotone_cover.core.instance import Instance
from monotone_cover.engine.greedy import solve
from monotone_cover.local_ratio import (
    Decomposition,
    build_decomposition,
    check_final_residual,
    check_property_b,
    check_telescoping,
    join_distance,
    multilevel_weight_view,
    probe_vectors,
    replicate_guarantee,
    weight_reduction_view,
)
from monotone_cover.utils.errors import (
    InfeasibleError,
    PreconditionError,
    TraceReplayError,
    UnsupportedError,
)


@pytest.fixture
def overlap_decomposition(overlap_instance: Instance) -> Decomposition:
    """Decomposition of the default greedy run on the overlap instance.

    Args:
        overlap_instance: Two rows over three variables

    Returns:
        Decomposition: Two steps, final x = [1.25, 0.5, 0.75]
    """
    return build_decomposition(solve(overlap_instance).trace, overlap_instance)


@pytest.mark.unit
class TestDecomposition:
    """Test suite for the per-step cost pieces."""

    def test_join_distance(self):
        """Test c(x ∨ y) − c(x)."""
        cost = LinearCost.of([1, 2])

        assert join_distance(cost, np.array([1.0, 0.0]), np.array([0.0, 1.0])) == 2.0
        assert join_distance(cost, np.array([1.0, 1.0]), np.array([0.5, 0.5])) == 0.0

    def test_single_step_piece(self, small_instance: Instance):
        """Test c^1 on a hand-computed probe and its closed form.

        Args:
            small_instance: One row, costs 1 and 2
        """
        decomp = build_decomposition(solve(small_instance).trace, small_instance.cost)
        y = np.array([1.0, 0.0])

        assert decomp.steps == 1
        assert decomp.c_t(1, y) == pytest.approx(2 / 3)
        assert decomp.c_t_linear(1, y) == pytest.approx(2 / 3)
        with pytest.raises(IndexError):
            decomp.c_t(2, y)

    def test_properties_hold(self, overlap_decomposition: Decomposition):
        """Test telescoping, the final residual and the Δ bound on every probe.

        Args:
            overlap_decomposition: Two-step decomposition
        """
        probes = probe_vectors(overlap_decomposition)

        assert check_telescoping(overlap_decomposition, probes).passed
        assert overlap_decomposition.r(overlap_decomposition.final) == 0.0
        assert check_final_residual(overlap_decomposition).to_dict()["property"] == "final-residual"
        report = check_property_b(overlap_decomposition, [2, 0, 0], probes)
        assert report.passed
        assert report.name == "delta-bound"
        assert report.details["delta"] == 2

    def test_closed_form_matches(self, overlap_decomposition: Decomposition):
        """Test the linear closed form agrees with the distance definition.

        Args:
            overlap_decomposition: Two-step decomposition
        """
        for y in probe_vectors(overlap_decomposition):
            for t in (1, 2):
                assert overlap_decomposition.c_t_linear(t, y) == pytest.approx(
                    overlap_decomposition.c_t(t, y)
                )

    def test_guarantee(self, overlap_decomposition: Decomposition):
        """Test the bound rebuilt from the pieces.

        Args:
            overlap_decomposition: Two-step decomposition
        """
        report = replicate_guarantee(overlap_decomposition, [2, 0, 0])

        assert report.holds
        assert report.final_cost == pytest.approx(2.5)
        assert report.derived == pytest.approx(2.5)
        assert report.target == pytest.approx(4.0)

    def test_probe_corners(self, overlap_decomposition: Decomposition):
        """Test small instances get every corner plus the trace points.

        Args:
            overlap_decomposition: Two-step decomposition
        """
        probes = probe_vectors(overlap_decomposition, extra=[[3.0, 3.0, 3.0]])

        assert len(probes) == 8 + 3 + 1
        np.testing.assert_allclose(probes[7], [1.25, 1.0, 1.0])

    def test_probe_sampling(self):
        """Test wide instances get seeded random probes in the box."""
        decomp = Decomposition((np.zeros(11),), (), (), LinearCost.of([1.0] * 11))

        probes = probe_vectors(decomp, count=5, seed=1)
        again = probe_vectors(decomp, count=5, seed=1)

        assert len(probes) == 6
        assert all(np.all((p >= 0) & (p <= 1)) for p in probes)
        np.testing.assert_array_equal(probes[0], again[0])

    def test_reference_point_errors(self, overlap_instance: Instance, overlap_decomposition: Decomposition):
        """Test infeasible references and missing instances.

        Args:
            overlap_instance: Two rows over three variables
            overlap_decomposition: Two-step decomposition
        """
        bare = build_decomposition(solve(overlap_instance).trace, overlap_instance.cost)

        with pytest.raises(InfeasibleError):
            check_property_b(overlap_decomposition, [0, 0, 0], probe_vectors(overlap_decomposition))
        with pytest.raises(PreconditionError):
            check_property_b(bare, [2, 0, 0], np.zeros(3))
        with pytest.raises(PreconditionError):
            replicate_guarantee(bare, [2, 0, 0])
        assert replicate_guarantee(bare, [2, 0, 0], delta=2).holds

    def test_non_linear_closed_form(self):
        """Test the closed form is refused for other costs."""
        cost = GenericSubmodularCost(1, lambda x: float(x[0]), lambda x, j, b: float(x[j]) + b)
        decomp = Decomposition((np.zeros(1), np.ones(1)), (1.0,), ("s",), cost)

        with pytest.raises(PreconditionError):
            decomp.c_t_linear(1, np.ones(1))

    def test_replay_mismatch(self, overlap_instance: Instance):
        """Test a trace disagreeing with its final vector or the cost size.

        Args:
            overlap_instance: Two rows over three variables
        """
        trace = solve(overlap_instance).trace

        with pytest.raises(TraceReplayError, match="variables"):
            build_decomposition(trace, LinearCost.of([1, 1]))
        trace.final_x = np.zeros(3)
        with pytest.raises(TraceReplayError, match="final vector"):
            build_decomposition(trace, overlap_instance)


@pytest.mark.unit
class TestWeightViews:
    """Test suite for the weight reduction views."""

    def test_binary_view(self, triangle: nx.Graph):
        """Test the first edge zeroes both endpoint weights.

        Args:
            triangle: Unweighted 3-cycle
        """
        inst, _ = vertex_cover_instance(triangle, binary=True)

        view = weight_reduction_view(inst, solve(inst).trace)

        assert view.history[0].tolist() == [1.0, 1.0, 1.0]
        assert view.history[1].tolist() == [0.0, 0.0, 1.0]
        assert view.cover == {0, 1}
        assert view.reproduces_mu
        assert view.to_dict()["cover"] == [0, 1]

    def test_binary_view_refusals(self, overlap_instance: Instance):
        """Test non-binary domains are refused.

        Args:
            overlap_instance: Real-valued instance
        """
        with pytest.raises(UnsupportedError):
            weight_reduction_view(overlap_instance, solve(overlap_instance).trace)

    def test_multilevel_view(self):
        """Test per-level weights reproduce μ on {0, 1, 2} domains."""
        inst = Instance.build(
            DomainSpec.finite([0, 1, 2]),
            LinearCost.of([1, 2]),
            [cover_row("s", {0: 1, 1: 1}, 3, integral=True)],
        )

        view = multilevel_weight_view(inst, solve(inst).trace)

        assert view.history[0] == [[1.0, 1.0], [2.0, 2.0]]
        assert view.levels == [2, 1]
        assert view.reproduces_mu
        assert view.uppers == [2, 2]

    @pytest.mark.parametrize(
        "domain", [DomainSpec.integers(), DomainSpec.finite([0, 1, 2, 3, 4]), DomainSpec.finite([0, 2])]
    )
    def test_multilevel_refusals(self, domain: DomainSpec):
        """Test unbounded, tall and gapped domains.

        Args:
            domain: Domain for both variables
        """
        inst = Instance.build(domain, LinearCost.of([1, 1]), [cover_row("s", {0: 1, 1: 1}, 1, integral=True)])

        with pytest.raises(UnsupportedError):
            multilevel_weight_view(inst, solve(inst).trace)
