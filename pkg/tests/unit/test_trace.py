"""Unit tests for step traces."""

import json

import numpy as np
import pytest

from monotone_cover.core.instance import Instance
from monotone_cover.engine.greedy import solve
from monotone_cover.engine.policies import FixedFraction
from monotone_cover.engine.trace import StepRecord, StepTrace
from monotone_cover.utils.errors import TraceReplayError


@pytest.mark.unit
class TestStepTrace:
    """Test suite for StepTrace."""

    def test_replay_matches_solve(self, overlap_instance: Instance):
        """Test re-applying the records reproduces the final vector.

        Args:
            overlap_instance: Two rows over three variables
        """
        result = solve(overlap_instance, FixedFraction(0.5))

        np.testing.assert_array_equal(result.trace.replay(), result.x)
        points = list(result.trace.points())
        assert len(points) == result.steps + 1
        for before, after in zip(points, points[1:]):
            assert np.all(after >= before)

    def test_costs_chain(self, overlap_instance: Instance):
        """Test each step starts at the previous step's cost.

        Args:
            overlap_instance: Two rows over three variables
        """
        records = solve(overlap_instance).trace.records

        assert records[0].cost_before == 0.0
        assert records[1].cost_before == pytest.approx(records[0].cost_after)
        assert all(r.cost_increase >= 0 for r in records)

    def test_json_roundtrip(self, overlap_instance: Instance):
        """Test the CLI trace document reloads.

        Args:
            overlap_instance: Two rows over three variables
        """
        trace = solve(overlap_instance).trace
        trace.seed = 7

        again = StepTrace.from_dict(json.loads(trace.to_json()))

        assert again.records == trace.records
        assert again.seed == 7
        np.testing.assert_array_equal(again.final_x, trace.final_x)

    @pytest.mark.parametrize(
        ("raised", "match"),
        [
            (((5, 0.0, 1.0),), "unknown variable"),
            (((0, 0.5, 1.0),), "expects"),
            (((0, 0.0, -1.0),), "lowers"),
        ],
    )
    def test_replay_errors(self, raised, match: str):
        """Test inconsistent records are reported.

        Args:
            raised: Bad raise tuple
            match: Expected message fragment
        """
        trace = StepTrace(start=np.zeros(2))
        trace.append(StepRecord("s", 1.0, raised, 0.0, 1.0))

        with pytest.raises(TraceReplayError, match=match):
            trace.replay()

    def test_empty_trace(self):
        """Test a trace without steps replays to its start."""
        trace = StepTrace(start=np.array([1.0, 2.0]))

        np.testing.assert_array_equal(trace.replay(), [1.0, 2.0])
        assert len(trace) == 0
        assert trace.steps_per_constraint() == {}
