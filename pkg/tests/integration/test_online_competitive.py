"""Integration tests for online caching against the offline optima."""

from collections.abc import Callable

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from monotone_cover.core.instance import Instance
from monotone_cover.online import OnlineSession, simulate_connection_caching, simulate_paging
from monotone_cover.oracle import connection_opt, exact_opt

PAGES = st.lists(st.sampled_from("abcde"), min_size=1, max_size=12)
NODES = "abcd"
PAIRS = st.lists(
    st.tuples(st.sampled_from(NODES), st.sampled_from(NODES)).filter(lambda p: p[0] != p[1]),
    min_size=1,
    max_size=7,
)


@pytest.mark.integration
class TestPagingCompetitiveness:
    """Test suite for greedy paging against Belady and the exhaustive optimum."""

    @settings(max_examples=60, deadline=None)
    @given(requests=PAGES, k=st.integers(min_value=1, max_value=3))
    def test_unit_paging(self, requests: list[str], k: int):
        """Test cost <= k·OPT on unit pages.

        Args:
            requests: Page trace
            k: Cache size
        """
        report = simulate_paging(requests, k)

        assert report.opt is not None
        assert report.opt == report.baselines["belady"]
        assert report.cost <= k * report.opt + 1e-9
        assert report.delta <= k

    @settings(max_examples=30, deadline=None)
    @given(
        requests=st.lists(st.sampled_from("abcd"), min_size=1, max_size=9),
        weights=st.lists(st.integers(min_value=1, max_value=5), min_size=4, max_size=4),
    )
    def test_weighted_paging(self, requests: list[str], weights: list[int]):
        """Test the weighted run stays within k of the exhaustive optimum.

        Args:
            requests: Page trace
            weights: Fetch cost of a, b, c and d
        """
        costs = {p: float(w) for p, w in zip("abcd", weights, strict=True)}

        report = simulate_paging(requests, 2, costs=costs)

        assert report.opt is not None
        assert report.cost <= 2 * report.opt + 1e-9


@pytest.mark.integration
class TestConnectionCompetitiveness:
    """Test suite for connection caching against its optimum."""

    @settings(max_examples=40, deadline=None)
    @given(requests=PAIRS, keep_last=st.booleans())
    def test_delta_bound(self, requests: list[tuple[str, str]], keep_last: bool):
        """Test cost <= Δ·OPT with one slot per node.

        Args:
            requests: Connection trace
            keep_last: Never close the connection just requested
        """
        report = simulate_connection_caching(requests, 1, keep_last=keep_last)
        opt = connection_opt(requests, 1, keep_last=keep_last)

        assert report.cost <= max(1, report.delta) * opt + 1e-9


@pytest.mark.integration
class TestOnlineSessionOrder:
    """Test suite for revealing constraints one at a time."""

    @settings(
        max_examples=30, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture]
    )
    @given(seed=st.integers(min_value=0, max_value=10_000), data=st.data())
    def test_any_reveal_order(
        self, random_instance: Callable[..., Instance], seed: int, data: st.DataObject
    ):
        """Test the Δ bound holds whatever order the rows arrive in.

        Args:
            random_instance: Instance factory
            seed: Instance seed
            data: Hypothesis data for the permutation
        """
        inst = random_instance(seed)
        order = data.draw(st.permutations(list(inst.constraints)))
        session = OnlineSession.for_instance(inst)

        for row in order:
            session.reveal(row)

        opt = exact_opt(inst)
        assert session.total_cost <= session.delta * opt.value + 1e-9
