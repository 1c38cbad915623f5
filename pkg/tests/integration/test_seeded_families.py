"""Seeded family sweeps at full size: hundreds of instances per family, checked against the oracles."""

import networkx as nx
import numpy as np
import pytest

from monotone_cover.bench import cmip_family, facility_family
from monotone_cover.classic import (
    SetCoverInstance,
    solve_facility_location,
    solve_set_cover,
    vertex_cover_instance,
)
from monotone_cover.cmip import solve_cmip
from monotone_cover.engine.greedy import solve
from monotone_cover.online import simulate_paging
from monotone_cover.oracle import LP_TOLERANCE, exact_opt, facility_opt

FAMILY_SIZE = 500


@pytest.mark.integration
@pytest.mark.slow
class TestDeltaFamilies:
    """Test suite for cost <= Δ·OPT over 500 seeded instances per family."""

    def test_vertex_cover(self):
        """Test weighted binary vertex cover on graphs of up to 12 vertices."""
        for seed in range(FAMILY_SIZE):
            rng = np.random.default_rng(seed)
            graph = nx.gnp_random_graph(int(rng.integers(2, 13)), 0.35, seed=seed)
            for v in graph.nodes:
                graph.nodes[v]["weight"] = float(rng.integers(1, 6))
            inst, _ = vertex_cover_instance(graph, binary=True)

            result = solve(inst)
            opt = exact_opt(inst)

            assert result.mu_cost <= 2 * opt.value + 1e-9, f"seed {seed}"

    def test_set_cover(self):
        """Test weighted set cover with up to 12 sets over 10 elements."""
        for seed in range(FAMILY_SIZE):
            rng = np.random.default_rng(seed)
            family = {
                f"S{i}": {int(e) for e in rng.choice(10, size=int(rng.integers(1, 5)), replace=False)}
                for i in range(int(rng.integers(2, 13)))
            }
            inst = SetCoverInstance.build(family, {s: float(rng.integers(1, 6)) for s in family})

            result = solve_set_cover(inst)
            opt = facility_opt(inst.to_facility()).value

            assert result.cost <= inst.delta * opt + 1e-9, f"seed {seed}"

    def test_facility_location(self):
        """Test 6 customers over 4 facilities, one opened facility per customer in μ(x)."""
        for seed in range(FAMILY_SIZE):
            inst = facility_family(6, 4, seed)

            result = solve_facility_location(inst)
            opt = facility_opt(inst).value

            assert result.cost <= inst.delta * opt + 1e-9, f"seed {seed}"
            assert result.cost == pytest.approx(result.assignment_cost), f"seed {seed}"
            k = 0
            for facs in inst.eligible:
                assert result.mu[k : k + len(facs)].sum() == 1.0, f"seed {seed}"
                k += len(facs)

    def test_cmip(self):
        """Test mixed CMIP with up to 8 variables and rows."""
        checked = 0
        for seed in range(FAMILY_SIZE):
            inst = cmip_family(int(np.random.default_rng(seed).integers(3, 9)), seed, delta=3)

            result = solve_cmip(inst, record_trace=False)
            opt = exact_opt(inst)
            if opt.approximate:
                continue
            slack = LP_TOLERANCE if opt.lp_backed else 1e-9

            assert result.cost <= result.delta * opt.value + slack, f"seed {seed}"
            checked += 1

        assert checked > FAMILY_SIZE // 2


@pytest.mark.integration
@pytest.mark.slow
class TestCmipStepCount:
    """Test suite for the per-row step bound of the CMIP drivers."""

    @pytest.mark.parametrize("heap", [True, False])
    def test_thousand_rows(self, heap: bool):
        """Test no row takes more than 2·|deps| steps across 1,000 rows.

        Args:
            heap: Driver selection
        """
        rows = 0
        for seed in range(125):
            inst = cmip_family(8, seed)

            result = solve_cmip(inst, heap=heap, record_trace=False)

            for row in inst.constraints:
                assert result.steps[row.id] <= 2 * len(row.deps), f"seed {seed} row {row.id}"
                rows += 1

        assert rows == 1000


@pytest.mark.integration
@pytest.mark.slow
class TestPagingTraces:
    """Test suite for unit paging over 200 seeded traces."""

    @pytest.mark.parametrize("k", [2, 3])
    def test_k_competitive(self, k: int):
        """Test greedy faults <= k·Belady on traces of up to 30 requests over 6 pages.

        Args:
            k: Cache size
        """
        for seed in range(200):
            rng = np.random.default_rng(seed)
            requests = [f"p{int(v)}" for v in rng.integers(0, 6, size=int(rng.integers(1, 31)))]

            report = simulate_paging(requests, k)

            assert report.opt == report.baselines["belady"]
            assert report.cost <= k * report.opt, f"seed {seed}"
