"""Weighted vertex cover through the generic engine.

Every edge (u, w) becomes the floor-sum ⌊x_u⌋ + ⌊x_w⌋ >= 1 and the greedy
loop runs with minimal steps, so Δ = 2 and the cover costs at most twice
the optimum.
"""

from collections.abc import Hashable
from dataclasses import dataclass

import networkx as nx

from monotone_cover.config import eps as default_eps
from monotone_cover.core.constraints import FloorSumConstraint
from monotone_cover.core.costs import LinearCost
from monotone_cover.core.domains import DomainSpec
from monotone_cover.core.instance import Instance
from monotone_cover.engine.greedy import SolveResult, solve
from monotone_cover.utils.errors import InvalidConstraintError, InvalidCostModelError


@dataclass
class VertexCoverResult:
    """Cover, its weight, and the underlying solve."""

    cover: set[Hashable]
    cost: float
    solve: SolveResult
    nodes: list[Hashable]


def vertex_cover_instance(
    graph: nx.Graph, weight: str = "weight", *, binary: bool = False
) -> tuple[Instance, list[Hashable]]:
    """Monotone covering instance for ``graph``.

    Nodes without the ``weight`` attribute weigh 1. Variable j stands for
    ``nodes[j]`` (nodes in ``sorted`` order when sortable, else insertion order).
    With ``binary`` every variable is restricted to {0, 1}.

    Raises:
        InvalidConstraintError: On self-loops
        InvalidCostModelError: On negative weights
    """
    if nx.number_of_selfloops(graph):
        raise InvalidConstraintError("vertex cover needs a graph without self-loops")
    try:
        nodes = sorted(graph.nodes)
    except TypeError:
        nodes = list(graph.nodes)
    index = {v: j for j, v in enumerate(nodes)}
    weights = [float(graph.nodes[v].get(weight, 1.0)) for v in nodes]
    if any(w < 0 for w in weights):
        raise InvalidCostModelError("vertex weights must be non-negative")
    constraints = [
        FloorSumConstraint.at_least_one(f"edge-{u}-{w}", (index[u], index[w]))
        for u, w in graph.edges
    ]
    domain = DomainSpec.binary() if binary else DomainSpec.reals()
    instance = Instance.build(domain, LinearCost.of(weights), constraints, name="vertex-cover")
    return instance, nodes


def solve_vertex_cover(graph: nx.Graph, weight: str = "weight") -> VertexCoverResult:
    """2-approximate minimum weight vertex cover.

    Example:
        >>> res = solve_vertex_cover(nx.cycle_graph(3))
        >>> res.cost
        2.0
    """
    instance, nodes = vertex_cover_instance(graph, weight)
    result = solve(instance)
    tol = default_eps()
    chosen = [j for j in range(instance.n) if result.x[j] >= 1.0 - tol]
    assert isinstance(instance.cost, LinearCost)
    cost = sum(instance.cost.coefficients[j] for j in chosen)
    cover = {nodes[j] for j in chosen}
    return VertexCoverResult(cover=cover, cost=cost, solve=result, nodes=nodes)


def is_vertex_cover(graph: nx.Graph, cover: set[Hashable]) -> bool:
    """True when every edge has an endpoint in ``cover``."""
    return all(u in cover or w in cover for u, w in graph.edges)
