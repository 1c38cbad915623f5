"""DIMACS edge-list graphs for vertex cover.

Recognised lines::

    c free text
    p edge <nodes> <edges>
    e <u> <v>
    n <v> <weight>        (optional vertex weight, default 1)

Vertices are numbered 1..nodes.
"""

import logging
from collections.abc import Iterable
from pathlib import Path

import networkx as nx

from monotone_cover.utils.errors import TraceParseError

logger = logging.getLogger(__name__)


def _ints(fields: list[str], line: int) -> list[int]:
    try:
        return [int(f) for f in fields]
    except ValueError as e:
        raise TraceParseError(f"expected integers, got {' '.join(fields)!r}", line) from e


def parse_dimacs(source: str | Path | Iterable[str]) -> nx.Graph:
    """Parse a DIMACS edge file into a graph with ``weight`` node attributes.

    Args:
        source: Path, file content, or an iterable of lines

    Raises:
        TraceParseError: With the line number of the first bad line

    Example:
        >>> g = parse_dimacs("p edge 3 3\\ne 1 2\\ne 2 3\\ne 1 3")
        >>> g.number_of_edges()
        3
    """
    if isinstance(source, Path):
        lines: Iterable[str] = source.read_text(encoding="utf-8").splitlines()
    elif isinstance(source, str):
        lines = source.splitlines()
    else:
        lines = source

    graph: nx.Graph | None = None
    declared = 0
    for number, raw in enumerate(lines, start=1):
        fields = raw.split()
        if not fields or fields[0] == "c":
            continue
        tag, rest = fields[0], fields[1:]
        if tag == "p":
            if graph is not None:
                raise TraceParseError("second problem line", number)
            if len(rest) != 3 or rest[0] not in ("edge", "col"):
                raise TraceParseError("expected 'p edge <nodes> <edges>'", number)
            nodes, declared = _ints(rest[1:], number)
            graph = nx.Graph()
            graph.add_nodes_from(range(1, nodes + 1), weight=1.0)
            continue
        if graph is None:
            raise TraceParseError(f"'{tag}' line before the problem line", number)
        if tag == "e":
            if len(rest) != 2:
                raise TraceParseError("expected 'e <u> <v>'", number)
            u, v = _ints(rest, number)
            for node in (u, v):
                if node not in graph:
                    raise TraceParseError(f"vertex {node} outside 1..{graph.number_of_nodes()}", number)
            if u == v:
                raise TraceParseError(f"self-loop on vertex {u}", number)
            graph.add_edge(u, v)
        elif tag == "n":
            if len(rest) != 2:
                raise TraceParseError("expected 'n <v> <weight>'", number)
            node = _ints(rest[:1], number)[0]
            if node not in graph:
                raise TraceParseError(f"vertex {node} outside 1..{graph.number_of_nodes()}", number)
            try:
                weight = float(rest[1])
            except ValueError as e:
                raise TraceParseError(f"weight {rest[1]!r} is not a number", number) from e
            if weight < 0:
                raise TraceParseError(f"vertex {node} has negative weight", number)
            graph.nodes[node]["weight"] = weight
        else:
            raise TraceParseError(f"unknown line type {tag!r}", number)

    if graph is None:
        raise TraceParseError("no problem line", 1)
    if graph.number_of_edges() != declared:
        logger.warning(
            "problem line declares %d edges, file has %d distinct ones",
            declared,
            graph.number_of_edges(),
        )
    return graph
