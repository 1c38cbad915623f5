"""Connection caching.

Every node can hold at most k open connections. When a request overflows a
node, the covering constraint "close at least one other connection at this
node" is revealed and the greedy raises x_s of each candidate at rate
1/cost(r_s) until some x_s reaches 1; those connections are closed and
their cost is charged.
"""

import logging
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field

from monotone_cover.config import eps as default_eps
from monotone_cover.utils.errors import InputError

logger = logging.getLogger(__name__)

Connection = frozenset[str]


def connection(u: str, w: str) -> Connection:
    """Normalized connection key."""
    if u == w:
        raise InputError(f"connection from {u!r} to itself")
    return frozenset((u, w))


@dataclass(frozen=True)
class Eviction:
    """One closed connection (or evicted item)."""

    time: int
    item: object
    cost: float
    at: str | None = None

    def to_dict(self) -> dict[str, object]:
        item = sorted(self.item) if isinstance(self.item, frozenset) else self.item
        return {"t": self.time, "item": item, "cost": self.cost, "at": self.at}


@dataclass
class ConnectionReport:
    """Result of a connection caching run.

    Attributes:
        evictions: Closed connections in order
        cost: Total eviction cost
        overflows: Covering constraints revealed
        delta: Largest candidate set any overflow constraint used
    """

    evictions: list[Eviction] = field(default_factory=list)
    cost: float = 0.0
    overflows: int = 0
    delta: int = 0

    def to_dict(self) -> dict[str, object]:
        return {
            "cost": self.cost,
            "overflows": self.overflows,
            "delta": self.delta,
            "evictions": [e.to_dict() for e in self.evictions],
        }


def simulate_connection_caching(
    requests: Sequence[tuple[str, str]],
    k: int,
    costs: Mapping[Connection, float] | None = None,
    *,
    keep_last: bool = True,
    eps: float | None = None,
) -> ConnectionReport:
    """Replay ``requests`` through the greedy connection cache.

    Args:
        requests: Node pairs, in arrival order
        k: Connections each node may keep open
        costs: Closing cost per connection (default 1)
        keep_last: Never close the connection just requested; the bound is
            k·OPT with it and (k+1)·OPT without
        eps: Tolerance override

    Returns:
        ConnectionReport

    Raises:
        ValueError: If k < 1
        InputError: On a malformed request

    Example:
        >>> simulate_connection_caching([("a", "b"), ("a", "c"), ("a", "b")], 1).cost
        2.0
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    tol = default_eps() if eps is None else eps
    cost_of = dict(costs or {})
    report = ConnectionReport()
    progress: dict[Connection, float] = {}

    for t, pair in enumerate(requests):
        if len(pair) != 2:
            raise InputError(f"request {t} is not a node pair: {pair!r}")
        current = connection(*pair)
        # A repeated request starts a fresh variable for the cached copy.
        progress[current] = 0.0
        for node in sorted(current):
            while sum(1 for c in progress if node in c) > k:
                candidates = sorted(
                    (c for c in progress if node in c and (not keep_last or c != current)),
                    key=sorted,
                )
                report.overflows += 1
                report.delta = max(report.delta, len(candidates))
                price = {c: float(cost_of.get(c, 1.0)) for c in candidates}
                delta = min((1.0 - progress[c]) * price[c] for c in candidates)
                for c in candidates:
                    if price[c] > 0:
                        progress[c] += delta / price[c]
                closed = [c for c in candidates if price[c] == 0 or progress[c] >= 1.0 - tol]
                for c in closed:
                    del progress[c]
                    report.evictions.append(Eviction(t, c, price[c], node))
                    report.cost += price[c]
                logger.debug(
                    "t=%d node %s overflow: closed %s", t, node, [sorted(c) for c in closed]
                )
    return report
