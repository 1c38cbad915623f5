"""Offline optima for caching traces.

Belady's farthest-in-future rule is exact for unit-size, unit-cost paging.
Everything else (file sizes, weighted costs, connection caching) goes
through :func:`schedule_opt`, a memoized search over cache states.
"""

import math
from collections.abc import Callable, Hashable, Mapping, Sequence
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

from monotone_cover.config import get_config
from monotone_cover.utils.errors import OracleUnavailableError

Item = Hashable


def belady_faults(requests: Sequence[Item], k: int) -> int:
    """Misses (compulsory included) of Belady's offline paging rule.

    Example:
        >>> belady_faults(list("abcabc"), 2)
        4
    """
    if k < 1:
        raise ValueError(f"cache size must be >= 1, got {k}")
    cache: set[Item] = set()
    faults = 0
    for t, page in enumerate(requests):
        if page in cache:
            continue
        faults += 1
        if len(cache) >= k:

            def next_use(q: Item, t: int = t) -> float:
                for u in range(t + 1, len(requests)):
                    if requests[u] == q:
                        return u
                return math.inf

            cache.remove(max(sorted(cache, key=repr), key=next_use))
        cache.add(page)
    return faults


@dataclass(frozen=True)
class ScheduleCosts:
    """What an offline schedule pays for.

    Attributes:
        fetch: Cost charged when an item is brought into the cache
        evict: Cost charged when an item is removed
    """

    fetch: Mapping[Item, float]
    evict: Mapping[Item, float]


def schedule_opt(
    requests: Sequence[Item],
    fits: Callable[[frozenset[Item]], bool],
    costs: ScheduleCosts,
    *,
    keep_last: bool = True,
    max_states: int | None = None,
) -> float:
    """Cheapest eviction schedule serving ``requests``.

    After each request the requested item is in the cache; whenever the
    cache no longer ``fits`` the schedule evicts some subset of the other
    cached items (any subset, including the requested one when
    ``keep_last`` is False) so that it fits again.

    Args:
        requests: Request sequence
        fits: Capacity predicate on cache contents
        costs: Fetch and eviction charges per item
        keep_last: Never evict the item just requested
        max_states: Memo entries allowed (defaults to the oracle budget)

    Returns:
        Minimum total charge (``inf`` if some request cannot be served)

    Raises:
        OracleUnavailableError: If the memo table outgrows ``max_states``
    """
    limit = get_config().oracle_budget if max_states is None else max_states
    reqs = tuple(requests)

    @lru_cache(maxsize=None)
    def best(t: int, cache: frozenset[Item]) -> float:
        if best.cache_info().currsize > limit:
            raise OracleUnavailableError(f"caching schedule search exceeded {limit} states")
        if t == len(reqs):
            return 0.0
        item = reqs[t]
        paid = 0.0
        if item not in cache:
            paid = costs.fetch.get(item, 0.0)
            cache = cache | {item}
        if fits(cache):
            return paid + best(t + 1, cache)
        candidates = sorted((q for q in cache if not keep_last or q != item), key=repr)
        result = math.inf
        for size in range(1, len(candidates) + 1):
            for chosen in combinations(candidates, size):
                rest = cache - set(chosen)
                if not fits(rest):
                    continue
                charge = sum(costs.evict.get(q, 0.0) for q in chosen)
                result = min(result, charge + best(t + 1, rest))
        return paid + result

    try:
        return best(0, frozenset())
    finally:
        best.cache_clear()


def paging_opt(
    requests: Sequence[Item],
    k: int,
    sizes: Mapping[Item, int] | None = None,
    costs: Mapping[Item, float] | None = None,
    *,
    max_states: int | None = None,
) -> float:
    """Offline optimum fetch cost for paging or file caching.

    Unit sizes and costs use Belady; anything else the exhaustive search.
    """
    if sizes is None and costs is None:
        return float(belady_faults(requests, k))
    size_of = dict(sizes or {})
    cost_of = dict(costs or {})
    items = set(requests)
    fetch = {q: float(cost_of.get(q, 1.0)) for q in items}
    return schedule_opt(
        requests,
        lambda cache: sum(size_of.get(q, 1) for q in cache) <= k,
        ScheduleCosts(fetch=fetch, evict={}),
        max_states=max_states,
    )


def connection_opt(
    requests: Sequence[tuple[str, str]],
    k: int,
    costs: Mapping[frozenset[str], float] | None = None,
    *,
    keep_last: bool = True,
    max_states: int | None = None,
) -> float:
    """Offline optimum eviction cost for connection caching with k per node."""
    conns = [frozenset(r) for r in requests]
    cost_of = dict(costs or {})

    def fits(cache: frozenset[Item]) -> bool:
        load: dict[str, int] = {}
        for c in cache:
            assert isinstance(c, frozenset)
            for node in c:
                load[node] = load.get(node, 0) + 1
        return all(v <= k for v in load.values())

    evict = {c: float(cost_of.get(c, 1.0)) for c in conns}
    return schedule_opt(
        conns,
        fits,
        ScheduleCosts(fetch={}, evict=evict),
        keep_last=keep_last,
        max_states=max_states,
    )
