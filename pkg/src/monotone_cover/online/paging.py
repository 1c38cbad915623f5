"""Paging and file caching.

The greedy treats every cached copy as a covering variable x_s. On overflow
the constraint "evict one of the cached items other than the one just
requested" arrives and every candidate is raised at rate 1/cost(r_s); the
items reaching 1 are evicted. With unit sizes and costs all candidates are
level at every overflow, so the rule flushes the cache like FWF; sizes and
costs turn it into a Landlord-style policy.
"""

import logging
import math
from collections import OrderedDict
from collections.abc import Hashable, Mapping, Sequence
from dataclasses import dataclass, field

from monotone_cover.config import eps as default_eps
from monotone_cover.online.connection import Eviction
from monotone_cover.oracle.caching import belady_faults, paging_opt
from monotone_cover.utils.errors import InputError, OracleUnavailableError

logger = logging.getLogger(__name__)

Page = Hashable

# Traces longer than this skip the exhaustive weighted optimum unless forced.
EXHAUSTIVE_TRACE_LIMIT = 14


@dataclass
class PagingReport:
    """Result of a paging run.

    Attributes:
        faults: Misses of the greedy
        cost: Fetch cost of the greedy (compulsory misses included)
        evictions: Greedy evictions in order
        opt: Offline optimum fetch cost (None when not computed)
        baselines: Fetch cost of LRU, FIFO, FWF and, for unit paging, Belady
        delta: Largest candidate set any overflow used
    """

    faults: int = 0
    cost: float = 0.0
    evictions: list[Eviction] = field(default_factory=list)
    opt: float | None = None
    baselines: dict[str, float] = field(default_factory=dict)
    delta: int = 0

    @property
    def ratio(self) -> float | None:
        if self.opt is None:
            return None
        if self.opt == 0:
            return 1.0 if self.cost == 0 else math.inf
        return self.cost / self.opt

    def to_dict(self) -> dict[str, object]:
        return {
            "faults": self.faults,
            "cost": self.cost,
            "opt": self.opt,
            "ratio": self.ratio,
            "delta": self.delta,
            "baselines": dict(sorted(self.baselines.items())),
            "evictions": [e.to_dict() for e in self.evictions],
        }


class _Cache:
    """Size-aware cache contents shared by the baselines."""

    def __init__(self, k: int, sizes: Mapping[Page, int], costs: Mapping[Page, float]) -> None:
        self.k = k
        self.sizes = sizes
        self.costs = costs
        self.items: OrderedDict[Page, None] = OrderedDict()
        self.cost = 0.0

    def size(self, page: Page) -> int:
        return int(self.sizes.get(page, 1))

    @property
    def load(self) -> int:
        return sum(self.size(p) for p in self.items)

    def fetch(self, page: Page) -> None:
        self.cost += float(self.costs.get(page, 1.0))
        self.items[page] = None


def _check_sizes(requests: Sequence[Page], k: int, sizes: Mapping[Page, int]) -> None:
    if k < 1:
        raise ValueError(f"cache size must be >= 1, got {k}")
    for page in set(requests):
        if sizes.get(page, 1) > k:
            raise InputError(f"page {page!r} of size {sizes[page]} exceeds the cache size {k}")


def lru_cost(
    requests: Sequence[Page], k: int, sizes: Mapping[Page, int] | None = None, costs: Mapping[Page, float] | None = None
) -> float:
    """Fetch cost of least-recently-used eviction."""
    cache = _Cache(k, sizes or {}, costs or {})
    for page in requests:
        if page in cache.items:
            cache.items.move_to_end(page)
            continue
        cache.fetch(page)
        while cache.load > k:
            cache.items.popitem(last=False)
    return cache.cost


def fifo_cost(
    requests: Sequence[Page], k: int, sizes: Mapping[Page, int] | None = None, costs: Mapping[Page, float] | None = None
) -> float:
    """Fetch cost of first-in-first-out eviction."""
    cache = _Cache(k, sizes or {}, costs or {})
    for page in requests:
        if page in cache.items:
            continue
        cache.fetch(page)
        while cache.load > k:
            cache.items.popitem(last=False)
    return cache.cost


def fwf_cost(
    requests: Sequence[Page], k: int, sizes: Mapping[Page, int] | None = None, costs: Mapping[Page, float] | None = None
) -> float:
    """Fetch cost of flush-when-full."""
    cache = _Cache(k, sizes or {}, costs or {})
    for page in requests:
        if page in cache.items:
            continue
        cache.fetch(page)
        if cache.load > k:
            cache.items.clear()
            cache.items[page] = None
    return cache.cost


def greedy_paging(
    requests: Sequence[Page],
    k: int,
    sizes: Mapping[Page, int] | None = None,
    costs: Mapping[Page, float] | None = None,
    *,
    eps: float | None = None,
) -> PagingReport:
    """Run the covering greedy alone (no baselines, no optimum)."""
    tol = default_eps() if eps is None else eps
    size_of = dict(sizes or {})
    cost_of = dict(costs or {})
    _check_sizes(requests, k, size_of)
    report = PagingReport()
    progress: dict[Page, float] = {}

    for t, page in enumerate(requests):
        if page not in progress:
            report.faults += 1
            report.cost += float(cost_of.get(page, 1.0))
        progress[page] = 0.0
        while sum(size_of.get(p, 1) for p in progress) > k:
            candidates = [p for p in progress if p != page]
            report.delta = max(report.delta, len(candidates))
            price = {p: float(cost_of.get(p, 1.0)) for p in candidates}
            delta = min((1.0 - progress[p]) * price[p] for p in candidates)
            for p in candidates:
                if price[p] > 0:
                    progress[p] += delta / price[p]
            for p in candidates:
                if price[p] == 0 or progress[p] >= 1.0 - tol:
                    del progress[p]
                    report.evictions.append(Eviction(t, p, price[p]))
    return report


def simulate_paging(
    requests: Sequence[Page],
    k: int,
    sizes: Mapping[Page, int] | None = None,
    costs: Mapping[Page, float] | None = None,
    *,
    with_opt: bool | None = None,
    max_states: int | None = None,
) -> PagingReport:
    """Greedy paging plus baselines and the offline optimum.

    Args:
        requests: Page (or file) requests in order
        k: Cache size (in size units)
        sizes: Size per page (default 1)
        costs: Fetch cost per page (default 1)
        with_opt: Compute the optimum; defaults to True for unit paging and
            for weighted traces of at most 14 requests
        max_states: Budget for the exhaustive optimum

    Returns:
        PagingReport; ``ratio`` compares greedy cost with the optimum

    Example:
        >>> report = simulate_paging(list("abcabc"), 2)
        >>> report.cost, report.opt
        (6.0, 4.0)
    """
    report = greedy_paging(requests, k, sizes, costs)
    unit = not sizes and not costs
    report.baselines = {
        "lru": lru_cost(requests, k, sizes, costs),
        "fifo": fifo_cost(requests, k, sizes, costs),
        "fwf": fwf_cost(requests, k, sizes, costs),
    }
    if unit:
        report.baselines["belady"] = float(belady_faults(requests, k))
    compute = with_opt if with_opt is not None else unit or len(requests) <= EXHAUSTIVE_TRACE_LIMIT
    if compute:
        try:
            report.opt = paging_opt(
                requests, k, sizes or None, costs or None, max_states=max_states
            )
        except OracleUnavailableError:
            logger.warning("paging optimum unavailable for %d requests", len(requests))
    logger.info(
        "paging k=%d: greedy cost %.6g (%d faults), opt %s", k, report.cost, report.faults, report.opt
    )
    return report
