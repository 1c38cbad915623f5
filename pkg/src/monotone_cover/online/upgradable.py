"""Upgradable caching.

Besides evicting, the algorithm may buy hardware: a spend vector y ∈ ℝ₊^d
that makes more sets cachable and eviction cheaper. When request r_t leaves
the cache Q uncachable, the greedy raises every y_i and every x_s
(s ∈ Q − {r_t}) at unit rate. It evicts r_s as soon as x_s ≥ cost(r_s, y)
and stops once cachable_t(Q, y) holds. This is (d + k)-competitive.

The continuous raise is simulated event by event: the next eviction or
cachability flip is found in closed form for the shipped templates and by
bisection for callback models.
"""

import itertools
import logging
import math
from abc import ABC, abstractmethod
from collections.abc import Callable, Hashable, Iterable, Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np

from monotone_cover.config import eps as default_eps
from monotone_cover.config import get_config
from monotone_cover.core.audit import AuditReport
from monotone_cover.online.connection import Eviction
from monotone_cover.oracle.caching import ScheduleCosts, schedule_opt
from monotone_cover.utils.errors import InfeasibleError, InvalidCostModelError

logger = logging.getLogger(__name__)

Item = Hashable
Spend = tuple[float, ...]


class CacheModel(ABC):
    """Cachability predicate and eviction cost as functions of the spend y.

    Subclasses must keep ``cachable`` non-decreasing in y and non-increasing
    in Q, and ``eviction_cost`` non-increasing in y.

    Attributes:
        d: Number of upgradable components
        k: Largest number of items any cache state can hold
    """

    d: int
    k: int

    @abstractmethod
    def cachable(self, cache: frozenset[Item], y: Spend) -> bool: ...

    @abstractmethod
    def eviction_cost(self, item: Item, y: Spend) -> float: ...

    def upgrade_time(self, cache: frozenset[Item], y: Spend) -> float:
        """Smallest δ >= 0 with cachable(cache, y + δ) (``inf`` if none)."""
        return _first_true(lambda d: self.cachable(cache, _shift(y, d)))

    def eviction_time(self, item: Item, progress: float, y: Spend) -> float:
        """Smallest δ >= 0 with progress + δ >= cost(item, y + δ)."""
        return _first_true(lambda d: progress + d >= self.eviction_cost(item, _shift(y, d)))

    def to_dict(self) -> dict[str, object]:
        return {"template": type(self).__name__, "d": self.d, "k": self.k}


def _shift(y: Spend, delta: float) -> Spend:
    return tuple(v + delta for v in y)


def _first_true(pred: Callable[[float], bool]) -> float:
    """Smallest δ with pred(δ) for a monotone predicate, by doubling and bisection."""
    if pred(0.0):
        return 0.0
    hi = 1.0
    for _ in range(64):
        if pred(hi):
            break
        hi *= 2
    else:
        return math.inf
    lo = 0.0
    for _ in range(get_config().bisection_iterations):
        mid = (lo + hi) / 2
        if pred(mid):
            hi = mid
        else:
            lo = mid
    return hi


@dataclass
class CapacityThreshold(CacheModel):
    """Capacity grows with spend; eviction gets cheaper with spend.

    cachable(Q, y) ⟺ Σ_{s∈Q} size(s) <= min(max_capacity, base + Σ_i ⌊y_i / price_i⌋)
    cost(r, y) = max(0, cost_r − Σ_i discount_i · y_i)

    Example:
        >>> model = CapacityThreshold(base=1, prices=(1.0,), max_capacity=3)
        >>> model.cachable(frozenset("ab"), (1.0,))
        True
    """

    base: int = 1
    prices: tuple[float, ...] = (1.0,)
    max_capacity: int = 1
    costs: Mapping[Item, float] = field(default_factory=dict)
    sizes: Mapping[Item, int] = field(default_factory=dict)
    discounts: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if any(p <= 0 for p in self.prices):
            raise InvalidCostModelError(f"upgrade prices must be positive: {self.prices}")
        if self.discounts and len(self.discounts) != len(self.prices):
            raise InvalidCostModelError("one discount per component")
        if any(v < 0 for v in self.discounts):
            raise InvalidCostModelError("discounts must be non-negative")
        self.d = len(self.prices)
        self.k = self.max_capacity

    def capacity(self, y: Spend) -> int:
        extra = sum(math.floor(v / p + 1e-12) for v, p in zip(y, self.prices, strict=True))
        return min(self.max_capacity, self.base + extra)

    def load(self, cache: Iterable[Item]) -> int:
        return sum(int(self.sizes.get(q, 1)) for q in cache)

    def cachable(self, cache: frozenset[Item], y: Spend) -> bool:
        return self.load(cache) <= self.capacity(y)

    def eviction_cost(self, item: Item, y: Spend) -> float:
        rebate = sum(d * v for d, v in zip(self.discounts, y, strict=False))
        return max(0.0, float(self.costs.get(item, 1.0)) - rebate)

    def upgrade_time(self, cache: frozenset[Item], y: Spend) -> float:
        need = self.load(cache)
        if need > self.max_capacity:
            return math.inf
        if need <= self.capacity(y):
            return 0.0
        # Capacity only changes when some y_i crosses a multiple of its price.
        crossings = sorted(
            (math.floor(v / p + 1e-12) + m) * p - v
            for v, p in zip(y, self.prices, strict=True)
            for m in range(1, need - self.base + 2)
        )
        for delta in crossings:
            if self.cachable(cache, _shift(y, delta)):
                return delta
        return math.inf

    def eviction_time(self, item: Item, progress: float, y: Spend) -> float:
        rate = 1.0 + sum(self.discounts)
        gap = self.eviction_cost(item, y) - progress
        return max(0.0, gap / rate)

    def to_dict(self) -> dict[str, object]:
        return {
            "template": "capacity-threshold",
            "base": self.base,
            "prices": list(self.prices),
            "max_capacity": self.max_capacity,
            "discounts": list(self.discounts),
        }


@dataclass
class ConflictPairs(CacheModel):
    """Capacity k; each conflicting pair may share the cache once its component is upgraded.

    cachable(Q, y) ⟺ |Q| <= k and y_i >= threshold for every conflicting
    pair (a, b, i, threshold) with a, b ∈ Q.
    """

    capacity: int = 2
    conflicts: Sequence[tuple[Item, Item, int, float]] = ()
    components: int = 1
    costs: Mapping[Item, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for a, b, i, level in self.conflicts:
            if not 0 <= i < self.components:
                raise InvalidCostModelError(f"conflict ({a}, {b}) names unknown component {i}")
            if level < 0:
                raise InvalidCostModelError(f"conflict ({a}, {b}) has a negative threshold")
        self.d = self.components
        self.k = self.capacity

    def cachable(self, cache: frozenset[Item], y: Spend) -> bool:
        if len(cache) > self.capacity:
            return False
        return all(
            y[i] >= level for a, b, i, level in self.conflicts if a in cache and b in cache
        )

    def eviction_cost(self, item: Item, y: Spend) -> float:
        return float(self.costs.get(item, 1.0))

    def upgrade_time(self, cache: frozenset[Item], y: Spend) -> float:
        if len(cache) > self.capacity:
            return math.inf
        waits = [
            level - y[i] for a, b, i, level in self.conflicts if a in cache and b in cache
        ]
        return max([0.0, *waits])

    def eviction_time(self, item: Item, progress: float, y: Spend) -> float:
        return max(0.0, self.eviction_cost(item, y) - progress)

    def to_dict(self) -> dict[str, object]:
        return {
            "template": "conflict-pairs",
            "capacity": self.capacity,
            "components": self.components,
            "conflicts": [list(c) for c in self.conflicts],
        }


@dataclass
class CallbackModel(CacheModel):
    """User-supplied predicate and cost; events are found by bisection."""

    d: int
    k: int
    cachable_fn: Callable[[frozenset[Item], Spend], bool]
    cost_fn: Callable[[Item, Spend], float]

    def cachable(self, cache: frozenset[Item], y: Spend) -> bool:
        return bool(self.cachable_fn(cache, y))

    def eviction_cost(self, item: Item, y: Spend) -> float:
        return float(self.cost_fn(item, y))


@dataclass
class UpgradableReport:
    """Result of an upgradable caching run.

    Attributes:
        y: Final spend per component
        evictions: Evictions with the charge frozen at eviction time
        upgrade_cost: Σ y_i
        eviction_cost: Σ charges
        opt: Offline optimum (None when not computed)
        delta: d + k
    """

    y: Spend
    evictions: list[Eviction] = field(default_factory=list)
    upgrade_cost: float = 0.0
    eviction_cost: float = 0.0
    opt: float | None = None
    delta: int = 0

    @property
    def cost(self) -> float:
        return self.upgrade_cost + self.eviction_cost

    @property
    def ratio(self) -> float | None:
        if self.opt is None:
            return None
        if self.opt == 0:
            return 1.0 if self.cost == 0 else math.inf
        return self.cost / self.opt

    def to_dict(self) -> dict[str, object]:
        return {
            "cost": self.cost,
            "upgrade_cost": self.upgrade_cost,
            "eviction_cost": self.eviction_cost,
            "y": list(self.y),
            "opt": self.opt,
            "ratio": self.ratio,
            "delta": self.delta,
            "evictions": [e.to_dict() for e in self.evictions],
        }


def simulate_upgradable_caching(
    requests: Sequence[Item],
    model: CacheModel,
    *,
    eps: float | None = None,
) -> UpgradableReport:
    """Replay ``requests`` through the upgrade-or-evict greedy.

    Raises:
        InfeasibleError: If no finite spend makes some cache state cachable

    Example:
        >>> model = CapacityThreshold(base=1, prices=(0.5,), max_capacity=2)
        >>> simulate_upgradable_caching(list("abab"), model).cost
        0.5
    """
    tol = default_eps() if eps is None else eps
    y: Spend = (0.0,) * model.d
    progress: dict[Item, float] = {}
    report = UpgradableReport(y=y, delta=model.d + model.k)

    for t, item in enumerate(requests):
        progress[item] = 0.0
        guard = 0
        while not model.cachable(frozenset(progress), y):
            guard += 1
            if guard > 10_000:
                raise InfeasibleError(f"request {t}: raise did not converge")
            others = [s for s in progress if s != item]
            events = [model.upgrade_time(frozenset(progress), y)]
            events += [model.eviction_time(s, progress[s], y) for s in others]
            delta = min(events)
            if math.isinf(delta):
                raise InfeasibleError(
                    f"request {t} ({item!r}): no spend makes the cache state cachable",
                    constraint_id=f"t{t}",
                )
            y = _shift(y, delta)
            for s in others:
                progress[s] += delta
            for s in others:
                charge = model.eviction_cost(s, y)
                if progress[s] >= charge - tol:
                    del progress[s]
                    report.evictions.append(Eviction(t, s, charge))
                    report.eviction_cost += charge
        logger.debug("t=%d %r: cache %d items, y=%s", t, item, len(progress), y)

    report.y = y
    report.upgrade_cost = float(sum(y))
    return report


def upgradable_opt(
    requests: Sequence[Item],
    model: CacheModel,
    candidates: Sequence[Spend] | Sequence[float],
    *,
    max_states: int | None = None,
) -> float:
    """Offline optimum over a grid of spend vectors.

    Buying the whole spend before the first request is never worse, so the
    optimum is min over y of Σ y_i plus the cheapest eviction schedule at y.
    Exact when the grid contains an optimal y (e.g. all price multiples for
    a capacity model without discounts); an upper bound otherwise.
    """
    grid = [tuple(g) if isinstance(g, Sequence) else (float(g),) for g in candidates]
    if any(len(g) != model.d for g in grid):
        raise ValueError(f"spend vectors must have {model.d} components")
    best = math.inf
    items = set(requests)
    for y in grid:
        evict = {q: model.eviction_cost(q, y) for q in items}
        value = float(sum(y)) + schedule_opt(
            requests,
            lambda cache, y=y: model.cachable(cache, y),
            ScheduleCosts(fetch={}, evict=evict),
            max_states=max_states,
        )
        best = min(best, value)
    return best


def spend_grid(model: CacheModel, top: int, step: float = 1.0) -> list[Spend]:
    """All spend vectors with coordinates in {0, step, ..., top·step}."""
    axis = [m * step for m in range(top + 1)]
    return [tuple(v) for v in itertools.product(axis, repeat=model.d)]


def audit_cache_model(
    model: CacheModel,
    items: Sequence[Item],
    samples: int = 100,
    *,
    seed: int = 0,
    high: float = 4.0,
) -> list[AuditReport]:
    """Spot-check cachable (up in y, down in Q) and cost (down in y)."""
    rng = np.random.default_rng(seed)
    in_y = AuditReport("cachable-monotone-in-spend")
    in_q = AuditReport("cachable-antitone-in-cache")
    cost = AuditReport("eviction-cost-antitone")
    pool = list(items)
    for _ in range(samples):
        y = tuple(float(v) for v in rng.uniform(0, high, model.d))
        more = tuple(v + float(w) for v, w in zip(y, rng.uniform(0, high, model.d), strict=True))
        size = int(rng.integers(0, len(pool) + 1))
        picked = rng.choice(len(pool), size=size, replace=False) if size else []
        cache = frozenset(pool[i] for i in picked)
        smaller = frozenset(q for q in cache if rng.random() < 0.5)
        in_y.record(
            -1.0 if model.cachable(cache, y) and not model.cachable(cache, more) else 0.0,
            f"Q={sorted(map(repr, cache))}, y={y}, y'={more}",
        )
        in_q.record(
            -1.0 if model.cachable(cache, y) and not model.cachable(smaller, y) else 0.0,
            f"Q={sorted(map(repr, cache))}, Q'={sorted(map(repr, smaller))}, y={y}",
        )
        if pool:
            q = pool[int(rng.integers(len(pool)))]
            cost.record(model.eviction_cost(q, y) - model.eviction_cost(q, more), f"r={q!r}, y={y}")
    return [in_y, in_q, cost]
