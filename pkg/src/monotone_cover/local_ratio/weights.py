"""The greedy run read as weight reduction.

On {0,1} instances with linear cost every step lowers the residual weight
c′_j = c_j(1 − x_j) of each touched variable by β, and the variables whose
weight reached zero are exactly the ones μ(x) picks. Small integer domains
get one residual weight per level.
"""

from dataclasses import dataclass, field

import numpy as np

from monotone_cover.config import eps as default_eps
from monotone_cover.core.costs import CostModel, LinearCost, SeparableCost
from monotone_cover.core.domains import DomainKind, DomainSpec
from monotone_cover.core.instance import Instance
from monotone_cover.core.vectors import Vector, replace
from monotone_cover.engine.trace import StepTrace
from monotone_cover.utils.errors import UnsupportedError

MAX_LEVEL = 3


def _is_zero(v: float, scale: float, tol: float) -> bool:
    return v <= tol * max(1.0, scale)


@dataclass
class WeightView:
    """Residual weights after every step.

    Attributes:
        history: c′ before the first step, then after each step
        cover: Variables whose residual weight reached zero
        mu: μ(x^T)
        reproduces_mu: True when the cover rule gives μ(x^T) exactly
    """

    history: list[Vector]
    cover: set[int]
    mu: Vector
    reproduces_mu: bool

    def to_dict(self) -> dict[str, object]:
        return {
            "history": [h.tolist() for h in self.history],
            "cover": sorted(self.cover),
            "mu": self.mu.tolist(),
            "reproduces_mu": self.reproduces_mu,
        }


def weight_reduction_view(
    instance: Instance, trace: StepTrace, *, eps: float | None = None
) -> WeightView:
    """Residual weights c′_j = c_j(1 − x_j) along a trace.

    Raises:
        UnsupportedError: Unless every domain is {0,1} and the cost is linear

    Example:
        >>> view = weight_reduction_view(triangle, solve(triangle).trace)
        >>> view.history[1].tolist()
        [0.0, 0.0, 1.0]
    """
    tol = default_eps() if eps is None else eps
    if not all(d.is_binary for d in instance.domains):
        raise UnsupportedError("weight reduction view needs {0,1} domains")
    if not isinstance(instance.cost, LinearCost):
        raise UnsupportedError("weight reduction view needs a linear cost")
    c = instance.cost.vector
    history = [c * (1.0 - np.minimum(x, 1.0)) for x in trace.points()]
    final = history[-1]
    cover = {j for j in range(instance.n) if _is_zero(float(final[j]), float(c[j]), tol)}
    last = trace.final_x if trace.final_x is not None else trace.replay()
    mu = instance.mu(last, tol)
    picked = np.array([1.0 if j in cover else 0.0 for j in range(instance.n)])
    return WeightView(history, cover, mu, bool(np.array_equal(picked, mu)))


def _level_count(dom: DomainSpec) -> int | None:
    """u when U = {0, 1, ..., u}, else None."""
    if dom.kind is DomainKind.FINITE:
        u = len(dom.values) - 1
        return u if dom.values == tuple(float(i) for i in range(u + 1)) else None
    if dom.kind is DomainKind.INTERVAL and dom.low == 0.0 and dom.step == 1.0:
        return int(dom.maximum)
    return None


@dataclass
class MultiLevelView:
    """Per-level residual weights c′_j(i), i = 1..u_j, after every step.

    Attributes:
        history: One list per point of the trace; entry j holds c′_j(1..u_j)
        levels: Level chosen per variable by the zero-weight rule
        mu: μ(x^T)
        reproduces_mu: True when ``levels`` equals μ(x^T)
    """

    history: list[list[list[float]]]
    levels: list[int]
    mu: Vector
    reproduces_mu: bool
    uppers: list[int] = field(default_factory=list)

    def to_dict(self) -> dict[str, object]:
        return {
            "history": self.history,
            "levels": self.levels,
            "mu": self.mu.tolist(),
            "reproduces_mu": self.reproduces_mu,
        }


def _level_weights(cost: CostModel, x: Vector, j: int, u: int) -> list[float]:
    xj = float(x[j])
    out = []
    for i in range(1, u + 1):
        base = replace(x, j, max(xj, i - 1.0))
        out.append(cost.raise_cost(base, j, max(xj, float(i))))
    return out


def multilevel_weight_view(
    instance: Instance, trace: StepTrace, *, eps: float | None = None
) -> MultiLevelView:
    """c′_j(i): remaining cost of raising x_j from max{x_j, i−1} to max{x_j, i}.

    The rule "x_j = largest i with c′_j(i) = 0" is checked against μ(x^T).

    Raises:
        UnsupportedError: Unless every domain is {0, ..., u} with u <= 3 and
            the cost is linear or separable

    Example:
        >>> view = multilevel_weight_view(instance, solve(instance).trace)
        >>> view.reproduces_mu
        True
    """
    tol = default_eps() if eps is None else eps
    uppers = []
    for j, dom in enumerate(instance.domains):
        u = _level_count(dom)
        if u is None or not 1 <= u <= MAX_LEVEL:
            raise UnsupportedError(f"x[{j}] needs a domain {{0, ..., u}} with 1 <= u <= {MAX_LEVEL}")
        uppers.append(u)
    if not isinstance(instance.cost, LinearCost | SeparableCost):
        raise UnsupportedError("multi-level view needs a linear or separable cost")

    history = []
    for x in trace.points():
        history.append([_level_weights(instance.cost, x, j, u) for j, u in enumerate(uppers)])

    last = trace.final_x if trace.final_x is not None else trace.replay()
    levels = []
    for j, u in enumerate(uppers):
        full = _level_weights(instance.cost, np.zeros(instance.n), j, u)
        zero = [
            i
            for i, w in enumerate(history[-1][j], start=1)
            if _is_zero(w, full[i - 1], tol)
        ]
        levels.append(max(zero, default=0))
    mu = instance.mu(last, tol)
    return MultiLevelView(
        history,
        levels,
        mu,
        bool(np.array_equal(np.array(levels, dtype=np.float64), mu)),
        uppers,
    )
