"""Two-stage probabilistic covering.

In the first stage every constraint S commits to a vector x^S ∈ S supported on
deps(S), paying W·X. Each S then activates independently with probability p_S
and the second stage buys x̂_j = max{x^S_j : S active}, paying c(x̂). The
objective C(X) = W·X + E[c(x̂)] is submodular, increasing and continuous in X.
"""

import math
from collections.abc import Iterator, Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np

from monotone_cover.cmip.rows import CmipRow, cmip_instance
from monotone_cover.config import eps as default_eps
from monotone_cover.config import get_config
from monotone_cover.core.costs import CostModel, LinearCost
from monotone_cover.core.instance import Instance
from monotone_cover.utils.errors import (
    InvalidConstraintError,
    InvalidCostModelError,
    PreconditionError,
    UnsupportedError,
)


@dataclass(frozen=True)
class TwoStageInstance:
    """Rows of a CMIP plus activation probabilities and first-stage weights.

    Attributes:
        rows: The covering rows (their ids key ``p`` and ``W``)
        cost: Second-stage cost c
        p: Activation probability per row id
        W: First-stage weight w^S_j per row id and variable
        name: Label used in reports
    """

    rows: tuple[CmipRow, ...]
    cost: CostModel
    p: Mapping[str, float] = field(default_factory=dict)
    W: Mapping[str, Mapping[int, float]] = field(default_factory=dict)
    name: str = "two-stage"

    def __post_init__(self) -> None:
        ids = {r.id for r in self.rows}
        for sid, prob in self.p.items():
            if sid not in ids:
                raise InvalidConstraintError(f"probability given for unknown row {sid}")
            if not 0.0 <= prob <= 1.0:
                raise InvalidConstraintError(f"row {sid}: activation probability {prob} not in [0, 1]")
        for sid, weights in self.W.items():
            if sid not in ids:
                raise InvalidConstraintError(f"weights given for unknown row {sid}")
            row = self.row(sid)
            for j, w in weights.items():
                if j not in row.deps:
                    raise InvalidConstraintError(f"row {sid}: weight on x[{j}] outside deps")
                if w < 0 or not math.isfinite(w):
                    raise InvalidCostModelError(f"row {sid}: weight w[{j}] = {w} must be >= 0")
        for r in self.rows:
            bad = [j for j in r.deps if j >= self.cost.n]
            if bad:
                raise InvalidConstraintError(f"row {r.id} references unknown variables {bad}")

    @classmethod
    def build(
        cls,
        rows: Sequence[CmipRow],
        costs: Sequence[float] | CostModel,
        p: Mapping[str, float] | float = 1.0,
        W: Mapping[str, Mapping[int, float]] | None = None,
        name: str = "two-stage",
    ) -> "TwoStageInstance":
        """Build from rows; a scalar ``p`` applies to every row, missing W is zero."""
        cost = costs if isinstance(costs, CostModel) else LinearCost.of(costs)
        probs = {r.id: float(p) for r in rows} if isinstance(p, (int, float)) else dict(p)
        return cls(tuple(rows), cost, probs, {k: dict(v) for k, v in (W or {}).items()}, name)

    @property
    def n(self) -> int:
        return self.cost.n

    @property
    def delta(self) -> int:
        return max((len(r.deps) for r in self.rows), default=0)

    @property
    def delta_hat(self) -> int:
        """Maximum number of rows any variable appears in."""
        return self.base_instance().delta_hat

    def row(self, sid: str) -> CmipRow:
        for r in self.rows:
            if r.id == sid:
                return r
        raise KeyError(sid)

    def prob(self, sid: str) -> float:
        return float(self.p.get(sid, 1.0))

    def weight(self, sid: str, j: int) -> float:
        return float(self.W.get(sid, {}).get(j, 0.0))

    def touching(self, j: int) -> list[CmipRow]:
        """Rows whose deps contain ``j``."""
        return [r for r in self.rows if j in r.deps]

    def base_instance(self) -> Instance:
        """The deterministic CMIP obtained with every p_S = 1 and W = 0."""
        if not isinstance(self.cost, LinearCost):
            raise UnsupportedError("the base CMIP needs a linear second-stage cost")
        return cmip_instance(self.rows, self.cost.coefficients, name=self.name)

    def layout(self) -> list[tuple[str, int]]:
        """Flattened (row id, variable) order used by first-stage traces."""
        return [(r.id, j) for r in self.rows for j in r.deps]


@dataclass
class FirstStageMatrix:
    """X = (x^S)_S, one sparse vector per row."""

    columns: dict[str, dict[int, float]]

    @classmethod
    def zeros(cls, inst: TwoStageInstance) -> "FirstStageMatrix":
        return cls({r.id: {j: 0.0 for j in r.deps} for r in inst.rows})

    def value(self, sid: str, j: int) -> float:
        return self.columns.get(sid, {}).get(j, 0.0)

    def vector(self, sid: str, n: int) -> np.ndarray:
        """x^S as a dense length-n array."""
        out = np.zeros(n, dtype=np.float64)
        for j, v in self.columns.get(sid, {}).items():
            out[j] = v
        return out

    def flat(self, inst: TwoStageInstance) -> np.ndarray:
        return np.array([self.value(s, j) for s, j in inst.layout()], dtype=np.float64)

    def copy(self) -> "FirstStageMatrix":
        return FirstStageMatrix({s: dict(col) for s, col in self.columns.items()})

    def is_feasible(self, inst: TwoStageInstance, eps: float | None = None) -> bool:
        """True when x^S ∈ S for every row."""
        return all(r.is_satisfied(self.vector(r.id, inst.n), eps) for r in inst.rows)

    def to_dict(self) -> dict[str, dict[str, float]]:
        return {s: {str(j): v for j, v in sorted(col.items())} for s, col in self.columns.items()}


def first_stage_cost(inst: TwoStageInstance, X: FirstStageMatrix) -> float:
    """W·X."""
    return sum(inst.weight(s, j) * v for s, col in X.columns.items() for j, v in col.items())


def expected_max(levels: Sequence[tuple[float, float]]) -> float:
    """E[max of the active values] for independent (value, probability) pairs.

    Example:
        >>> expected_max([(3.0, 0.5), (1.0, 0.5)])
        1.75
    """
    total = 0.0
    none_above = 1.0
    for value, prob in sorted(levels, key=lambda vp: -vp[0]):
        total += value * prob * none_above
        none_above *= 1.0 - prob
    return total


def expected_total_cost(inst: TwoStageInstance, X: FirstStageMatrix) -> float:
    """Closed-form C(X) = W·X + E[c·x̂] for a linear second-stage cost.

    Raises:
        UnsupportedError: For non-linear c; use :func:`estimate_total_cost`
    """
    if not isinstance(inst.cost, LinearCost):
        raise UnsupportedError(
            "closed-form expected cost needs a linear second-stage cost; use estimate_total_cost"
        )
    second = 0.0
    for j, c in enumerate(inst.cost.coefficients):
        if c == 0:
            continue
        levels = [(X.value(r.id, j), inst.prob(r.id)) for r in inst.touching(j)]
        second += c * expected_max(levels)
    return first_stage_cost(inst, X) + second


@dataclass(frozen=True)
class CostEstimate:
    """Monte-Carlo estimate of C(X)."""

    mean: float
    stderr: float
    trials: int
    seed: int

    def to_dict(self) -> dict[str, object]:
        return {"mean": self.mean, "stderr": self.stderr, "trials": self.trials, "seed": self.seed, "estimate": True}


def sample_activations(
    inst: TwoStageInstance, trials: int, seed: int
) -> Iterator[np.ndarray]:
    """Yield boolean activation masks over ``inst.rows``."""
    rng = np.random.Generator(np.random.Philox(seed))
    probs = np.array([inst.prob(r.id) for r in inst.rows], dtype=np.float64)
    for _ in range(trials):
        yield rng.random(len(probs)) < probs


def estimate_total_cost(
    inst: TwoStageInstance,
    X: FirstStageMatrix,
    trials: int | None = None,
    seed: int | None = None,
) -> CostEstimate:
    """Sampled C(X); works for any second-stage cost model.

    Args:
        inst: Two-stage instance
        X: First-stage commitment
        trials: Sample count (defaults to ``Config.montecarlo_trials``)
        seed: Philox seed (defaults to ``Config.default_seed``)
    """
    config = get_config()
    n_trials = config.montecarlo_trials if trials is None else trials
    s = config.default_seed if seed is None else seed
    vectors = np.array([X.vector(r.id, inst.n) for r in inst.rows]).reshape(len(inst.rows), inst.n)
    samples = np.empty(n_trials, dtype=np.float64)
    for t, mask in enumerate(sample_activations(inst, n_trials, s)):
        xhat = vectors[mask].max(axis=0) if mask.any() else np.zeros(inst.n)
        samples[t] = inst.cost.evaluate(xhat)
    first = first_stage_cost(inst, X)
    stderr = float(samples.std(ddof=1) / math.sqrt(n_trials)) if n_trials > 1 else math.inf
    return CostEstimate(mean=first + float(samples.mean()), stderr=stderr, trials=n_trials, seed=s)


def threshold(inst: TwoStageInstance, X: FirstStageMatrix, sid: str, j: int) -> float:
    """t_j: the smallest x^R_j strictly above x^S_j over other rows touching j."""
    mine = X.value(sid, j)
    above = [X.value(r.id, j) for r in inst.touching(j) if r.id != sid and X.value(r.id, j) > mine]
    return min(above, default=math.inf)


def marginal_rate(inst: TwoStageInstance, X: FirstStageMatrix, sid: str, j: int) -> float:
    """c′_j = ∂C/∂x^S_j, valid until x^S_j reaches :func:`threshold`.

    Raises:
        PreconditionError: If ``j`` is not in deps(S)
        UnsupportedError: For a non-linear second-stage cost

    Example:
        >>> marginal_rate(inst, X, "S", 0)  # p_S = 0.5, one R above with p_R = 0.5
        0.25
    """
    row = inst.row(sid)
    if j not in row.deps:
        raise PreconditionError(f"x[{j}] is not a dependency of row {sid}")
    if not isinstance(inst.cost, LinearCost):
        raise UnsupportedError("marginal rates need a linear second-stage cost")
    mine = X.value(sid, j)
    shadow = 1.0
    for r in inst.touching(j):
        if r.id != sid and X.value(r.id, j) > mine:
            shadow *= 1.0 - inst.prob(r.id)
    return inst.weight(sid, j) + inst.cost.coefficients[j] * inst.prob(sid) * shadow


def rates(inst: TwoStageInstance, X: FirstStageMatrix, sid: str) -> dict[int, float]:
    """c′ over deps(S)."""
    return {j: marginal_rate(inst, X, sid, j) for j in inst.row(sid).deps}


def near_threshold(inst: TwoStageInstance, X: FirstStageMatrix, sid: str, j: int, gap: float = 1e-3) -> bool:
    """True when some other row's x^R_j sits within ``gap`` of x^S_j."""
    mine = X.value(sid, j)
    tol = max(gap, default_eps())
    return any(
        abs(X.value(r.id, j) - mine) <= tol for r in inst.touching(j) if r.id != sid
    )
