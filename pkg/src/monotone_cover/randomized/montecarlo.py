"""Randomized greedy runs and the Monte-Carlo ratio harness.

Each trial gets its own Philox stream spawned from one root seed, so a
(seed, trial) pair always replays the same run and trials can be farmed
out in any order.
"""

import logging
import math
from collections.abc import Mapping
from dataclasses import dataclass
from enum import StrEnum

import numpy as np

from monotone_cover.config import eps as default_eps
from monotone_cover.config import get_config
from monotone_cover.core.costs import LinearCost
from monotone_cover.core.instance import Instance
from monotone_cover.core.vectors import Vector
from monotone_cover.engine.greedy import minimal_beta, safety_limit
from monotone_cover.engine.policies import StepSizePolicy
from monotone_cover.engine.trace import StepTrace
from monotone_cover.oracle.exact import OracleBudget, exact_opt
from monotone_cover.randomized.rstep import Correlation, RandomStepPlan, rstep
from monotone_cover.randomized.stateless import stateless_rstep
from monotone_cover.utils.errors import (
    InfeasibleError,
    PreconditionError,
    SafetyLimitExceededError,
    UnsupportedError,
)

logger = logging.getLogger(__name__)


class Variant(StrEnum):
    """Randomized algorithm to run."""

    RSTEP = "rstep"
    STATELESS = "stateless"


def philox(seed: int | np.random.SeedSequence) -> np.random.Generator:
    """Counter-based generator for a seed or a spawned seed sequence."""
    return np.random.Generator(np.random.Philox(seed))


@dataclass
class RandomizedRun:
    """Outcome of one randomized run.

    Attributes:
        x: Final vector
        mu: μ(x); equals x for stateless runs
        trace: Step trace, with the root seed recorded
        cost: c(x)
        mu_cost: c(μ(x))
        delta: Δ of the instance
        variant: Algorithm that produced the run
    """

    x: Vector
    mu: Vector
    trace: StepTrace
    cost: float
    mu_cost: float
    delta: int
    variant: Variant

    @property
    def steps(self) -> int:
        return len(self.trace)

    @property
    def seed(self) -> int | None:
        return self.trace.seed

    def to_dict(self) -> dict[str, object]:
        return {
            "variant": self.variant.value,
            "seed": self.seed,
            "cost": self.cost,
            "mu_cost": self.mu_cost,
            "delta": self.delta,
            "steps": self.steps,
            "x": self.x.tolist(),
            "mu": self.mu.tolist(),
        }


def _probabilities(instance: Instance, probability: float | Mapping[int, float]) -> Vector:
    if isinstance(probability, Mapping):
        p = np.array([float(probability.get(j, 1.0)) for j in range(instance.n)])
    else:
        p = np.full(instance.n, float(probability))
    bad = [j for j, v in enumerate(p) if math.isnan(v) or not 0.0 < v <= 1.0]
    if bad:
        raise PreconditionError(f"rstep runs need probabilities in (0, 1], bad for {bad}")
    return p


def _levels(instance: Instance) -> int:
    """Largest number of domain points a stateless run can climb through."""
    x0 = instance.start_vector()
    top = 1
    for j, dom in enumerate(instance.domains):
        hi = dom.maximum
        if math.isinf(hi):
            reach = [s.clamp(j, x0) for s in instance.constraints if j in s.deps]
            hi = max((r for r in reach if math.isfinite(r)), default=float(x0[j]) + 1.0)
        top = max(top, len(dom.points_between(float(x0[j]), hi, limit=1_000_000)))
    return top


def run_randomized(
    instance: Instance,
    variant: Variant = Variant.RSTEP,
    *,
    probability: float | Mapping[int, float] = 1.0,
    mode: Correlation = Correlation.INDEPENDENT,
    seed: int | None = None,
    rng: np.random.Generator | None = None,
    policy: StepSizePolicy | None = None,
    max_steps: int | None = None,
    eps: float | None = None,
) -> RandomizedRun:
    """Greedy loop with randomized steps, in the same round-robin order as solve.

    The rstep variant prices β as the minimal step under c′_j = p_j c_j
    (linear costs), or under c itself when every p_j = 1. Other costs need a
    caller-certified ``policy``. With p ≡ 1 the run is identical to
    :func:`solve` with the default policy.

    Args:
        instance: Problem instance
        variant: rstep or stateless
        probability: p for every variable, or p_j per variable (rstep only)
        mode: Correlation of the draws within a step
        seed: Root seed recorded in the trace (defaults to Config.default_seed)
        rng: Generator to draw from instead of a fresh Philox(seed)
        policy: β rule for rstep on non-linear costs
        max_steps: Override for the step limit
        eps: Tolerance override

    Raises:
        UnsupportedError: Stateless on a continuous domain, or rstep with
            p < 1 on a non-linear cost and no policy
        InfeasibleError: If a stateless step finds nothing to raise
        SafetyLimitExceededError: If the step limit is hit

    Example:
        >>> run_randomized(triangle, Variant.STATELESS, seed=7).mu_cost
        2.0
    """
    tol = default_eps() if eps is None else eps
    root = get_config().default_seed if seed is None and rng is None else seed
    gen = rng if rng is not None else philox(root if root is not None else 0)
    domains = instance.domains if instance.restricted else None
    x = instance.start_vector()
    trace = StepTrace(start=x.copy(), seed=root)
    beta_cost = instance.cost
    p_map: dict[int, float] = {}

    if variant is Variant.STATELESS:
        continuous = [j for j, d in enumerate(instance.domains) if d.is_continuous]
        if continuous:
            raise UnsupportedError(f"stateless runs need discrete domains, continuous: {continuous}")
        limit = safety_limit(instance) * _levels(instance)
    else:
        p = _probabilities(instance, probability)
        certain = bool(np.all(p == 1.0))
        if policy is None and not certain and not isinstance(instance.cost, LinearCost):
            raise UnsupportedError(
                "rstep with p < 1 on a non-linear cost needs a caller-certified step size policy"
            )
        if isinstance(instance.cost, LinearCost) and not certain:
            beta_cost = instance.cost.scaled(p.tolist())
        limit = safety_limit(instance) * max(1, math.ceil(1.0 / float(p.min(initial=1.0))))
        p_map = {j: float(v) for j, v in enumerate(p)}
    if max_steps is not None:
        limit = max_steps

    def advance(s_index: int) -> None:
        nonlocal x
        s = instance.constraints[s_index]
        if len(trace) >= limit:
            trace.final_x = x.copy()
            raise SafetyLimitExceededError(
                f"{instance.name or 'instance'}: no feasible point after {limit} randomized steps",
                partial_trace=trace,
            )
        if variant is Variant.STATELESS:
            x_new, record = stateless_rstep(
                x, s, instance.cost, instance.domains, gen, mode=mode, eps=tol
            )
        else:
            if policy is not None:
                beta = policy(x, s, instance)
            else:
                beta = minimal_beta(x, s, beta_cost, domains=domains)
            plan = RandomStepPlan.build(
                x, s, instance.cost, beta, p_map, mode=mode, domains=domains, eps=tol
            )
            x_new, record = rstep(x, s, instance.cost, plan, gen, domains=domains, eps=tol)
        logger.debug(
            "rstep %d: %s beta=%.6g raised=%d", len(trace) + 1, s.id, record.beta, len(record.raised)
        )
        trace.append(record)
        x = x_new

    indices = range(len(instance.constraints))
    while True:
        pending = [i for i in indices if not instance.satisfies(instance.constraints[i], x, tol)]
        if not pending:
            break
        for i in pending:
            if not instance.satisfies(instance.constraints[i], x, tol):
                advance(i)

    mu = instance.mu(x, tol)
    trace.final_x = x.copy()
    trace.final_mu = mu.copy()
    return RandomizedRun(
        x=x,
        mu=mu,
        trace=trace,
        cost=instance.cost(x),
        mu_cost=instance.cost(mu),
        delta=instance.delta,
        variant=variant,
    )


@dataclass
class MonteCarloReport:
    """Sample statistics of the final cost over many seeded trials.

    Attributes:
        variant: Algorithm sampled
        trials: Number of trials
        seed: Root seed the trial streams were spawned from
        mean: Mean final cost c(μ(x))
        stderr: Standard error of the mean
        opt: Optimal cost the runs are compared with
        delta: Δ of the instance
        mean_steps: Mean number of steps per trial
    """

    variant: Variant
    trials: int
    seed: int
    mean: float
    stderr: float
    opt: float
    delta: int
    mean_steps: float

    @property
    def bound(self) -> float:
        """Δ·OPT + 3·SE."""
        return self.delta * self.opt + 3.0 * self.stderr

    @property
    def bound_ok(self) -> bool:
        return self.mean <= self.bound + default_eps()

    @property
    def ratio(self) -> float:
        """mean / OPT (1 when both are zero)."""
        if self.opt > 0:
            return self.mean / self.opt
        return 1.0 if self.mean <= default_eps() else math.inf

    @property
    def interval(self) -> tuple[float, float]:
        """Ratio range mean ± 3·SE, divided by OPT."""
        if self.opt <= 0:
            return (self.ratio, self.ratio)
        return ((self.mean - 3 * self.stderr) / self.opt, (self.mean + 3 * self.stderr) / self.opt)

    def to_dict(self) -> dict[str, object]:
        return {
            "variant": self.variant.value,
            "trials": self.trials,
            "seed": self.seed,
            "mean": self.mean,
            "stderr": self.stderr,
            "opt": self.opt,
            "delta": self.delta,
            "ratio": self.ratio,
            "interval": list(self.interval),
            "bound": self.bound,
            "bound_ok": self.bound_ok,
            "mean_steps": self.mean_steps,
        }


def montecarlo_ratio(
    instance: Instance,
    variant: Variant = Variant.STATELESS,
    trials: int | None = None,
    seed: int | None = None,
    *,
    probability: float | Mapping[int, float] = 1.0,
    mode: Correlation = Correlation.INDEPENDENT,
    opt: float | None = None,
    budget: OracleBudget | int | None = None,
) -> MonteCarloReport:
    """Mean final cost of ``trials`` seeded runs against the exact optimum.

    Args:
        instance: Oracle-checkable instance
        variant: rstep or stateless
        trials: Trial count (defaults to Config.montecarlo_trials)
        seed: Root seed (defaults to Config.default_seed)
        probability: p for rstep runs
        mode: Correlation of the draws
        opt: Known optimum; computed with the exact oracle when omitted
        budget: Oracle state budget

    Raises:
        OracleUnavailableError: If the oracle exceeds its budget
        InfeasibleError: If the instance has no feasible point

    Example:
        >>> report = montecarlo_ratio(triangle, Variant.STATELESS, trials=1000, seed=1)
        >>> report.bound_ok
        True
    """
    config = get_config()
    n_trials = config.montecarlo_trials if trials is None else trials
    root = config.default_seed if seed is None else seed
    if n_trials < 1:
        raise PreconditionError(f"trials must be >= 1, got {n_trials}")
    if opt is None:
        found = exact_opt(instance, budget=budget)
        if not found.feasible:
            raise InfeasibleError(f"{instance.name or 'instance'} has no feasible point")
        if found.approximate:
            logger.warning("%s: optimum from an approximate oracle", instance.name or "instance")
        opt = found.value

    costs = np.empty(n_trials, dtype=np.float64)
    steps = np.empty(n_trials, dtype=np.float64)
    for t, child in enumerate(np.random.SeedSequence(root).spawn(n_trials)):
        run = run_randomized(
            instance, variant, probability=probability, mode=mode, seed=root, rng=philox(child)
        )
        costs[t] = run.mu_cost
        steps[t] = run.steps
    stderr = float(np.std(costs, ddof=1)) / math.sqrt(n_trials) if n_trials > 1 else 0.0
    report = MonteCarloReport(
        variant=variant,
        trials=n_trials,
        seed=root,
        mean=float(costs.mean()),
        stderr=stderr,
        opt=float(opt),
        delta=instance.delta,
        mean_steps=float(steps.mean()),
    )
    logger.info(
        "%s: %s mean %.6g ± %.3g over %d trials, OPT %.6g",
        instance.name or "instance",
        variant.value,
        report.mean,
        report.stderr,
        n_trials,
        report.opt,
    )
    if not report.bound_ok:
        logger.warning(
            "%s: mean %.6g exceeds delta*OPT + 3SE = %.6g",
            instance.name or "instance",
            report.mean,
            report.bound,
        )
    return report
