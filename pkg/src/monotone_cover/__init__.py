"""Monotone covering with submodular cost.

Greedy Δ-approximation for minimizing a non-decreasing submodular cost
subject to upward-closed constraints, with:
    - CMIP rows solved in exact arithmetic
    - vertex cover, set cover and facility location front ends
    - two-stage probabilistic covering
    - online paging, connection, file and upgradable caching
    - randomized and stateless step variants
    - exact small-instance oracles for checking every guarantee

Example:
    >>> from monotone_cover import DomainSpec, FloorSumConstraint, Instance, LinearCost, solve
    >>> s = FloorSumConstraint.at_least_one("S", [0, 1])
    >>> solve(Instance.build(DomainSpec.reals(), LinearCost.of([1, 2]), [s])).mu_cost
    2.0
"""

__version__ = "0.1.0"
__license__ = "MIT"

from monotone_cover.config import Config, get_config
from monotone_cover.core import DomainSpec, FloorSumConstraint, Instance, LinearCost
from monotone_cover.engine import SolveResult, solve
from monotone_cover.oracle import exact_opt

__all__ = [
    "Config",
    "DomainSpec",
    "FloorSumConstraint",
    "Instance",
    "LinearCost",
    "SolveResult",
    "__version__",
    "exact_opt",
    "get_config",
    "solve",
]
