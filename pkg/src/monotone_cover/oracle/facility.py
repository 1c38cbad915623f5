"""Exact facility location by enumerating the set of opened facilities."""

from dataclasses import dataclass
from itertools import combinations

from monotone_cover.classic.facility import FacilityInstance
from monotone_cover.config import get_config
from monotone_cover.utils.errors import OracleUnavailableError


@dataclass
class FacilityOpt:
    value: float
    opened: list[int]
    choice: list[int]


def facility_opt(inst: FacilityInstance, max_states: int | None = None) -> FacilityOpt:
    """Optimal assignment: every customer goes to its cheapest open facility.

    Raises:
        OracleUnavailableError: If 2^facilities exceeds the budget
    """
    limit = get_config().oracle_budget if max_states is None else max_states
    m = inst.facilities
    if 2**m > limit:
        raise OracleUnavailableError(f"{m} facilities exceed the oracle budget")
    best = FacilityOpt(value=float("inf"), opened=[], choice=[])
    for size in range(1, m + 1):
        for opened in combinations(range(m), size):
            open_set = set(opened)
            total = sum(inst.opening[j] for j in opened)
            choice = []
            for facs, costs in zip(inst.eligible, inst.assignment, strict=True):
                options = [(d, j) for j, d in zip(facs, costs, strict=True) if j in open_set]
                if not options:
                    break
                d, j = min(options)
                total += d
                choice.append(j)
            else:
                if total < best.value:
                    best = FacilityOpt(value=total, opened=list(opened), choice=choice)
    return best
