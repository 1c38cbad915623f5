"""Pytest configuration and shared fixtures."""

import logging
import os
from collections.abc import Callable, Generator
from pathlib import Path

import networkx as nx
import numpy as np
import pytest

from monotone_cover.config import set_config
from monotone_cover.core.constraints import FloorSumConstraint, Term, cover_row
from monotone_cover.core.costs import LinearCost
from monotone_cover.core.domains import DomainSpec
from monotone_cover.core.instance import Instance
from monotone_cover.utils.logging import PACKAGE_LOGGER

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(autouse=True)
def isolated_config(monkeypatch: pytest.MonkeyPatch) -> Generator[None, None, None]:
    """Drop MONOCOVER_* variables and the cached global config around each test.

    Args:
        monkeypatch: Pytest monkeypatch fixture

    Yields:
        None
    """
    for name in list(os.environ):
        if name.upper().startswith("MONOCOVER_"):
            monkeypatch.delenv(name)
    set_config(None)
    yield
    set_config(None)


@pytest.fixture(autouse=True)
def restore_package_logger() -> Generator[None, None, None]:
    """Undo the handler and level changes the CLI callback makes.

    Yields:
        None
    """
    logger = logging.getLogger(PACKAGE_LOGGER)
    handlers, level, propagate = list(logger.handlers), logger.level, logger.propagate
    yield
    logger.handlers[:] = handlers
    logger.setLevel(level)
    logger.propagate = propagate


@pytest.fixture
def fixtures_dir() -> Path:
    """Directory holding the instance and trace fixture files.

    Returns:
        Path: tests/fixtures
    """
    return FIXTURES


@pytest.fixture
def covering_row() -> FloorSumConstraint:
    """Continuous row x0 + x1 >= 1.

    Returns:
        FloorSumConstraint: The row, id ``s``
    """
    return cover_row("s", {0: 1, 1: 1}, 1)


@pytest.fixture
def small_instance(covering_row: FloorSumConstraint) -> Instance:
    """One continuous row over two real variables with costs 1 and 2.

    Args:
        covering_row: Row fixture

    Returns:
        Instance: OPT is 1 (x0 = 1)
    """
    return Instance.build(DomainSpec.reals(), LinearCost.of([1, 2]), [covering_row], name="small")


@pytest.fixture
def overlap_instance() -> Instance:
    """Two continuous rows sharing x0, where the maximal step is loose.

    x0 + x1 >= 1 and x0 + x2 >= 2 with unit costs; OPT is 2 (x0 = 2).

    Returns:
        Instance: Three real variables
    """
    rows = [
        FloorSumConstraint.of("S1", [Term(0, 1, False), Term(1, 1, False)], 1),
        FloorSumConstraint.of("S2", [Term(0, 1, False), Term(2, 1, False)], 2),
    ]
    return Instance.build(DomainSpec.reals(), LinearCost.of([1, 1, 1]), rows, name="overlap")


@pytest.fixture
def triangle() -> nx.Graph:
    """Unit-weight triangle; a minimum vertex cover has two vertices.

    Returns:
        nx.Graph: cycle_graph(3)
    """
    return nx.cycle_graph(3)


@pytest.fixture
def random_instance() -> Callable[..., Instance]:
    """Factory for small random floor-sum instances.

    Every row has ``delta`` integral terms over ``n`` integer variables with
    coefficients in 1..3 and a right-hand side that caps can still reach.

    Returns:
        Callable: ``make(seed, n=5, rows=4, delta=2)``
    """

    def make(seed: int, n: int = 5, rows: int = 4, delta: int = 2) -> Instance:
        rng = np.random.default_rng(seed)
        costs = rng.integers(1, 6, size=n).astype(float).tolist()
        constraints = []
        for i in range(rows):
            deps = sorted(int(j) for j in rng.choice(n, size=delta, replace=False))
            coefs = {j: float(rng.integers(1, 4)) for j in deps}
            rhs = float(rng.integers(1, 5))
            constraints.append(cover_row(f"r{i}", coefs, rhs, integral=True))
        return Instance.build(DomainSpec.integers(), LinearCost.of(costs), constraints, name=f"random-{seed}")

    return make
