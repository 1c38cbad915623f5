"""Solution vectors: validation and lattice operations."""

from collections.abc import Sequence
from typing import Protocol

import numpy as np
import numpy.typing as npt

from monotone_cover.utils.errors import DimensionError, InvalidSolutionError

Vector = npt.NDArray[np.float64]


class Point(Protocol):
    """Anything indexable by variable number (arrays, lists, μ-views)."""

    def __getitem__(self, j: int, /) -> float: ...


def as_solution(x: Sequence[float] | Vector, n: int) -> Vector:
    """Validate ``x`` as a solution vector of length ``n``.

    Args:
        x: Candidate coordinates
        n: Expected variable count

    Returns:
        A fresh float64 array

    Raises:
        DimensionError: If the length differs from ``n``
        InvalidSolutionError: If a coordinate is NaN or negative
    """
    arr = np.array(x, dtype=np.float64)
    if arr.ndim != 1 or arr.shape[0] != n:
        raise DimensionError(f"expected a vector of length {n}, got shape {arr.shape}")
    if np.isnan(arr).any():
        bad = int(np.flatnonzero(np.isnan(arr))[0])
        raise InvalidSolutionError(f"coordinate x[{bad}] is NaN")
    if (arr < 0).any():
        bad = int(np.flatnonzero(arr < 0)[0])
        raise InvalidSolutionError(f"coordinate x[{bad}] = {arr[bad]} is negative")
    return arr


def join(x: Vector, y: Vector) -> Vector:
    """Componentwise maximum x ∨ y."""
    return np.maximum(x, y)


def meet(x: Vector, y: Vector) -> Vector:
    """Componentwise minimum x ∧ y."""
    return np.minimum(x, y)


def replace(x: Vector, j: int, value: float) -> Vector:
    """Copy of ``x`` with coordinate ``j`` set to ``value``."""
    y = x.copy()
    y[j] = value
    return y
