"""Request trace files.

One request per line, whitespace separated, ``#`` starts a comment:

* connection traces: ``t node_u node_w cost``
* file traces: ``t file size cost``

Times must be strictly increasing integers; lines are replayed in order.
"""

from collections.abc import Iterable
from dataclasses import dataclass
from pathlib import Path

from monotone_cover.utils.errors import TraceParseError


@dataclass(frozen=True)
class ConnectionRequest:
    time: int
    u: str
    w: str
    cost: float


@dataclass(frozen=True)
class FileRequest:
    time: int
    file: str
    size: int
    cost: float


def _lines(source: str | Path | Iterable[str]) -> Iterable[tuple[int, list[str]]]:
    if isinstance(source, Path):
        source = source.read_text(encoding="utf-8").splitlines()
    elif isinstance(source, str):
        source = source.splitlines()
    for number, raw in enumerate(source, start=1):
        text = raw.split("#", 1)[0].strip()
        if text:
            yield number, text.split()


def _number(kind: type, text: str, what: str, line: int) -> int | float:
    try:
        value = kind(text)
    except ValueError as e:
        raise TraceParseError(f"{what} {text!r} is not a valid {kind.__name__}", line) from e
    if value < 0:
        raise TraceParseError(f"{what} must be >= 0, got {text}", line)
    return value


def _check_time(t: int, last: int | None, line: int) -> None:
    if last is not None and t <= last:
        raise TraceParseError(f"time {t} does not increase (previous {last})", line)


def parse_connection_trace(source: str | Path | Iterable[str]) -> list[ConnectionRequest]:
    """Parse ``t node_u node_w cost`` lines.

    Raises:
        TraceParseError: With the 1-based line number of the first bad line

    Example:
        >>> parse_connection_trace("0 a b 1\\n1 a c 2")[1].cost
        2.0
    """
    out: list[ConnectionRequest] = []
    last = None
    for line, fields in _lines(source):
        if len(fields) != 4:
            raise TraceParseError(f"expected 't node_u node_w cost', got {len(fields)} fields", line)
        t = int(_number(int, fields[0], "time", line))
        _check_time(t, last, line)
        u, w = fields[1], fields[2]
        if u == w:
            raise TraceParseError(f"connection from {u!r} to itself", line)
        out.append(ConnectionRequest(t, u, w, float(_number(float, fields[3], "cost", line))))
        last = t
    return out


def parse_file_trace(source: str | Path | Iterable[str]) -> list[FileRequest]:
    """Parse ``t file size cost`` lines.

    Raises:
        TraceParseError: On a malformed line, a size below 1, or a file whose
            size or cost changes between requests
    """
    out: list[FileRequest] = []
    seen: dict[str, tuple[int, float]] = {}
    last = None
    for line, fields in _lines(source):
        if len(fields) != 4:
            raise TraceParseError(f"expected 't file size cost', got {len(fields)} fields", line)
        t = int(_number(int, fields[0], "time", line))
        _check_time(t, last, line)
        name = fields[1]
        size = int(_number(int, fields[2], "size", line))
        cost = float(_number(float, fields[3], "cost", line))
        if size < 1:
            raise TraceParseError(f"file {name!r} needs size >= 1", line)
        if seen.setdefault(name, (size, cost)) != (size, cost):
            raise TraceParseError(f"file {name!r} changes size or cost", line)
        out.append(FileRequest(t, name, size, cost))
        last = t
    return out


def connection_inputs(
    requests: list[ConnectionRequest],
) -> tuple[list[tuple[str, str]], dict[frozenset[str], float]]:
    """Pairs and per-connection costs for :func:`simulate_connection_caching`.

    A connection requested with different costs keeps the latest one.
    """
    pairs = [(r.u, r.w) for r in requests]
    costs = {frozenset((r.u, r.w)): r.cost for r in requests}
    return pairs, costs


def file_inputs(
    requests: list[FileRequest],
) -> tuple[list[str], dict[str, int], dict[str, float]]:
    """Names, sizes and costs for :func:`simulate_paging`."""
    names = [r.file for r in requests]
    sizes = {r.file: r.size for r in requests}
    costs = {r.file: r.cost for r in requests}
    return names, sizes, costs
