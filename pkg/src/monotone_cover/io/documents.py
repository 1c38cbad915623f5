"""Read and write instance files.

Validation errors, including model errors raised while building the
objects, come back as :class:`SchemaError` with JSON-pointer locations.
"""

import json
import logging
import math
from collections.abc import Callable, Iterator, Mapping, Sequence
from contextlib import contextmanager
from dataclasses import dataclass, field
from enum import StrEnum
from pathlib import Path
from typing import Any, TypeVar

import networkx as nx
from pydantic import ValidationError

from monotone_cover.classic.facility import FacilityInstance
from monotone_cover.classic.set_cover import SetCoverInstance
from monotone_cover.classic.vertex_cover import vertex_cover_instance
from monotone_cover.cmip.rows import CmipRow, cmip_instance
from monotone_cover.core.constraints import Constraint, FloorSumConstraint, Term
from monotone_cover.core.costs import (
    CostModel,
    FacilityLocationCost,
    LinearCost,
    PiecewiseLinearCurve,
    SeparableCost,
)
from monotone_cover.core.domains import DomainKind, DomainSpec
from monotone_cover.core.instance import Instance
from monotone_cover.io.dimacs import parse_dimacs
from monotone_cover.io.schema import (
    DOCUMENT_TYPES,
    CapacityThresholdModel,
    CmipDocument,
    CmipRowModel,
    ConflictPairsModel,
    CostSpec,
    Document,
    DomainModel,
    FacilityDocument,
    FloorSumModel,
    InstanceDocument,
    LinearCostModel,
    SeparableCostModel,
    SetCoverDocument,
    StrictModel,
    TwoStageDocument,
    UpgradableDocument,
    VertexCoverDocument,
    bound_json,
    bound_value,
)
from monotone_cover.online.upgradable import CacheModel, CapacityThreshold, ConflictPairs
from monotone_cover.probabilistic.model import TwoStageInstance
from monotone_cover.utils.errors import ModelError, SchemaError, UnsupportedError

logger = logging.getLogger(__name__)

T = TypeVar("T")

DIMACS_SUFFIXES = (".dimacs", ".col")


class ProblemKind(StrEnum):
    """What an instance file describes."""

    INSTANCE = "instance"
    CMIP = "cmip"
    TWO_STAGE = "two-stage"
    VERTEX_COVER = "vertex-cover"
    SET_COVER = "set-cover"
    FACILITY = "facility"
    UPGRADABLE = "upgradable"


@dataclass
class Problem:
    """A loaded instance file.

    ``instance`` is set for every kind that is a plain covering problem;
    the kind-specific source object sits next to it.
    """

    kind: ProblemKind
    name: str
    instance: Instance | None = None
    two_stage: TwoStageInstance | None = None
    graph: nx.Graph | None = None
    set_cover: SetCoverInstance | None = None
    facility: FacilityInstance | None = None
    cache_model: CacheModel | None = None
    requests: list[str] = field(default_factory=list)
    meta: dict[str, Any] = field(default_factory=dict)

    def require_instance(self) -> Instance:
        """The covering instance, or UnsupportedError for scenario files."""
        if self.instance is None:
            raise UnsupportedError(f"{self.kind.value} files do not describe a covering instance")
        return self.instance


def _escape(part: object) -> str:
    return str(part).replace("~", "~0").replace("/", "~1")


def json_pointer(loc: Sequence[object], raw: Any) -> str:
    """Pointer for a pydantic error location, skipping union tags.

    A location element is kept when it indexes into ``raw`` or is the last
    element (a missing or forbidden key).
    """
    parts: list[str] = []
    node = raw
    for i, key in enumerate(loc):
        last = i == len(loc) - 1
        if isinstance(node, Mapping) and str(key) in node:
            node = node[str(key)]
            parts.append(_escape(key))
        elif isinstance(node, list) and isinstance(key, int) and 0 <= key < len(node):
            node = node[key]
            parts.append(str(key))
        elif last:
            parts.append(_escape(key))
    return "".join(f"/{p}" for p in parts)


def _diagnostics(error: ValidationError, raw: Any) -> list[tuple[str, str]]:
    return [(json_pointer(e["loc"], raw), e["msg"]) for e in error.errors()]


@contextmanager
def _at(pointer: str) -> Iterator[None]:
    """Report model errors raised inside the block at ``pointer``."""
    try:
        yield
    except ModelError as e:
        raise SchemaError([(pointer, str(e))]) from e


def _build(pointer: str, fn: Callable[[], T]) -> T:
    with _at(pointer):
        return fn()


# Parts


def domain_spec(model: DomainModel) -> DomainSpec:
    """DomainSpec for a validated domain entry."""
    if model.kind == "integers":
        return DomainSpec.integers()
    if model.kind == "binary":
        return DomainSpec.binary()
    if model.kind == "finite":
        return DomainSpec.finite(model.values or [])
    if model.kind == "interval":
        return DomainSpec.interval(model.low, bound_value(model.high), model.step)
    return DomainSpec.reals()


def domain_json(spec: DomainSpec) -> dict[str, Any]:
    if spec.kind is DomainKind.INTEGERS:
        return {"kind": "integers"}
    if spec.kind is DomainKind.FINITE:
        return {"kind": "finite", "values": list(spec.values)}
    if spec.kind is DomainKind.INTERVAL:
        out: dict[str, Any] = {"kind": "interval", "low": spec.low, "high": bound_json(spec.high)}
        if spec.step is not None:
            out["step"] = spec.step
        return out
    return {"kind": "reals"}


def cost_model(model: CostSpec) -> CostModel:
    if isinstance(model, LinearCostModel):
        return LinearCost.of(model.coefficients)
    if isinstance(model, SeparableCostModel):
        return SeparableCost(
            tuple(
                PiecewiseLinearCurve(tuple((float(a), float(b)) for a, b in c.knots), c.tail_slope)
                for c in model.curves
            )
        )
    return FacilityLocationCost(
        opening=tuple(model.opening),
        pairs=tuple((int(i), int(f)) for i, f in model.pairs),
        assignment=tuple(model.assignment),
    )


def cost_json(cost: CostModel) -> dict[str, Any]:
    if isinstance(cost, LinearCost):
        return {"kind": "linear", "coefficients": list(cost.coefficients)}
    if isinstance(cost, SeparableCost):
        return {
            "kind": "separable",
            "curves": [
                {"knots": [list(k) for k in c.knots], "tail_slope": c.tail_slope}
                for c in cost.curves
            ],
        }
    if isinstance(cost, FacilityLocationCost):
        return {
            "kind": "facility",
            "opening": list(cost.opening),
            "pairs": [list(p) for p in cost.pairs],
            "assignment": list(cost.assignment),
        }
    raise UnsupportedError(f"{type(cost).__name__} cannot be written to an instance file")


def cmip_row(model: CmipRowModel) -> CmipRow:
    return CmipRow.build(
        model.id,
        dict(model.A),
        model.b,
        I=model.I,
        u={j: bound_value(v) for j, v in model.u.items()},
    )


def cmip_row_json(row: CmipRow) -> dict[str, Any]:
    return {
        "kind": "cmip",
        "id": row.id,
        "A": {str(j): a for j, a in row.A.items()},
        "b": row.b,
        "I": sorted(row.I),
        "u": {str(j): v for j, v in row.u.items() if math.isfinite(v)},
    }


def constraint(model: FloorSumModel | CmipRowModel) -> FloorSumConstraint:
    if isinstance(model, CmipRowModel):
        return cmip_row(model)
    terms = (Term(t.var, t.coef, t.integral, t.scale, bound_value(t.cap)) for t in model.terms)
    return FloorSumConstraint.of(model.id, terms, model.rhs)


def constraint_json(s: Constraint) -> dict[str, Any]:
    if isinstance(s, CmipRow):
        return cmip_row_json(s)
    if isinstance(s, FloorSumConstraint):
        return {
            "kind": "floor-sum",
            "id": s.id,
            "terms": [
                {
                    "var": t.var,
                    "coef": t.coef,
                    "integral": t.integral,
                    "scale": t.scale,
                    "cap": bound_json(t.cap),
                }
                for t in s.terms
            ],
            "rhs": s.rhs,
        }
    raise UnsupportedError(f"constraint {s.id} ({s.kind}) cannot be written to an instance file")


# Documents


def _instance(doc: InstanceDocument) -> Problem:
    domains = [
        _build(f"/variables/{j}/domain", lambda v=v: domain_spec(v.domain))
        for j, v in enumerate(doc.variables)
    ]
    cost = _build("/cost", lambda: cost_model(doc.cost))
    rows = [
        _build(f"/constraints/{i}", lambda c=c: constraint(c)) for i, c in enumerate(doc.constraints)
    ]
    instance = _build("", lambda: Instance.build(domains, cost, rows, name=doc.name))
    return Problem(ProblemKind.INSTANCE, doc.name, instance=instance, meta=dict(doc.meta))


def _cmip_rows(rows: Sequence[CmipRowModel]) -> list[CmipRow]:
    return [_build(f"/rows/{i}", lambda r=r: cmip_row(r)) for i, r in enumerate(rows)]


def _cmip(doc: CmipDocument) -> Problem:
    rows = _cmip_rows(doc.rows)
    instance = _build("", lambda: cmip_instance(rows, doc.costs, name=doc.name))
    return Problem(ProblemKind.CMIP, doc.name, instance=instance, meta=dict(doc.meta))


def _two_stage(doc: TwoStageDocument) -> Problem:
    rows = _cmip_rows(doc.rows)
    two = _build("", lambda: TwoStageInstance.build(rows, doc.costs, doc.p, doc.W, name=doc.name))
    return Problem(
        ProblemKind.TWO_STAGE,
        doc.name,
        instance=_build("", two.base_instance),
        two_stage=two,
        meta=dict(doc.meta),
    )


def _vertex_cover(doc: VertexCoverDocument) -> Problem:
    graph = nx.Graph()
    for node in doc.nodes:
        graph.add_node(node.id, weight=node.weight)
    graph.add_edges_from(doc.edges)
    instance, _ = _build("/edges", lambda: vertex_cover_instance(graph, binary=doc.binary))
    return Problem(
        ProblemKind.VERTEX_COVER, doc.name, instance=instance, graph=graph, meta=dict(doc.meta)
    )


def _set_cover(doc: SetCoverDocument) -> Problem:
    names = [s.name for s in doc.sets]
    if len(set(names)) != len(names):
        raise SchemaError([("/sets", "set names must be unique")])
    sc = _build(
        "/sets",
        lambda: SetCoverInstance.build(
            {s.name: set(s.members) for s in doc.sets},
            {s.name: s.weight for s in doc.sets},
            None if doc.elements is None else set(doc.elements),
        ),
    )
    return Problem(
        ProblemKind.SET_COVER, doc.name, instance=sc.to_instance(), set_cover=sc, meta=dict(doc.meta)
    )


def _facility(doc: FacilityDocument) -> Problem:
    fl = _build("/customers", lambda: FacilityInstance.build(doc.opening, doc.customers))
    return Problem(
        ProblemKind.FACILITY, doc.name, instance=fl.to_instance(), facility=fl, meta=dict(doc.meta)
    )


def cache_model(model: CapacityThresholdModel | ConflictPairsModel) -> CacheModel:
    if isinstance(model, CapacityThresholdModel):
        return CapacityThreshold(
            base=model.base,
            prices=tuple(model.prices),
            max_capacity=model.max_capacity,
            costs=dict(model.costs),
            sizes=dict(model.sizes),
            discounts=tuple(model.discounts),
        )
    return ConflictPairs(
        capacity=model.capacity,
        conflicts=tuple((a, b, i, level) for a, b, i, level in model.conflicts),
        components=model.components,
        costs=dict(model.costs),
    )


def _upgradable(doc: UpgradableDocument) -> Problem:
    model = _build("/model", lambda: cache_model(doc.model))
    return Problem(
        ProblemKind.UPGRADABLE,
        doc.name,
        cache_model=model,
        requests=list(doc.requests),
        meta=dict(doc.meta),
    )


_LOADERS: dict[type[StrictModel], Callable[[Any], Problem]] = {
    InstanceDocument: _instance,
    CmipDocument: _cmip,
    TwoStageDocument: _two_stage,
    VertexCoverDocument: _vertex_cover,
    SetCoverDocument: _set_cover,
    FacilityDocument: _facility,
    UpgradableDocument: _upgradable,
}


def validate_document(raw: Any) -> Document:
    """Validate a parsed JSON value against the schema its ``type`` names.

    Raises:
        SchemaError: With one JSON-pointer diagnostic per violation
    """
    if not isinstance(raw, Mapping):
        raise SchemaError([("", "instance file must hold a JSON object")])
    kind = raw.get("type", "instance")
    model = DOCUMENT_TYPES.get(kind) if isinstance(kind, str) else None
    if model is None:
        raise SchemaError([("/type", f"unknown document type {kind!r}; expected one of {sorted(DOCUMENT_TYPES)}")])
    try:
        return model.model_validate(raw)  # type: ignore[return-value]
    except ValidationError as e:
        raise SchemaError(_diagnostics(e, raw)) from e


def problem_from_dict(raw: Any) -> Problem:
    """Validate and build a problem from an already parsed document."""
    doc = validate_document(raw)
    problem = _LOADERS[type(doc)](doc)
    logger.debug("loaded %s document %r", problem.kind.value, problem.name)
    return problem


def load_problem(source: str | Path) -> Problem:
    """Load an instance file.

    Args:
        source: Path to a JSON file, or a DIMACS graph (``.dimacs``, ``.col``)
            read as a vertex cover instance

    Raises:
        FileNotFoundError: If the file is missing
        SchemaError: On invalid JSON or schema violations
        TraceParseError: On a malformed DIMACS line

    Example:
        >>> load_problem(Path("tests/fixtures/overlap.json")).instance.delta
        2
    """
    path = Path(source)
    if path.suffix in DIMACS_SUFFIXES:
        graph = parse_dimacs(path)
        instance, _ = vertex_cover_instance(graph)
        return Problem(ProblemKind.VERTEX_COVER, path.stem, instance=instance, graph=graph)
    text = path.read_text(encoding="utf-8")
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError([("", f"invalid JSON at line {e.lineno} column {e.colno}: {e.msg}")]) from e
    return problem_from_dict(raw)


def instance_to_dict(instance: Instance, meta: Mapping[str, Any] | None = None) -> dict[str, Any]:
    """``instance`` document for a covering instance.

    Raises:
        UnsupportedError: For callback costs or constraints
    """
    return {
        "type": "instance",
        "name": instance.name,
        "variables": [{"domain": domain_json(d)} for d in instance.domains],
        "cost": cost_json(instance.cost),
        "constraints": [constraint_json(s) for s in instance.constraints],
        "meta": dict(meta or instance.meta),
    }


def two_stage_to_dict(inst: TwoStageInstance) -> dict[str, Any]:
    """``two-stage`` document; needs a linear cost."""
    if not isinstance(inst.cost, LinearCost):
        raise UnsupportedError("two-stage files hold linear costs only")
    return {
        "type": "two-stage",
        "name": inst.name,
        "costs": list(inst.cost.coefficients),
        "rows": [cmip_row_json(r) for r in inst.rows],
        "p": dict(inst.p),
        "W": {sid: {str(j): w for j, w in ws.items()} for sid, ws in inst.W.items()},
        "meta": {},
    }


def upgradable_to_dict(
    model: CacheModel, requests: Sequence[str], name: str = "upgradable"
) -> dict[str, Any]:
    """``upgradable`` document for a template cache model."""
    if isinstance(model, CapacityThreshold):
        spec: dict[str, Any] = {
            **model.to_dict(),
            "costs": dict(model.costs),
            "sizes": dict(model.sizes),
        }
    elif isinstance(model, ConflictPairs):
        spec = {**model.to_dict(), "costs": dict(model.costs)}
    else:
        raise UnsupportedError(f"{type(model).__name__} has no file template")
    return {"type": "upgradable", "name": name, "model": spec, "requests": list(requests), "meta": {}}


def dump_document(document: Mapping[str, Any], path: str | Path) -> None:
    """Write a document as indented JSON."""
    Path(path).write_text(json.dumps(document, indent=2) + "\n", encoding="utf-8")
