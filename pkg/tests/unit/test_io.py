"""Unit tests for instance files, the schema and the DIMACS reader."""

import json
from pathlib import Path

import pytest

from monotone_cover.cmip import solve_cmip
from monotone_cover.core.costs import GenericSubmodularCost
from monotone_cover.core.domains import DomainSpec
from monotone_cover.core.instance import Instance
from monotone_cover.io import (
    DOCUMENT_TYPES,
    ProblemKind,
    dump_document,
    instance_to_dict,
    json_pointer,
    load_problem,
    parse_dimacs,
    problem_from_dict,
    two_stage_to_dict,
    upgradable_to_dict,
    validate_document,
)
from monotone_cover.online import CapacityThreshold
from monotone_cover.utils.errors import SchemaError, TraceParseError, UnsupportedError


@pytest.mark.unit
class TestLoadProblem:
    """Test suite for load_problem on the fixture files."""

    def test_instance(self, fixtures_dir: Path):
        """Test a plain instance document.

        Args:
            fixtures_dir: Fixture directory
        """
        problem = load_problem(fixtures_dir / "overlap.json")

        assert problem.kind is ProblemKind.INSTANCE
        assert problem.name == "overlap"
        assert problem.require_instance().delta == 2
        assert [s.id for s in problem.instance.constraints] == ["S1", "S2"]

    def test_cmip(self, fixtures_dir: Path):
        """Test a CMIP document builds a solvable instance.

        Args:
            fixtures_dir: Fixture directory
        """
        problem = load_problem(fixtures_dir / "cmip.json")

        assert problem.kind is ProblemKind.CMIP
        assert solve_cmip(problem.instance).cost == pytest.approx(7 / 3)

    @pytest.mark.parametrize(
        ("name", "kind", "attribute"),
        [
            ("two_stage.json", ProblemKind.TWO_STAGE, "two_stage"),
            ("triangle.json", ProblemKind.VERTEX_COVER, "graph"),
            ("set_cover.json", ProblemKind.SET_COVER, "set_cover"),
            ("facility.json", ProblemKind.FACILITY, "facility"),
        ],
    )
    def test_problem_kinds(self, fixtures_dir: Path, name: str, kind: ProblemKind, attribute: str):
        """Test each document type keeps its source object and an instance.

        Args:
            fixtures_dir: Fixture directory
            name: Fixture file
            kind: Expected kind
            attribute: Problem field holding the source object
        """
        problem = load_problem(fixtures_dir / name)

        assert problem.kind is kind
        assert getattr(problem, attribute) is not None
        assert isinstance(problem.instance, Instance)

    def test_upgradable(self, fixtures_dir: Path):
        """Test scenario files carry a cache model and no instance.

        Args:
            fixtures_dir: Fixture directory
        """
        problem = load_problem(fixtures_dir / "upgradable.json")

        assert isinstance(problem.cache_model, CapacityThreshold)
        assert problem.requests == ["a", "b", "a", "b"]
        with pytest.raises(UnsupportedError):
            problem.require_instance()

    def test_dimacs(self, fixtures_dir: Path):
        """Test DIMACS files load as vertex cover.

        Args:
            fixtures_dir: Fixture directory
        """
        problem = load_problem(fixtures_dir / "triangle.dimacs")

        assert problem.kind is ProblemKind.VERTEX_COVER
        assert problem.name == "triangle"
        assert len(problem.instance.constraints) == 3

    def test_empty_instance(self, fixtures_dir: Path):
        """Test an instance without constraints.

        Args:
            fixtures_dir: Fixture directory
        """
        problem = load_problem(fixtures_dir / "empty.json")

        assert len(problem.instance.constraints) == 0
        assert problem.instance.n == 2


@pytest.mark.unit
class TestValidation:
    """Test suite for schema diagnostics."""

    def test_bad_fixture(self, fixtures_dir: Path):
        """Test every violation is reported with its pointer.

        Args:
            fixtures_dir: Fixture directory
        """
        with pytest.raises(SchemaError) as exc:
            load_problem(fixtures_dir / "bad_schema.json")

        pointers = {p for p, _ in exc.value.diagnostics}
        assert pointers == {"/cost/coefficients/0", "/colour"}
        assert exc.value.to_dict()["error"] == "schema"

    def test_invalid_json(self, tmp_path: Path):
        """Test a syntax error is a schema error at the root.

        Args:
            tmp_path: Temporary directory
        """
        path = tmp_path / "broken.json"
        path.write_text("{", encoding="utf-8")

        with pytest.raises(SchemaError, match="invalid JSON") as exc:
            load_problem(path)
        assert exc.value.diagnostics[0][0] == ""

    @pytest.mark.parametrize(
        ("raw", "pointer"),
        [
            ([1, 2], ""),
            ({"type": "knapsack"}, "/type"),
            ({"type": "vertex-cover", "edges": [[0, 0]]}, "/edges"),
            (
                {
                    "type": "set-cover",
                    "sets": [{"name": "A", "members": [1]}, {"name": "A", "members": [2]}],
                },
                "/sets",
            ),
            ({"type": "cmip", "costs": [1], "rows": [{"id": "r", "A": {"0": 1}, "b": 1, "I": [3]}]}, "/rows/0"),
        ],
    )
    def test_pointers(self, raw, pointer: str):
        """Test schema and model errors land at the right pointer.

        Args:
            raw: Parsed document
            pointer: Expected pointer of the first diagnostic
        """
        with pytest.raises(SchemaError) as exc:
            problem_from_dict(raw)

        assert exc.value.diagnostics[0][0] == pointer

    def test_json_pointer(self):
        """Test union tags are skipped and keys escaped."""
        assert json_pointer(("a", "tag", "b"), {"a": {"b": 1}}) == "/a/b"
        assert json_pointer(("x/y",), {}) == "/x~1y"
        assert json_pointer(("rows", 1, "b"), {"rows": [{}, {}]}) == "/rows/1/b"

    def test_document_types(self):
        """Test the type tag defaults to instance."""
        doc = validate_document({"variables": [], "cost": {"kind": "linear", "coefficients": []}})

        assert doc.type == "instance"
        assert set(DOCUMENT_TYPES) == {
            "instance",
            "cmip",
            "two-stage",
            "vertex-cover",
            "set-cover",
            "facility",
            "upgradable",
        }


@pytest.mark.unit
class TestWriters:
    """Test suite for the document writers."""

    def test_instance_document_reloads(self, fixtures_dir: Path, tmp_path: Path):
        """Test a written instance loads back with the same rows.

        Args:
            fixtures_dir: Fixture directory
            tmp_path: Temporary directory
        """
        original = load_problem(fixtures_dir / "cmip.json").instance
        path = tmp_path / "copy.json"

        dump_document(instance_to_dict(original), path)
        again = load_problem(path).instance

        assert again.constraints == original.constraints
        assert again.domains == original.domains
        assert json.loads(path.read_text(encoding="utf-8"))["type"] == "instance"

    def test_two_stage_document(self, fixtures_dir: Path):
        """Test the two-stage writer keeps p and W.

        Args:
            fixtures_dir: Fixture directory
        """
        two = load_problem(fixtures_dir / "two_stage.json").two_stage

        again = problem_from_dict(two_stage_to_dict(two)).two_stage

        assert again.p == two.p
        assert again.W == two.W

    def test_upgradable_document(self):
        """Test template models are written with their costs and sizes."""
        model = CapacityThreshold(base=1, prices=(0.5,), max_capacity=2, sizes={"a": 2})

        doc = upgradable_to_dict(model, ["a", "b"])
        again = problem_from_dict(doc)

        assert doc["model"]["template"] == "capacity-threshold"
        assert again.cache_model == model

    def test_callback_costs_refused(self):
        """Test costs without a file form."""
        cost = GenericSubmodularCost(1, lambda x: 0.0, lambda x, j, b: float(x[j]) + b)
        inst = Instance.build(DomainSpec.reals(), cost, ())

        with pytest.raises(UnsupportedError):
            instance_to_dict(inst)


@pytest.mark.unit
class TestDimacs:
    """Test suite for parse_dimacs."""

    def test_weights(self):
        """Test vertex weights default to one."""
        graph = parse_dimacs(["c demo", "p edge 3 2", "e 1 2", "e 2 3", "n 2 2.5"])

        assert graph.nodes[1]["weight"] == 1.0
        assert graph.nodes[2]["weight"] == 2.5
        assert graph.number_of_edges() == 2

    @pytest.mark.parametrize(
        ("text", "line"),
        [
            ("e 1 2", 1),
            ("p edge 2 1\ne 1 1", 2),
            ("p edge 2 1\ne 1 3", 2),
            ("p edge 2 1\nn 1 -1", 2),
            ("p edge 2 1\nx 1", 2),
            ("p edge 2 1\np edge 2 1", 2),
            ("c nothing", 1),
            ("p edge two 1", 1),
        ],
    )
    def test_errors(self, text: str, line: int):
        """Test malformed files name the offending line.

        Args:
            text: File content
            line: Expected line number
        """
        with pytest.raises(TraceParseError) as exc:
            parse_dimacs(text)

        assert exc.value.line == line
