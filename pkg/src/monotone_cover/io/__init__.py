"""Instance files: schema, loaders, writers and the DIMACS reader."""

from monotone_cover.io.dimacs import parse_dimacs
from monotone_cover.io.documents import (
    Problem,
    ProblemKind,
    dump_document,
    instance_to_dict,
    json_pointer,
    load_problem,
    problem_from_dict,
    two_stage_to_dict,
    upgradable_to_dict,
    validate_document,
)
from monotone_cover.io.schema import DOCUMENT_TYPES, Document

__all__ = [
    "DOCUMENT_TYPES",
    "Document",
    "Problem",
    "ProblemKind",
    "dump_document",
    "instance_to_dict",
    "json_pointer",
    "load_problem",
    "parse_dimacs",
    "problem_from_dict",
    "two_stage_to_dict",
    "upgradable_to_dict",
    "validate_document",
]
