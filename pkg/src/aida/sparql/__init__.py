"""SPARQL-subset parsing and evaluation."""

from aida.sparql.ast import (
    CompareFilter,
    PathAtom,
    PathSeq,
    PathStar,
    PropertyPath,
    Query,
    ResultTable,
    StrEqualsFilter,
    TriplePattern,
    Var,
)
from aida.sparql.evaluator import eval_path, evaluate, str_value
from aida.sparql.parser import parse_query
from aida.sparql.render import table_to_csv, table_to_json

__all__ = [
    "CompareFilter",
    "PathAtom",
    "PathSeq",
    "PathStar",
    "PropertyPath",
    "Query",
    "ResultTable",
    "StrEqualsFilter",
    "TriplePattern",
    "Var",
    "eval_path",
    "evaluate",
    "parse_query",
    "str_value",
    "table_to_csv",
    "table_to_json",
]
