"""Abstract syntax for the SPARQL subset: SELECT over basic graph patterns
with sequence/star property paths and STR-equality or numeric filters."""

from __future__ import annotations

from dataclasses import dataclass, field

from aida.rdf.terms import Iri, Term, term_sort_key


@dataclass(frozen=True, order=True)
class Var:
    name: str

    def __str__(self) -> str:
        return f"?{self.name}"


@dataclass(frozen=True)
class PathAtom:
    iri: Iri


@dataclass(frozen=True)
class PathSeq:
    parts: tuple["PropertyPath", ...]


@dataclass(frozen=True)
class PathStar:
    inner: "PropertyPath"


PropertyPath = PathAtom | PathSeq | PathStar


@dataclass(frozen=True)
class TriplePattern:
    subject: Term | Var
    predicate: Term | Var | PropertyPath
    object: Term | Var

    def variables(self) -> set[Var]:
        out = set()
        for item in (self.subject, self.predicate, self.object):
            if isinstance(item, Var):
                out.add(item)
        return out


@dataclass(frozen=True)
class StrEqualsFilter:
    var: Var
    value: str


@dataclass(frozen=True)
class CompareFilter:
    var: Var
    op: str  # one of = != < <= > >=
    value: float


Filter = StrEqualsFilter | CompareFilter
Pattern = TriplePattern | StrEqualsFilter | CompareFilter


@dataclass
class Query:
    prefixes: dict[str, str]
    projection: list[Var] | None  # None means SELECT *
    patterns: list[Pattern]

    def triple_patterns(self) -> list[TriplePattern]:
        return [p for p in self.patterns if isinstance(p, TriplePattern)]

    def filters(self) -> list[Filter]:
        return [p for p in self.patterns if not isinstance(p, TriplePattern)]

    def pattern_variables(self) -> set[Var]:
        out: set[Var] = set()
        for p in self.triple_patterns():
            out.update(p.variables())
        return out


def _binding_key(term: Term | None):
    return (0,) if term is None else (1, *term_sort_key(term))


@dataclass
class ResultTable:
    header: list[str]
    rows: list[dict[str, Term]] = field(default_factory=list)

    def sort(self) -> None:
        self.rows.sort(key=lambda row: tuple(_binding_key(row.get(v)) for v in self.header))

    def as_tuples(self) -> list[tuple]:
        return [tuple(row.get(v) for v in self.header) for row in self.rows]
