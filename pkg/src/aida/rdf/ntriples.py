"""N-Triples line format: one absolute-IRI statement per line."""

from __future__ import annotations

from aida.rdf.graph import Graph
from aida.rdf.terms import Triple
from aida.rdf.turtle import ParseError, _Lexer, _Parser


def parse_ntriples(text: str, bnode_prefix: str = "n") -> Graph:
    """Parse N-Triples; errors carry the offending line number."""
    graph = Graph()
    parser = _Parser([], graph, bnode_prefix)
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        tokens = _relocate(_Lexer(stripped).tokens(), lineno)
        parser.tokens = tokens
        parser.idx = 0
        subject = parser._subject()
        predicate = parser._predicate()
        obj = parser._object()
        parser.expect("dot")
        tail = parser.peek()
        if tail.kind != "eof":
            raise ParseError(f"trailing content {tail.value!r}", lineno, tail.column)
        if tokens and any(t.kind in ("pname", "lbracket") for t in tokens):
            raise ParseError("prefixed names are not part of N-Triples", lineno, 1)
        graph.add(Triple(subject, predicate, obj))
    return graph


def _relocate(tokens, lineno):
    for tok in tokens:
        tok.line = lineno
    return tokens


def serialize_ntriples(graph: Graph) -> str:
    return "".join(t.n3() + "\n" for t in graph)
