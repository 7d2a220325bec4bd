"""RDF term model, indexed graph store, Turtle and N-Triples formats."""

from aida.rdf.graph import Graph, graph_from_triples
from aida.rdf.ntriples import parse_ntriples, serialize_ntriples
from aida.rdf.terms import BlankNode, Iri, Literal, Term, TermError, Triple, term_sort_key
from aida.rdf.turtle import ParseError, parse_turtle, serialize_turtle

__all__ = [
    "BlankNode",
    "Graph",
    "Iri",
    "Literal",
    "ParseError",
    "Term",
    "TermError",
    "Triple",
    "graph_from_triples",
    "parse_ntriples",
    "parse_turtle",
    "serialize_ntriples",
    "serialize_turtle",
    "term_sort_key",
]
