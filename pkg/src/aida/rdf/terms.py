"""RDF term and triple model.

Terms are immutable value objects: IRIs, blank nodes, and literals.
Every literal carries a datatype; plain literals default to xsd:string and
language-tagged literals use rdf:langString.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from aida.namespaces import RDF_LANGSTRING, XSD_STRING

_IRI_SCHEME_CHARS = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789+-.")


class TermError(ValueError):
    """Raised when a term or triple violates the RDF data model."""


def _has_scheme(iri: str) -> bool:
    colon = iri.find(":")
    if colon <= 0:
        return False
    head = iri[0]
    if not head.isalpha():
        return False
    return all(c in _IRI_SCHEME_CHARS for c in iri[:colon])


@dataclass(frozen=True, order=True)
class Iri:
    value: str

    def __post_init__(self) -> None:
        if not _has_scheme(self.value):
            raise TermError(f"IRI is not absolute (missing scheme): {self.value!r}")

    def n3(self) -> str:
        return f"<{self.value}>"


@dataclass(frozen=True, order=True)
class BlankNode:
    label: str

    def __post_init__(self) -> None:
        if not self.label:
            raise TermError("blank node label must be non-empty")

    def n3(self) -> str:
        return f"_:{self.label}"


_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r", "\t": "\\t"}


def escape_string(text: str) -> str:
    return "".join(_ESCAPES.get(c, c) for c in text)


@dataclass(frozen=True)
class Literal:
    lexical: str
    datatype: Iri = field(default_factory=lambda: Iri(XSD_STRING))
    language: str | None = None

    def __post_init__(self) -> None:
        if self.language is not None:
            if not self.language:
                raise TermError("language tag must be non-empty when present")
            if self.datatype.value != RDF_LANGSTRING:
                object.__setattr__(self, "datatype", Iri(RDF_LANGSTRING))
        elif self.datatype.value == RDF_LANGSTRING:
            raise TermError("rdf:langString literal requires a language tag")

    def n3(self) -> str:
        quoted = f'"{escape_string(self.lexical)}"'
        if self.language is not None:
            return f"{quoted}@{self.language}"
        if self.datatype.value == XSD_STRING:
            return quoted
        return f"{quoted}^^{self.datatype.n3()}"


Term = Iri | BlankNode | Literal


def term_sort_key(term: Term) -> tuple[int, str]:
    """Total order over terms: IRIs, then blank nodes, then literals."""
    if isinstance(term, Iri):
        return (0, term.value)
    if isinstance(term, BlankNode):
        return (1, term.label)
    return (2, term.n3())


@dataclass(frozen=True)
class Triple:
    subject: Term
    predicate: Term
    object: Term

    def __post_init__(self) -> None:
        if isinstance(self.subject, Literal):
            raise TermError("triple subject cannot be a literal")
        if not isinstance(self.predicate, Iri):
            raise TermError("triple predicate must be an IRI")

    def sort_key(self) -> tuple:
        return (
            term_sort_key(self.subject),
            term_sort_key(self.predicate),
            term_sort_key(self.object),
        )

    def n3(self) -> str:
        return f"{self.subject.n3()} {self.predicate.n3()} {self.object.n3()} ."
