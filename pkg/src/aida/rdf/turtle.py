"""Turtle parsing and serialization.

Supported subset: prefix declarations (`@prefix` / `PREFIX`), `a`, `;` and
`,` continuations, IRIs and prefixed names, plain / typed / language-tagged
literals, numeric and boolean shorthand, labeled blank nodes and anonymous
`[ ... ]` property lists, `#` comments.  No collections or quoted triples.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass

from aida.namespaces import XSD_BOOLEAN, XSD_DECIMAL, XSD_DOUBLE, XSD_INTEGER, XSD_STRING
from aida.rdf.graph import Graph
from aida.rdf.terms import BlankNode, Iri, Literal, Term, TermError, Triple


class ParseError(ValueError):
    """Syntax or reference error with 1-based line/column position."""

    def __init__(self, message: str, line: int, column: int) -> None:
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column


@dataclass
class Token:
    kind: str
    value: str
    line: int
    column: int


_PN_LOCAL = re.compile(r"[A-Za-z0-9_\-.]*")
_NUMBER = re.compile(r"[+-]?(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?")
_LANGTAG = re.compile(r"[a-zA-Z]+(?:-[a-zA-Z0-9]+)*")
_PNAME_NS = re.compile(r"[A-Za-z][A-Za-z0-9_\-.]*")


class _Lexer:
    def __init__(self, text: str) -> None:
        self.text = text
        self.pos = 0
        self.line = 1
        self.col = 1

    def error(self, message: str) -> ParseError:
        return ParseError(message, self.line, self.col)

    def _advance(self, n: int) -> None:
        chunk = self.text[self.pos : self.pos + n]
        newlines = chunk.count("\n")
        if newlines:
            self.line += newlines
            self.col = n - chunk.rfind("\n")
        else:
            self.col += n
        self.pos += n

    def _skip_ws(self) -> None:
        while self.pos < len(self.text):
            c = self.text[self.pos]
            if c in " \t\r\n":
                self._advance(1)
            elif c == "#":
                end = self.text.find("\n", self.pos)
                self._advance((end if end != -1 else len(self.text)) - self.pos)
            else:
                return

    def tokens(self) -> list[Token]:
        out = []
        while True:
            tok = self._next()
            out.append(tok)
            if tok.kind == "eof":
                return out

    def _next(self) -> Token:
        self._skip_ws()
        line, col = self.line, self.col
        if self.pos >= len(self.text):
            return Token("eof", "", line, col)
        text, i = self.text, self.pos
        c = text[i]

        if c == "<":
            end = text.find(">", i)
            if end == -1:
                raise self.error("unterminated IRI")
            iri = text[i + 1 : end]
            if any(ch in iri for ch in ' "{}|^`\n'):
                raise self.error(f"invalid character in IRI: {iri!r}")
            self._advance(end - i + 1)
            return Token("iri", iri, line, col)

        if c == '"' or c == "'":
            return self._string(line, col)

        if c == "_" and text.startswith("_:", i):
            m = _PN_LOCAL.match(text, i + 2)
            label = m.group(0)
            if not label:
                raise self.error("blank node label expected after '_:'")
            self._advance(2 + len(label))
            return Token("bnode", label, line, col)

        for punct, kind in ((".", "dot"), (";", "semi"), (",", "comma"), ("[", "lbracket"), ("]", "rbracket")):
            if c == punct:
                # a dot may also start a decimal like .5 — handled by number branch first
                if c == "." and i + 1 < len(text) and text[i + 1].isdigit():
                    break
                self._advance(1)
                return Token(kind, punct, line, col)

        if c == "@":
            m = _PNAME_NS.match(text, i + 1)
            word = m.group(0) if m else ""
            if word == "prefix" or word == "base":
                self._advance(1 + len(word))
                return Token("at_" + word, word, line, col)
            m2 = _LANGTAG.match(text, i + 1)
            if m2:
                self._advance(1 + len(m2.group(0)))
                return Token("langtag", m2.group(0), line, col)
            raise self.error("expected @prefix, @base, or language tag")

        if text.startswith("^^", i):
            self._advance(2)
            return Token("caret2", "^^", line, col)

        m = _NUMBER.match(text, i)
        if m and (c.isdigit() or c in "+-." ):
            word = m.group(0)
            self._advance(len(word))
            return Token("number", word, line, col)

        m = _PNAME_NS.match(text, i)
        if m:
            word = m.group(0)
            after = i + len(word)
            if after < len(text) and text[after] == ":":
                m2 = _PN_LOCAL.match(text, after + 1)
                local = m2.group(0)
                # trailing dot belongs to statement punctuation, not the name
                while local.endswith("."):
                    local = local[:-1]
                self._advance(len(word) + 1 + len(local))
                return Token("pname", f"{word}:{local}", line, col)
            self._advance(len(word))
            return Token("word", word, line, col)
        if c == ":":
            m2 = _PN_LOCAL.match(text, i + 1)
            local = m2.group(0)
            while local.endswith("."):
                local = local[:-1]
            self._advance(1 + len(local))
            return Token("pname", f":{local}", line, col)

        raise self.error(f"unexpected character {c!r}")

    def _string(self, line: int, col: int) -> Token:
        text, i = self.text, self.pos
        quote = text[i]
        j = i + 1
        out = []
        while j < len(text):
            c = text[j]
            if c == "\\":
                if j + 1 >= len(text):
                    raise self.error("dangling escape in string")
                esc = text[j + 1]
                simple = {"n": "\n", "t": "\t", "r": "\r", '"': '"', "'": "'", "\\": "\\"}
                if esc in simple:
                    out.append(simple[esc])
                    j += 2
                elif esc == "u" or esc == "U":
                    width = 4 if esc == "u" else 8
                    hexpart = text[j + 2 : j + 2 + width]
                    if len(hexpart) != width:
                        raise self.error("truncated unicode escape")
                    try:
                        out.append(chr(int(hexpart, 16)))
                    except ValueError:
                        raise self.error(f"invalid unicode escape \\{esc}{hexpart}") from None
                    j += 2 + width
                else:
                    raise self.error(f"unknown escape \\{esc}")
            elif c == quote:
                self._advance(j + 1 - i)
                return Token("string", "".join(out), line, col)
            elif c == "\n":
                raise self.error("newline in single-quoted string")
            else:
                out.append(c)
                j += 1
        raise self.error("unterminated string")


class _Parser:
    def __init__(self, tokens: list[Token], graph: Graph, bnode_prefix: str = "b") -> None:
        self.tokens = tokens
        self.idx = 0
        self.graph = graph
        self.diagnostics: list[str] = []
        self._fresh = itertools.count(1)
        self._bnode_prefix = bnode_prefix
        self._label_map: dict[str, BlankNode] = {}

    def peek(self) -> Token:
        return self.tokens[self.idx]

    def take(self) -> Token:
        tok = self.tokens[self.idx]
        self.idx += 1
        return tok

    def expect(self, kind: str) -> Token:
        tok = self.take()
        if tok.kind != kind:
            raise ParseError(f"expected {kind}, found {tok.kind} {tok.value!r}", tok.line, tok.column)
        return tok

    def error_at(self, tok: Token, message: str) -> ParseError:
        return ParseError(message, tok.line, tok.column)

    def fresh_bnode(self) -> BlankNode:
        return BlankNode(f"{self._bnode_prefix}{next(self._fresh)}")

    def labeled_bnode(self, label: str) -> BlankNode:
        if label not in self._label_map:
            self._label_map[label] = BlankNode(f"{self._bnode_prefix}{next(self._fresh)}")
        return self._label_map[label]

    def resolve_pname(self, tok: Token) -> Iri:
        prefix, _, local = tok.value.partition(":")
        if prefix not in self.graph.prefixes:
            raise self.error_at(tok, f"undeclared prefix: {prefix!r}")
        try:
            return Iri(self.graph.prefixes[prefix] + local)
        except TermError as exc:
            raise self.error_at(tok, str(exc)) from None

    def parse(self) -> None:
        while self.peek().kind != "eof":
            tok = self.peek()
            if tok.kind == "at_prefix" or (tok.kind == "word" and tok.value.upper() == "PREFIX"):
                self._directive(sparql_style=tok.kind == "word")
            elif tok.kind == "at_base" or (tok.kind == "word" and tok.value.upper() == "BASE"):
                raise self.error_at(tok, "@base is not supported; use absolute IRIs")
            else:
                self._statement()

    def _directive(self, sparql_style: bool) -> None:
        self.take()
        name_tok = self.expect("pname")
        prefix, _, rest = name_tok.value.partition(":")
        if rest:
            raise self.error_at(name_tok, "prefix declaration must end with ':'")
        iri_tok = self.expect("iri")
        if prefix in self.graph.prefixes and self.graph.prefixes[prefix] != iri_tok.value:
            self.diagnostics.append(
                f"line {name_tok.line}: prefix {prefix!r} redefined to <{iri_tok.value}>"
            )
        self.graph.bind(prefix, iri_tok.value)
        if not sparql_style:
            self.expect("dot")

    def _statement(self) -> None:
        subject = self._subject()
        self._predicate_object_list(subject)
        self.expect("dot")

    def _subject(self) -> Term:
        tok = self.peek()
        if tok.kind == "iri":
            self.take()
            return self._iri_from(tok)
        if tok.kind == "pname":
            self.take()
            return self.resolve_pname(tok)
        if tok.kind == "bnode":
            self.take()
            return self.labeled_bnode(tok.value)
        if tok.kind == "lbracket":
            return self._bnode_property_list()
        raise self.error_at(tok, f"expected subject, found {tok.kind} {tok.value!r}")

    def _iri_from(self, tok: Token) -> Iri:
        try:
            return Iri(tok.value)
        except TermError as exc:
            raise self.error_at(tok, str(exc)) from None

    def _predicate(self) -> Iri:
        tok = self.take()
        if tok.kind == "word" and tok.value == "a":
            return Iri("http://www.w3.org/1999/02/22-rdf-syntax-ns#type")
        if tok.kind == "iri":
            return self._iri_from(tok)
        if tok.kind == "pname":
            return self.resolve_pname(tok)
        raise self.error_at(tok, f"expected predicate, found {tok.kind} {tok.value!r}")

    def _predicate_object_list(self, subject: Term) -> None:
        while True:
            predicate = self._predicate()
            while True:
                obj = self._object()
                self.graph.add(Triple(subject, predicate, obj))
                if self.peek().kind == "comma":
                    self.take()
                    continue
                break
            if self.peek().kind == "semi":
                self.take()
                # tolerate trailing ';' before '.'
                if self.peek().kind in ("dot", "rbracket"):
                    return
                continue
            return

    def _object(self) -> Term:
        tok = self.peek()
        if tok.kind == "iri":
            self.take()
            return self._iri_from(tok)
        if tok.kind == "pname":
            self.take()
            return self.resolve_pname(tok)
        if tok.kind == "bnode":
            self.take()
            return self.labeled_bnode(tok.value)
        if tok.kind == "lbracket":
            return self._bnode_property_list()
        if tok.kind == "string":
            self.take()
            return self._literal_tail(tok)
        if tok.kind == "number":
            self.take()
            return _numeric_literal(tok.value)
        if tok.kind == "word" and tok.value in ("true", "false"):
            self.take()
            return Literal(tok.value, Iri(XSD_BOOLEAN))
        raise self.error_at(tok, f"expected object, found {tok.kind} {tok.value!r}")

    def _literal_tail(self, string_tok: Token) -> Literal:
        nxt = self.peek()
        if nxt.kind == "langtag":
            self.take()
            return Literal(string_tok.value, language=nxt.value)
        if nxt.kind == "caret2":
            self.take()
            dt_tok = self.take()
            if dt_tok.kind == "iri":
                return Literal(string_tok.value, self._iri_from(dt_tok))
            if dt_tok.kind == "pname":
                return Literal(string_tok.value, self.resolve_pname(dt_tok))
            raise self.error_at(dt_tok, "expected datatype IRI after '^^'")
        return Literal(string_tok.value)

    def _bnode_property_list(self) -> BlankNode:
        self.expect("lbracket")
        node = self.fresh_bnode()
        if self.peek().kind != "rbracket":
            self._predicate_object_list(node)
        self.expect("rbracket")
        return node


def _numeric_literal(lexical: str) -> Literal:
    if "e" in lexical or "E" in lexical:
        return Literal(lexical, Iri(XSD_DOUBLE))
    if "." in lexical:
        return Literal(lexical, Iri(XSD_DECIMAL))
    return Literal(lexical, Iri(XSD_INTEGER))


def parse_turtle(text: str, bnode_prefix: str = "b") -> tuple[Graph, list[str]]:
    """Parse a Turtle document into a fresh graph.

    Blank node labels are renamed to fresh per-document labels.  Returns the
    graph and a list of non-fatal diagnostics; syntax errors raise ParseError.
    """
    graph = Graph()
    parser = _Parser(_Lexer(text).tokens(), graph, bnode_prefix)
    parser.parse()
    return graph, parser.diagnostics


_PN_LOCAL_FULL = re.compile(r"[A-Za-z0-9_][A-Za-z0-9_\-]*\Z")


def _qname(iri: str, prefixes: dict[str, str]) -> str | None:
    best: tuple[str, str] | None = None
    for prefix, ns in prefixes.items():
        if iri.startswith(ns) and (best is None or len(ns) > len(prefixes[best[0]])):
            best = (prefix, iri[len(ns):])
    if best is None:
        return None
    prefix, local = best
    if not _PN_LOCAL_FULL.match(local):
        return None
    return f"{prefix}:{local}"


def _term_text(term: Term, prefixes: dict[str, str]) -> str:
    if isinstance(term, Iri):
        q = _qname(term.value, prefixes)
        return q if q is not None else term.n3()
    if isinstance(term, Literal) and term.language is None and term.datatype.value != XSD_STRING:
        dt = _qname(term.datatype.value, prefixes)
        if dt is not None:
            from aida.rdf.terms import escape_string

            return f'"{escape_string(term.lexical)}"^^{dt}'
    return term.n3()


def serialize_turtle(graph: Graph) -> str:
    """Deterministic Turtle rendering: sorted prefixes, subjects, predicates."""
    lines = []
    for prefix in sorted(graph.prefixes):
        lines.append(f"@prefix {prefix}: <{graph.prefixes[prefix]}> .")
    if graph.prefixes:
        lines.append("")

    by_subject: dict[Term, list[Triple]] = {}
    for t in graph:
        by_subject.setdefault(t.subject, []).append(t)

    from aida.rdf.terms import term_sort_key

    rdf_type = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"
    for subject in sorted(by_subject, key=term_sort_key):
        triples = by_subject[subject]
        by_pred: dict[Iri, list[Term]] = {}
        for t in triples:
            by_pred.setdefault(t.predicate, []).append(t.object)
        preds = sorted(by_pred, key=lambda p: (p.value != rdf_type, p.value))
        subj_text = _term_text(subject, graph.prefixes)
        pred_lines = []
        for pred in preds:
            pred_text = "a" if pred.value == rdf_type else _term_text(pred, graph.prefixes)
            objs = sorted(by_pred[pred], key=term_sort_key)
            obj_text = ", ".join(_term_text(o, graph.prefixes) for o in objs)
            pred_lines.append(f"{pred_text} {obj_text}")
        joined = " ;\n    ".join(pred_lines)
        lines.append(f"{subj_text} {joined} .")
    return "\n".join(lines) + "\n"
