"""Recursive-descent parser for the SPARQL subset."""

from __future__ import annotations

import re
from dataclasses import dataclass

from aida.namespaces import RDF_TYPE, XSD_BOOLEAN, XSD_DECIMAL, XSD_DOUBLE, XSD_INTEGER
from aida.rdf.terms import BlankNode, Iri, Literal, TermError
from aida.rdf.turtle import ParseError
from aida.sparql.ast import (
    CompareFilter,
    PathAtom,
    PathSeq,
    PathStar,
    Query,
    StrEqualsFilter,
    TriplePattern,
    Var,
)

_VARNAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_PNAME_NS = re.compile(r"[A-Za-z][A-Za-z0-9_\-]*")
_PN_LOCAL = re.compile(r"[A-Za-z0-9_][A-Za-z0-9_\-.]*|")
_NUMBER = re.compile(r"[+-]?(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?")
_IRIREF = re.compile(r"<([^<>\"{}|^`\\\s]*)>")


@dataclass
class Token:
    kind: str
    value: str
    line: int
    column: int


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

    def tokens(self) -> list[Token]:
        out = []
        while True:
            tok = self._next()
            out.append(tok)
            if tok.kind == "eof":
                return out

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

    def _next(self) -> Token:
        self._skip_ws()
        line, col = self.line, self.col
        if self.pos >= len(self.text):
            return Token("eof", "", line, col)
        text, i = self.text, self.pos
        c = text[i]

        if c == "?" or c == "$":
            m = _VARNAME.match(text, i + 1)
            if not m:
                raise self.error("variable name expected")
            self._advance(1 + len(m.group(0)))
            return Token("var", m.group(0), line, col)

        if c == "<":
            m = _IRIREF.match(text, i)
            if m:
                self._advance(m.end() - i)
                return Token("iri", m.group(1), line, col)
            if text.startswith("<=", i):
                self._advance(2)
                return Token("op", "<=", line, col)
            self._advance(1)
            return Token("op", "<", line, col)

        if c == '"' or c == "'":
            j = i + 1
            out = []
            while j < len(text):
                ch = text[j]
                if ch == "\\" and j + 1 < len(text):
                    esc = text[j + 1]
                    out.append({"n": "\n", "t": "\t", "r": "\r", '"': '"', "'": "'", "\\": "\\"}.get(esc, esc))
                    j += 2
                elif ch == c:
                    self._advance(j + 1 - i)
                    return Token("string", "".join(out), line, col)
                elif ch == "\n":
                    raise self.error("newline in string")
                else:
                    out.append(ch)
                    j += 1
            raise self.error("unterminated string")

        if c == "_" and text.startswith("_:", i):
            m = _PN_LOCAL.match(text, i + 2)
            label = m.group(0)
            if not label:
                raise self.error("blank node label expected")
            self._advance(2 + len(label))
            return Token("bnode", label, line, col)

        two = text[i : i + 2]
        if two in (">=", "!="):
            self._advance(2)
            return Token("op", two, line, col)
        if c in "=>":
            self._advance(1)
            return Token("op", c, line, col)

        for punct, kind in (
            ("{", "lbrace"), ("}", "rbrace"), ("(", "lparen"), (")", "rparen"),
            (".", "dot"), (";", "semi"), (",", "comma"), ("*", "star"), ("/", "slash"),
        ):
            if c == punct:
                if c == "." and i + 1 < len(text) and text[i + 1].isdigit():
                    break
                self._advance(1)
                return Token(kind, punct, line, col)

        m = _NUMBER.match(text, i)
        if m and (c.isdigit() or c in "+-."):
            self._advance(len(m.group(0)))
            return Token("number", m.group(0), line, col)

        m = _PNAME_NS.match(text, i)
        if m:
            word = m.group(0)
            after = i + len(word)
            if after < len(text) and text[after] == ":":
                m2 = _PN_LOCAL.match(text, after + 1)
                local = m2.group(0)
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


class _QueryParser:
    def __init__(self, tokens: list[Token]) -> None:
        self.tokens = tokens
        self.idx = 0
        self.prefixes: dict[str, str] = {}

    def peek(self) -> Token:
        return self.tokens[self.idx]

    def take(self) -> Token:
        tok = self.tokens[self.idx]
        self.idx += 1
        return tok

    def expect(self, kind: str, value: str | None = None) -> Token:
        tok = self.take()
        if tok.kind != kind or (value is not None and tok.value.upper() != value):
            wanted = value or kind
            raise ParseError(f"expected {wanted}, found {tok.value!r}", tok.line, tok.column)
        return tok

    def keyword(self) -> str | None:
        tok = self.peek()
        return tok.value.upper() if tok.kind == "word" else None

    def resolve(self, tok: Token) -> Iri:
        prefix, _, local = tok.value.partition(":")
        if prefix not in self.prefixes:
            raise ParseError(f"undeclared prefix: {prefix!r}", tok.line, tok.column)
        try:
            return Iri(self.prefixes[prefix] + local)
        except TermError as exc:
            raise ParseError(str(exc), tok.line, tok.column) from None

    def parse(self) -> Query:
        while self.keyword() == "PREFIX":
            self.take()
            name = self.expect("pname")
            prefix, _, rest = name.value.partition(":")
            if rest:
                raise ParseError("prefix declaration must end with ':'", name.line, name.column)
            iri = self.expect("iri")
            self.prefixes[prefix] = iri.value

        select = self.expect("word")
        if select.value.upper() != "SELECT":
            raise ParseError("only SELECT queries are supported", select.line, select.column)

        projection: list[Var] | None
        if self.peek().kind == "star":
            self.take()
            projection = None
        else:
            projection = []
            while self.peek().kind == "var":
                projection.append(Var(self.take().value))
            if not projection:
                tok = self.peek()
                raise ParseError("projection must list variables or '*'", tok.line, tok.column)

        if self.keyword() == "WHERE":
            self.take()
        self.expect("lbrace")
        patterns = self._group()
        self.expect("rbrace")
        tail = self.peek()
        if tail.kind != "eof":
            raise ParseError(f"unexpected trailing {tail.value!r}", tail.line, tail.column)

        query = Query(prefixes=dict(self.prefixes), projection=projection, patterns=patterns)
        self._validate(query, select)
        return query

    def _validate(self, query: Query, at: Token) -> None:
        bound = query.pattern_variables()
        if query.projection is not None:
            for var in query.projection:
                if var not in bound:
                    raise ParseError(
                        f"projected variable ?{var.name} does not appear in WHERE",
                        at.line,
                        at.column,
                    )
        for flt in query.filters():
            if flt.var not in bound:
                raise ParseError(
                    f"filter variable ?{flt.var.name} does not appear in WHERE",
                    at.line,
                    at.column,
                )

    def _group(self) -> list:
        patterns: list = []
        while True:
            tok = self.peek()
            if tok.kind == "rbrace" or tok.kind == "eof":
                return patterns
            if self.keyword() == "FILTER":
                self.take()
                patterns.append(self._filter())
                if self.peek().kind == "dot":
                    self.take()
                continue
            subject = self._term(allow_literal=False)
            patterns.extend(self._predicate_object_list(subject))
            if self.peek().kind == "dot":
                self.take()
            elif self.peek().kind not in ("rbrace", "eof") and self.keyword() != "FILTER":
                t = self.peek()
                raise ParseError(f"expected '.' between triples, found {t.value!r}", t.line, t.column)

    def _predicate_object_list(self, subject) -> list[TriplePattern]:
        out = []
        while True:
            predicate = self._verb()
            while True:
                obj = self._term(allow_literal=True)
                out.append(TriplePattern(subject, predicate, obj))
                if self.peek().kind == "comma":
                    self.take()
                    continue
                break
            if self.peek().kind == "semi":
                self.take()
                if self.peek().kind in ("dot", "rbrace", "eof"):
                    return out
                continue
            return out

    def _verb(self):
        tok = self.peek()
        if tok.kind == "var":
            self.take()
            return Var(tok.value)
        path = self._path()
        if isinstance(path, PathAtom):
            return path.iri
        return path

    def _path(self):
        parts = [self._path_elt()]
        while self.peek().kind == "slash":
            self.take()
            parts.append(self._path_elt())
        if len(parts) == 1:
            return parts[0]
        return PathSeq(tuple(parts))

    def _path_elt(self):
        primary = self._path_primary()
        if self.peek().kind == "star":
            self.take()
            return PathStar(primary)
        return primary

    def _path_primary(self):
        tok = self.take()
        if tok.kind == "word" and tok.value == "a":
            return PathAtom(Iri(RDF_TYPE))
        if tok.kind == "iri":
            try:
                return PathAtom(Iri(tok.value))
            except TermError as exc:
                raise ParseError(str(exc), tok.line, tok.column) from None
        if tok.kind == "pname":
            return PathAtom(self.resolve(tok))
        if tok.kind == "lparen":
            inner = self._path()
            self.expect("rparen")
            if isinstance(inner, PathAtom):
                return inner
            return inner
        raise ParseError(f"expected property path, found {tok.value!r}", tok.line, tok.column)

    def _term(self, allow_literal: bool):
        tok = self.take()
        if tok.kind == "var":
            return Var(tok.value)
        if tok.kind == "iri":
            try:
                return Iri(tok.value)
            except TermError as exc:
                raise ParseError(str(exc), tok.line, tok.column) from None
        if tok.kind == "pname":
            return self.resolve(tok)
        if tok.kind == "bnode":
            return BlankNode(tok.value)
        if allow_literal and tok.kind == "string":
            return Literal(tok.value)
        if allow_literal and tok.kind == "number":
            return _numeric_literal(tok.value)
        if allow_literal and tok.kind == "word" and tok.value in ("true", "false"):
            return Literal(tok.value, Iri(XSD_BOOLEAN))
        raise ParseError(f"expected term, found {tok.value!r}", tok.line, tok.column)

    def _filter(self):
        self.expect("lparen")
        tok = self.peek()
        if tok.kind == "word" and tok.value.upper() == "STR":
            self.take()
            self.expect("lparen")
            var = Var(self.expect("var").value)
            self.expect("rparen")
            op = self.expect("op")
            if op.value != "=":
                raise ParseError("STR comparisons support '=' only", op.line, op.column)
            value = self.expect("string")
            self.expect("rparen")
            return StrEqualsFilter(var, value.value)
        if tok.kind == "var":
            var = Var(self.take().value)
            op = self.expect("op")
            if op.value not in ("=", "!=", "<", "<=", ">", ">="):
                raise ParseError(f"unsupported operator {op.value!r}", op.line, op.column)
            value_tok = self.take()
            if value_tok.kind == "number":
                value: float = float(value_tok.value)
            elif value_tok.kind == "string":
                if op.value not in ("=", "!="):
                    raise ParseError("string constants support = and != only", value_tok.line, value_tok.column)
                self.expect("rparen")
                if op.value == "=":
                    return StrEqualsFilter(var, value_tok.value)
                raise ParseError("string inequality filters are not supported", value_tok.line, value_tok.column)
            else:
                raise ParseError(
                    f"expected numeric or string constant, found {value_tok.value!r}",
                    value_tok.line,
                    value_tok.column,
                )
            self.expect("rparen")
            return CompareFilter(var, op.value, value)
        raise ParseError(f"unsupported filter expression at {tok.value!r}", tok.line, tok.column)


def _numeric_literal(lexical: str) -> Literal:
    if "e" in lexical or "E" in lexical:
        return Literal(lexical, Iri(XSD_DOUBLE))
    if "." in lexical:
        return Literal(lexical, Iri(XSD_DECIMAL))
    return Literal(lexical, Iri(XSD_INTEGER))


def parse_query(text: str) -> Query:
    """Parse a SELECT query; raises ParseError with line/column on failure."""
    return _QueryParser(_Lexer(text).tokens()).parse()
