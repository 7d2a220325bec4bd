"""Result table serialization: CSV and JSON rows."""

from __future__ import annotations

import csv
import io

from aida.rdf.terms import BlankNode, Iri, Literal, Term
from aida.sparql.ast import ResultTable


def term_to_cell(term: Term | None) -> dict | None:
    if term is None:
        return None
    if isinstance(term, Iri):
        return {"type": "iri", "value": term.value}
    if isinstance(term, BlankNode):
        return {"type": "bnode", "value": term.label}
    cell: dict = {"type": "literal", "value": term.lexical}
    if term.language is not None:
        cell["lang"] = term.language
    elif term.datatype.value != "http://www.w3.org/2001/XMLSchema#string":
        cell["datatype"] = term.datatype.value
    return cell


def _flat(term: Term | None) -> str:
    if term is None:
        return ""
    if isinstance(term, Iri):
        return term.value
    if isinstance(term, BlankNode):
        return f"_:{term.label}"
    return term.lexical


def table_to_csv(table: ResultTable) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(table.header)
    for row in table.rows:
        writer.writerow([_flat(row.get(v)) for v in table.header])
    return out.getvalue()


def table_to_json(table: ResultTable) -> dict:
    return {
        "header": list(table.header),
        "rows": [{v: term_to_cell(row.get(v)) for v in table.header if row.get(v) is not None} for row in table.rows],
    }
