"""Query evaluation over an (optionally materialized) graph.

Basic graph patterns join left-to-right after a most-selective-first
reordering; filters apply as soon as their variable is bound.  Plain triple
patterns follow bag semantics.  Property-path predicates (sequence, star)
evaluate to distinct endpoint pairs: the zero-or-more step is a
reflexive-transitive closure, so repeated derivation routes through a
materialized hierarchy never duplicate rows.
"""

from __future__ import annotations

from aida.rdf.graph import Graph
from aida.rdf.terms import Iri, Literal, Term
from aida.sparql.ast import (
    CompareFilter,
    Filter,
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

Bindings = dict[Var, Term]


def _target_graph(source) -> Graph:
    return source.graph if hasattr(source, "graph") else source


def str_value(term: Term) -> str:
    """SPARQL STR(): IRI string or literal lexical form."""
    if isinstance(term, Iri):
        return term.value
    if isinstance(term, Literal):
        return term.lexical
    return term.label


def _numeric(term: Term) -> float | None:
    if not isinstance(term, Literal):
        return None
    try:
        return float(term.lexical)
    except ValueError:
        return None


def _filter_passes(flt: Filter, term: Term) -> bool:
    if isinstance(flt, StrEqualsFilter):
        return str_value(term) == flt.value
    value = _numeric(term)
    if value is None:
        return False
    return {
        "=": value == flt.value,
        "!=": value != flt.value,
        "<": value < flt.value,
        "<=": value <= flt.value,
        ">": value > flt.value,
        ">=": value >= flt.value,
    }[flt.op]


def _resolve(item, bindings: Bindings):
    if isinstance(item, Var):
        return bindings.get(item)
    return item


def _pattern_selectivity(pattern: TriplePattern, bound: set[Var]) -> tuple[int, int]:
    positions = (pattern.subject, pattern.predicate, pattern.object)
    unbound = 0
    for item in positions:
        if isinstance(item, Var) and item not in bound:
            unbound += 1
    has_path = 0 if isinstance(pattern.predicate, (Var, Iri)) else 1
    return (unbound, has_path)


def _order_patterns(patterns: list[TriplePattern]) -> list[TriplePattern]:
    remaining = list(patterns)
    bound: set[Var] = set()
    ordered = []
    while remaining:
        best = min(enumerate(remaining), key=lambda item: (_pattern_selectivity(item[1], bound), item[0]))
        _, pattern = best
        remaining.remove(pattern)
        ordered.append(pattern)
        bound.update(pattern.variables())
    return ordered


def _extend(bindings: Bindings, pairs: list[tuple]) -> Bindings | None:
    """Bind (item, value) pairs; None on conflict with existing bindings."""
    out = bindings
    copied = False
    for item, value in pairs:
        if isinstance(item, Var):
            current = out.get(item)
            if current is None:
                if not copied:
                    out = dict(out)
                    copied = True
                out[item] = value
            elif current != value:
                return None
        elif item != value:
            return None
    return out


def _match_plain(g: Graph, pattern: TriplePattern, bindings: Bindings) -> list[Bindings]:
    s = _resolve(pattern.subject, bindings)
    p = _resolve(pattern.predicate, bindings)
    o = _resolve(pattern.object, bindings)
    s_q = s if not isinstance(s, Var) and s is not None else None
    p_q = p if not isinstance(p, Var) and p is not None else None
    o_q = o if not isinstance(o, Var) and o is not None else None
    out = []
    for triple in g.match_iter(s_q, p_q, o_q):
        extended = _extend(
            bindings,
            [
                (pattern.subject, triple.subject),
                (pattern.predicate, triple.predicate),
                (pattern.object, triple.object),
            ],
        )
        if extended is not None:
            out.append(extended)
    return out


# -- property paths ----------------------------------------------------------


def _step_forward(g: Graph, path: PropertyPath, node: Term) -> set[Term]:
    return {o for _, o in eval_path(g, path, node, None)}


def _step_backward(g: Graph, path: PropertyPath, node: Term) -> set[Term]:
    return {s for s, _ in eval_path(g, path, None, node)}


def _closure_from(g: Graph, inner: PropertyPath, start: Term, forward: bool) -> set[Term]:
    seen = {start}
    frontier = [start]
    step = _step_forward if forward else _step_backward
    while frontier:
        node = frontier.pop()
        for nxt in step(g, inner, node):
            if nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
    return seen


def eval_path(g: Graph, path: PropertyPath, s: Term | None, o: Term | None) -> set[tuple[Term, Term]]:
    """Distinct (subject, object) pairs related by the path, restricted by
    whichever endpoints are bound."""
    if isinstance(path, PathAtom):
        return {(t.subject, t.object) for t in g.match_iter(s, path.iri, o)}

    if isinstance(path, PathSeq):
        first, rest = path.parts[0], path.parts[1:]
        current = eval_path(g, first, s, o if not rest else None)
        for i, part in enumerate(rest):
            is_last = i == len(rest) - 1
            by_mid: dict[Term, set[Term]] = {}
            for start, mid in current:
                by_mid.setdefault(mid, set()).add(start)
            nxt: set[tuple[Term, Term]] = set()
            for mid, starts in by_mid.items():
                for _, end in eval_path(g, part, mid, o if is_last else None):
                    for start in starts:
                        nxt.add((start, end))
            current = nxt
        return current

    if isinstance(path, PathStar):
        if s is not None:
            reachable = _closure_from(g, path.inner, s, forward=True)
            if o is not None:
                return {(s, o)} if o in reachable else set()
            return {(s, node) for node in reachable}
        if o is not None:
            reachable = _closure_from(g, path.inner, o, forward=False)
            return {(node, o) for node in reachable}
        pairs: set[tuple[Term, Term]] = set()
        for node in g.nodes():
            for end in _closure_from(g, path.inner, node, forward=True):
                pairs.add((node, end))
        return pairs

    raise TypeError(f"unknown path node: {path!r}")


def _match_path(g: Graph, pattern: TriplePattern, bindings: Bindings) -> list[Bindings]:
    s = _resolve(pattern.subject, bindings)
    o = _resolve(pattern.object, bindings)
    s_q = s if not isinstance(s, Var) and s is not None else None
    o_q = o if not isinstance(o, Var) and o is not None else None
    out = []
    for subj, obj in sorted(
        eval_path(g, pattern.predicate, s_q, o_q),
        key=lambda pair: (pair[0].n3(), pair[1].n3()),
    ):
        extended = _extend(bindings, [(pattern.subject, subj), (pattern.object, obj)])
        if extended is not None:
            out.append(extended)
    return out


# -- top-level evaluation ------------------------------------------------------


def evaluate(query: Query, source) -> ResultTable:
    """Evaluate a parsed query; accepts a Graph or anything with `.graph`."""
    g = _target_graph(source)
    ordered = _order_patterns(query.triple_patterns())
    filters = list(query.filters())

    solutions: list[Bindings] = [{}]
    applied: set[int] = set()
    bound: set[Var] = set()
    for pattern in ordered:
        next_solutions: list[Bindings] = []
        for bindings in solutions:
            if isinstance(pattern.predicate, (PathSeq, PathStar)):
                next_solutions.extend(_match_path(g, pattern, bindings))
            else:
                next_solutions.extend(_match_plain(g, pattern, bindings))
        solutions = next_solutions
        bound.update(pattern.variables())
        for idx, flt in enumerate(filters):
            if idx in applied or flt.var not in bound:
                continue
            applied.add(idx)
            solutions = [s for s in solutions if flt.var in s and _filter_passes(flt, s[flt.var])]
        if not solutions:
            break

    if query.projection is None:
        header = sorted({v.name for v in query.pattern_variables()})
    else:
        header = [v.name for v in query.projection]

    table = ResultTable(header=header)
    if not query.triple_patterns():
        table.rows = []
        return table
    for bindings in solutions:
        table.rows.append({v.name: t for v, t in bindings.items() if v.name in header})
    table.sort()
    return table
