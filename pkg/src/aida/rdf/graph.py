"""Indexed triple store with set semantics.

Three permutation indexes (SPO, POS, OSP) back `match`; all mutation is
idempotent.  By convention a graph is frozen once loaded: readers share a
snapshot and writers build a new graph via `copy()` (copy-on-write).
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator

from aida.rdf.terms import BlankNode, Iri, Term, Triple, term_sort_key


class Graph:
    def __init__(self, prefixes: dict[str, str] | None = None) -> None:
        self._triples: set[Triple] = set()
        self._spo: dict[Term, dict[Term, set[Term]]] = {}
        self._pos: dict[Term, dict[Term, set[Term]]] = {}
        self._osp: dict[Term, dict[Term, set[Term]]] = {}
        self.prefixes: dict[str, str] = dict(prefixes or {})

    def __len__(self) -> int:
        return len(self._triples)

    def __contains__(self, triple: Triple) -> bool:
        return triple in self._triples

    def __iter__(self) -> Iterator[Triple]:
        return iter(sorted(self._triples, key=Triple.sort_key))

    @staticmethod
    def _index_add(index: dict, a: Term, b: Term, c: Term) -> None:
        index.setdefault(a, {}).setdefault(b, set()).add(c)

    def add(self, triple: Triple) -> None:
        if triple in self._triples:
            return
        self._triples.add(triple)
        s, p, o = triple.subject, triple.predicate, triple.object
        self._index_add(self._spo, s, p, o)
        self._index_add(self._pos, p, o, s)
        self._index_add(self._osp, o, s, p)

    def update(self, triples: Iterable[Triple]) -> None:
        for t in triples:
            self.add(t)

    def bind(self, prefix: str, namespace: str) -> None:
        self.prefixes[prefix] = namespace

    def copy(self) -> "Graph":
        g = Graph(self.prefixes)
        g.update(self._triples)
        return g

    def match(self, s: Term | None = None, p: Term | None = None, o: Term | None = None) -> list[Triple]:
        """Triples matching all bound components, sorted by term serialization."""
        return sorted(self.match_iter(s, p, o), key=Triple.sort_key)

    def match_iter(self, s: Term | None = None, p: Term | None = None, o: Term | None = None) -> Iterator[Triple]:
        """Unsorted variant of `match`; the evaluator's hot path."""
        if s is not None and p is not None and o is not None:
            t = Triple(s, p, o)
            if t in self._triples:
                yield t
            return
        if s is not None:
            by_p = self._spo.get(s, {})
            if p is not None:
                for obj in by_p.get(p, ()):
                    yield Triple(s, p, obj)
            else:
                for pred, objs in by_p.items():
                    for obj in objs:
                        if o is None or obj == o:
                            yield Triple(s, pred, obj)
            return
        if p is not None:
            by_o = self._pos.get(p, {})
            if o is not None:
                for subj in by_o.get(o, ()):
                    yield Triple(subj, p, o)
            else:
                for obj, subjs in by_o.items():
                    for subj in subjs:
                        yield Triple(subj, p, obj)
            return
        if o is not None:
            for subj, preds in self._osp.get(o, {}).items():
                for pred in preds:
                    yield Triple(subj, pred, o)
            return
        yield from self._triples

    def count_match(self, s: Term | None = None, p: Term | None = None, o: Term | None = None) -> int:
        return sum(1 for _ in self.match_iter(s, p, o))

    def subjects(self, p: Term | None = None, o: Term | None = None) -> list[Term]:
        return sorted({t.subject for t in self.match_iter(None, p, o)}, key=term_sort_key)

    def objects(self, s: Term | None = None, p: Term | None = None) -> list[Term]:
        return sorted({t.object for t in self.match_iter(s, p, None)}, key=term_sort_key)

    def value(self, s: Term, p: Term) -> Term | None:
        """The object of (s, p, ?) when present; smallest by sort order if several."""
        objs = self.objects(s, p)
        return objs[0] if objs else None

    def nodes(self) -> list[Term]:
        """All terms occurring in subject or object position."""
        seen = {t.subject for t in self._triples} | {t.object for t in self._triples}
        return sorted(seen, key=term_sort_key)

    def expand_qname(self, qname: str) -> Iri:
        prefix, _, local = qname.partition(":")
        if prefix not in self.prefixes:
            raise KeyError(f"undeclared prefix: {prefix!r}")
        return Iri(self.prefixes[prefix] + local)

    # -- isomorphism -----------------------------------------------------

    def isomorphic(self, other: "Graph") -> bool:
        """True when the graphs are equal up to bijective blank-node renaming."""
        if len(self) != len(other):
            return False
        mine = {t for t in self._triples if _ground(t)}
        theirs = {t for t in other._triples if _ground(t)}
        if mine != theirs:
            return False
        my_b = sorted(self._triples - mine, key=Triple.sort_key)
        their_b = sorted(other._triples - theirs, key=Triple.sort_key)
        if len(my_b) != len(their_b):
            return False
        my_nodes = _bnodes(my_b)
        their_nodes = _bnodes(their_b)
        if len(my_nodes) != len(their_nodes):
            return False
        return _match_bnodes(my_b, their_b, my_nodes, their_nodes, {})


def _ground(t: Triple) -> bool:
    return not isinstance(t.subject, BlankNode) and not isinstance(t.object, BlankNode)


def _bnodes(triples: Iterable[Triple]) -> list[BlankNode]:
    out = []
    seen = set()
    for t in triples:
        for term in (t.subject, t.object):
            if isinstance(term, BlankNode) and term not in seen:
                seen.add(term)
                out.append(term)
    return out


def _rename(t: Triple, mapping: dict[BlankNode, BlankNode]) -> Triple:
    s = mapping.get(t.subject, t.subject) if isinstance(t.subject, BlankNode) else t.subject
    o = mapping.get(t.object, t.object) if isinstance(t.object, BlankNode) else t.object
    return Triple(s, t.predicate, o)


def _match_bnodes(
    mine: list[Triple],
    theirs: list[Triple],
    my_nodes: list[BlankNode],
    their_nodes: list[BlankNode],
    mapping: dict[BlankNode, BlankNode],
) -> bool:
    """Backtracking search for a bnode bijection; graphs here are small."""
    if len(mapping) == len(my_nodes):
        target = set(theirs)
        return all(_rename(t, mapping) in target for t in mine)
    node = my_nodes[len(mapping)]
    used = set(mapping.values())
    for candidate in their_nodes:
        if candidate in used:
            continue
        mapping[node] = candidate
        if _match_bnodes(mine, theirs, my_nodes, their_nodes, mapping):
            return True
        del mapping[node]
    return False


def graph_from_triples(triples: Iterable[Triple], prefixes: dict[str, str] | None = None) -> Graph:
    g = Graph(prefixes)
    g.update(triples)
    return g
