"""RDFS-subset materialization and schema validation.

Closure rules: subclass/subproperty transitivity, type propagation,
property propagation, and domain/range typing.  Validation covers
undeclared terms, domain/range conformance, subclass cycles, the
label+description annotation audit, and native entity counts.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from aida import namespaces as ns
from aida.rdf.graph import Graph
from aida.rdf.terms import BlankNode, Iri, Literal, Term, Triple

_RDF_TYPE = Iri(ns.RDF_TYPE)
_SUBCLASS = Iri(ns.RDFS_SUBCLASSOF)
_SUBPROP = Iri(ns.RDFS_SUBPROPERTYOF)
_DOMAIN = Iri(ns.RDFS_DOMAIN)
_RANGE = Iri(ns.RDFS_RANGE)
_LABEL = Iri(ns.RDFS_LABEL)
_DESCRIPTION = Iri(ns.DC_DESCRIPTION)
_EQUIVALENT = Iri(ns.OWL_EQUIVALENT_CLASS)

_SCHEMA_PREDICATES = {_SUBCLASS, _SUBPROP, _DOMAIN, _RANGE}

_CLASS_DECLARATIONS = {Iri(ns.OWL_CLASS), Iri(ns.RDFS + "Class")}
_PROPERTY_DECLARATIONS = {
    Iri(ns.OWL_OBJECT_PROPERTY),
    Iri(ns.OWL_DATATYPE_PROPERTY),
    Iri(ns.OWL_ANNOTATION_PROPERTY),
    Iri(ns.RDF + "Property"),
}

#: Vocabulary namespaces whose terms never need local declarations.
_BUILTIN_NAMESPACES = (ns.RDF, ns.RDFS, ns.OWL, ns.XSD)


def _is_builtin(iri: Iri) -> bool:
    return iri.value.startswith(_BUILTIN_NAMESPACES)


def _transitive_closure(edges: dict[Term, set[Term]]) -> dict[Term, set[Term]]:
    """All reachable nodes per source, via iterative DFS."""
    out: dict[Term, set[Term]] = {}
    for start in edges:
        seen: set[Term] = set()
        stack = list(edges[start])
        while stack:
            node = stack.pop()
            if node in seen:
                continue
            seen.add(node)
            stack.extend(edges.get(node, ()))
        out[start] = seen
    return out


@dataclass
class SchemaMaps:
    """Precomputed schema relations, reusable across instance documents."""

    superclasses: dict[Term, set[Term]]
    superproperties: dict[Term, set[Term]]
    domains: dict[Term, set[Term]]
    ranges: dict[Term, set[Term]]


def schema_maps(g: Graph) -> SchemaMaps:
    sub_class: dict[Term, set[Term]] = {}
    sub_prop: dict[Term, set[Term]] = {}
    domains: dict[Term, set[Term]] = {}
    ranges: dict[Term, set[Term]] = {}
    for t in g.match_iter(None, _SUBCLASS, None):
        sub_class.setdefault(t.subject, set()).add(t.object)
    for t in g.match_iter(None, _SUBPROP, None):
        sub_prop.setdefault(t.subject, set()).add(t.object)
    for t in g.match_iter(None, _DOMAIN, None):
        domains.setdefault(t.subject, set()).add(t.object)
    for t in g.match_iter(None, _RANGE, None):
        ranges.setdefault(t.subject, set()).add(t.object)
    return SchemaMaps(
        superclasses=_transitive_closure(sub_class),
        superproperties=_transitive_closure(sub_prop),
        domains=domains,
        ranges=ranges,
    )


class ClosedGraph:
    """A base graph together with its materialized RDFS entailments."""

    def __init__(self, base: Graph, inferred: Graph) -> None:
        self.base = base
        self.inferred = inferred
        self.graph = base.copy()
        self.graph.update(t for t in inferred.match_iter())

    def __len__(self) -> int:
        return len(self.graph)

    def provenance(self, triple: Triple) -> str:
        return "asserted" if triple in self.base else "inferred"


def rdfs_closure(g: Graph) -> ClosedGraph:
    """Materialize the RDFS subset to a fixed point."""
    work = g.copy()
    while True:
        maps = schema_maps(work)
        new: list[Triple] = []
        for sub, supers in maps.superclasses.items():
            for sup in supers:
                t = Triple(sub, _SUBCLASS, sup)
                if t not in work:
                    new.append(t)
        for sub, supers in maps.superproperties.items():
            for sup in supers:
                t = Triple(sub, _SUBPROP, sup)
                if t not in work:
                    new.append(t)
        for triple in list(work.match_iter()):
            s, p, o = triple.subject, triple.predicate, triple.object
            for sup in maps.superproperties.get(p, ()):
                if isinstance(sup, Iri):
                    t = Triple(s, sup, o)
                    if t not in work:
                        new.append(t)
            if p == _RDF_TYPE:
                for sup in maps.superclasses.get(o, ()):
                    t = Triple(s, _RDF_TYPE, sup)
                    if t not in work:
                        new.append(t)
            for d in maps.domains.get(p, ()):
                t = Triple(s, _RDF_TYPE, d)
                if t not in work:
                    new.append(t)
            if not isinstance(o, Literal):
                for r in maps.ranges.get(p, ()):
                    if not _is_datatype(r):
                        t = Triple(o, _RDF_TYPE, r)
                        if t not in work:
                            new.append(t)
        if not new:
            break
        work.update(new)
    inferred = Graph()
    inferred.update(t for t in work.match_iter() if t not in g)
    return ClosedGraph(g.copy(), inferred)


def close_instances(schema_closed: ClosedGraph, instance: Graph) -> ClosedGraph:
    """Closure of schema ∪ instance when the instance adds no schema triples.

    One propagation pass against the cached schema maps suffices; documents
    that do carry schema predicates fall back to the full fixed point.
    """
    if any(t.predicate in _SCHEMA_PREDICATES for t in instance.match_iter()):
        merged = schema_closed.base.copy()
        merged.update(instance.match_iter())
        merged.prefixes.update(instance.prefixes)
        return rdfs_closure(merged)
    base = schema_closed.base.copy()
    base.update(instance.match_iter())
    base.prefixes.update(instance.prefixes)
    maps = schema_maps(schema_closed.graph)
    inferred = Graph()
    inferred.update(t for t in schema_closed.inferred.match_iter())
    pending = list(instance.match_iter())
    while pending:
        triple = pending.pop()
        s, p, o = triple.subject, triple.predicate, triple.object
        derived: list[Triple] = []
        for sup in maps.superproperties.get(p, ()):
            if isinstance(sup, Iri):
                derived.append(Triple(s, sup, o))
        if p == _RDF_TYPE:
            for sup in maps.superclasses.get(o, ()):
                derived.append(Triple(s, _RDF_TYPE, sup))
        for d in maps.domains.get(p, ()):
            derived.append(Triple(s, _RDF_TYPE, d))
        if not isinstance(o, Literal):
            for r in maps.ranges.get(p, ()):
                if not _is_datatype(r):
                    derived.append(Triple(o, _RDF_TYPE, r))
        for t in derived:
            if t not in base and t not in inferred:
                inferred.add(t)
                pending.append(t)
    return ClosedGraph(base, inferred)


def _is_datatype(term: Term) -> bool:
    return isinstance(term, Iri) and (
        term.value.startswith(ns.XSD) or term.value in (ns.RDFS + "Literal", ns.RDF_LANGSTRING)
    )


# -- validation ------------------------------------------------------------


@dataclass
class ValidationReport:
    undeclared_terms: list[str] = field(default_factory=list)
    domain_range_violations: list[str] = field(default_factory=list)
    subclass_cycles: list[str] = field(default_factory=list)
    annotation_deficits: list[str] = field(default_factory=list)
    class_count: int = 0
    object_property_count: int = 0
    data_property_count: int = 0

    @property
    def findings(self) -> list[str]:
        return (
            self.undeclared_terms
            + self.domain_range_violations
            + self.subclass_cycles
            + self.annotation_deficits
        )

    def ok(self) -> bool:
        return not self.findings

    def to_text(self) -> str:
        lines = [
            f"classes: {self.class_count}, object properties: {self.object_property_count}, "
            f"data properties: {self.data_property_count}"
        ]
        sections = (
            ("undeclared terms", self.undeclared_terms),
            ("domain/range violations", self.domain_range_violations),
            ("subclass cycles", self.subclass_cycles),
            ("annotation deficits", self.annotation_deficits),
        )
        for title, entries in sections:
            lines.append(f"{title}: {len(entries)}")
            lines.extend(f"  - {e}" for e in entries)
        lines.append("result: " + ("ok" if self.ok() else "findings present"))
        return "\n".join(lines) + "\n"


def _declared_classes(g: Graph) -> set[Iri]:
    out: set[Iri] = set()
    for decl in _CLASS_DECLARATIONS:
        for t in g.match_iter(None, _RDF_TYPE, decl):
            if isinstance(t.subject, Iri):
                out.add(t.subject)
    return out


def _declared_properties(g: Graph) -> dict[Iri, set[Iri]]:
    out: dict[Iri, set[Iri]] = {}
    for decl in _PROPERTY_DECLARATIONS:
        for t in g.match_iter(None, _RDF_TYPE, decl):
            if isinstance(t.subject, Iri):
                out.setdefault(t.subject, set()).add(decl)
    return out


def validate_schema(g: Graph, native_namespace: str) -> ValidationReport:
    """Audit a graph (schema plus any instances) against its declarations."""
    report = ValidationReport()
    classes = _declared_classes(g)
    properties = _declared_properties(g)
    maps = schema_maps(g)

    native_classes = sorted(c.value for c in classes if c.value.startswith(native_namespace))
    native_obj = sorted(
        p.value
        for p, kinds in properties.items()
        if p.value.startswith(native_namespace) and Iri(ns.OWL_OBJECT_PROPERTY) in kinds
    )
    native_data = sorted(
        p.value
        for p, kinds in properties.items()
        if p.value.startswith(native_namespace) and Iri(ns.OWL_DATATYPE_PROPERTY) in kinds
    )
    report.class_count = len(native_classes)
    report.object_property_count = len(native_obj)
    report.data_property_count = len(native_data)

    # (a) used-but-undeclared predicates and classes
    used_predicates = {t.predicate for t in g.match_iter()}
    undeclared: set[str] = set()
    for p in used_predicates:
        if _is_builtin(p) or p in properties:
            continue
        undeclared.add(f"predicate {p.value}")
    used_classes: set[Term] = {t.object for t in g.match_iter(None, _RDF_TYPE, None)}
    for t in g.match_iter(None, _SUBCLASS, None):
        used_classes.add(t.subject)
        used_classes.add(t.object)
    for rel in (_DOMAIN, _RANGE):
        for t in g.match_iter(None, rel, None):
            used_classes.add(t.object)
    for c in used_classes:
        if not isinstance(c, Iri) or _is_builtin(c) or _is_datatype(c):
            continue
        if c not in classes:
            undeclared.add(f"class {c.value}")
    report.undeclared_terms = sorted(undeclared)

    # (b) domain/range conformance; subjects with no type information pass
    types = _effective_types(g, maps)
    violations = []
    for triple in g.match_iter():
        p = triple.predicate
        for domain in maps.domains.get(p, ()):
            subject_types = types.get(triple.subject)
            if subject_types is not None and domain not in subject_types:
                violations.append(
                    f"domain of {_short(p, native_namespace)}: {triple.subject.n3()} "
                    f"is not a {_short(domain, native_namespace)}"
                )
        for rng in maps.ranges.get(p, ()):
            if _is_datatype(rng):
                if not isinstance(triple.object, Literal):
                    violations.append(
                        f"range of {_short(p, native_namespace)}: {triple.object.n3()} is not a literal"
                    )
                elif triple.object.datatype != rng:
                    violations.append(
                        f"range of {_short(p, native_namespace)}: {triple.object.n3()} "
                        f"is not typed {_short(rng, native_namespace)}"
                    )
            else:
                if isinstance(triple.object, Literal):
                    violations.append(
                        f"range of {_short(p, native_namespace)}: literal {triple.object.n3()} "
                        f"where a {_short(rng, native_namespace)} is required"
                    )
                else:
                    object_types = types.get(triple.object)
                    if object_types is not None and rng not in object_types:
                        violations.append(
                            f"range of {_short(p, native_namespace)}: {triple.object.n3()} "
                            f"is not a {_short(rng, native_namespace)}"
                        )
    report.domain_range_violations = sorted(violations)

    # (c) subclass cycles not covered by declared equivalences
    report.subclass_cycles = _cycle_findings(g)

    # (d) label + description coverage for native terms
    native_terms = (
        [Iri(v) for v in native_classes] + [Iri(v) for v in native_obj] + [Iri(v) for v in native_data]
    )
    deficits = []
    for term in native_terms:
        if g.value(term, _LABEL) is None:
            deficits.append(f"{_short(term, native_namespace)} missing label")
        if g.value(term, _DESCRIPTION) is None:
            deficits.append(f"{_short(term, native_namespace)} missing description")
    report.annotation_deficits = sorted(deficits)
    return report


def _effective_types(g: Graph, maps: SchemaMaps) -> dict[Term, set[Term]]:
    """Asserted types widened by subclass reachability; absent key = untyped."""
    out: dict[Term, set[Term]] = {}
    for t in g.match_iter(None, _RDF_TYPE, None):
        expanded = out.setdefault(t.subject, set())
        expanded.add(t.object)
        expanded.update(maps.superclasses.get(t.object, ()))
    return out


def _short(term: Term, native_namespace: str) -> str:
    if isinstance(term, Iri) and term.value.startswith(native_namespace):
        return term.value[len(native_namespace):]
    if isinstance(term, Iri):
        return term.value
    return term.n3()


def _cycle_findings(g: Graph) -> list[str]:
    edges: dict[Term, set[Term]] = {}
    for t in g.match_iter(None, _SUBCLASS, None):
        if t.subject != t.object:
            edges.setdefault(t.subject, set()).add(t.object)
    equivalent: set[frozenset[Term]] = set()
    for t in g.match_iter(None, _EQUIVALENT, None):
        equivalent.add(frozenset((t.subject, t.object)))
    findings = []
    for component in _strongly_connected(edges):
        if len(component) < 2:
            continue
        pairs = [
            frozenset((a, b))
            for i, a in enumerate(component)
            for b in component[i + 1 :]
        ]
        if all(p in equivalent for p in pairs):
            continue
        names = ", ".join(c.n3() if not isinstance(c, Iri) else c.value for c in component)
        findings.append(f"cycle: {names}")
    return sorted(findings)


def _strongly_connected(edges: dict[Term, set[Term]]) -> list[list[Term]]:
    """Tarjan's algorithm, iterative; components sorted for determinism."""
    index: dict[Term, int] = {}
    low: dict[Term, int] = {}
    on_stack: set[Term] = set()
    stack: list[Term] = []
    components: list[list[Term]] = []
    counter = [0]

    nodes = set(edges)
    for targets in edges.values():
        nodes.update(targets)

    def strongconnect(root: Term) -> None:
        work = [(root, iter(sorted(edges.get(root, ()), key=lambda x: x.n3())))]
        index[root] = low[root] = counter[0]
        counter[0] += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            node, it = work[-1]
            advanced = False
            for child in it:
                if child not in index:
                    index[child] = low[child] = counter[0]
                    counter[0] += 1
                    stack.append(child)
                    on_stack.add(child)
                    work.append((child, iter(sorted(edges.get(child, ()), key=lambda x: x.n3()))))
                    advanced = True
                    break
                if child in on_stack:
                    low[node] = min(low[node], index[child])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
            if low[node] == index[node]:
                component = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    component.append(w)
                    if w == node:
                        break
                components.append(sorted(component, key=lambda x: x.n3()))

    for node in sorted(nodes, key=lambda x: x.n3()):
        if node not in index:
            strongconnect(node)
    return sorted(components, key=lambda comp: comp[0].n3())


# -- competency question suite ----------------------------------------------


@dataclass
class CqResult:
    name: str
    variables: list[str]
    expected_variables: list[str]
    rows: int
    bound: str
    passed: bool


class CqSuiteError(ValueError):
    pass


_BOUND = re.compile(r"(>=|==|<=|>|<)\s*(\d+)\Z")


def _check_bound(rows: int, bound: str) -> bool:
    m = _BOUND.match(bound.strip())
    if not m:
        raise CqSuiteError(f"malformed row-count bound: {bound!r}")
    op, value = m.group(1), int(m.group(2))
    return {
        ">=": rows >= value,
        "==": rows == value,
        "<=": rows <= value,
        ">": rows > value,
        "<": rows < value,
    }[op]


def run_cq_suite(closed: ClosedGraph, cq_dir: str | Path) -> list[CqResult]:
    """Execute every `NN-name.rq` against its `NN-name.expect` contract."""
    from aida.sparql import evaluate, parse_query

    cq_path = Path(cq_dir)
    results = []
    for query_file in sorted(cq_path.glob("*.rq")):
        expect_file = query_file.with_suffix(".expect")
        if not expect_file.exists():
            raise CqSuiteError(f"{query_file.name}: missing expectation file")
        expect_lines = expect_file.read_text(encoding="utf-8").splitlines()
        if len(expect_lines) < 2:
            raise CqSuiteError(f"{expect_file.name}: expected variable list and row bound")
        expected_vars = expect_lines[0].split()
        bound = expect_lines[1].strip()
        try:
            query = parse_query(query_file.read_text(encoding="utf-8"))
        except Exception as exc:
            raise CqSuiteError(f"{query_file.name}: {exc}") from exc
        table = evaluate(query, closed)
        passed = table.header == expected_vars and _check_bound(len(table.rows), bound)
        results.append(
            CqResult(
                name=query_file.stem,
                variables=table.header,
                expected_variables=expected_vars,
                rows=len(table.rows),
                bound=bound,
                passed=passed,
            )
        )
    return results
