"""Acceptance criteria, one test per criterion.

Each test prints a single `ACCEPT pass: <criterion>` line on success so CI
logs document the run; tolerances are fixed here, not configurable.
"""

import math
import random
import time
import datetime as dt

import pytest
from click.testing import CliRunner

from aida import engine, namespaces as ns
from aida.cli import main as cli_main
from aida.methods import ReferenceStudy, ScoringMethod, StudyRow
from aida.model import CaseRecord, Expert, Individual, Opg, ToothRecord, load_schema
from aida.notation import PERMANENT_FDI, SYSTEMS, convert_notation
from aida.rdf import Graph, Iri, Triple
from aida.reasoner import rdfs_closure
from aida.sparql import evaluate
from tests import oracles
from tests.test_sparql_eval import random_graph, random_query, rows_as_tuples

SUB = Iri(ns.RDFS_SUBCLASSOF)
TYPE = Iri(ns.RDF_TYPE)


def report(line: str) -> None:
    print(f"ACCEPT pass: {line}")


def test_schema_load_counts(shipped_kb):
    """Shipped core schema: exactly 73 classes, 32 object properties,
    47 data properties in the native namespace, loaded in under 1 s."""
    start = time.perf_counter()
    _, validation = load_schema(shipped_kb / "schema")
    elapsed = time.perf_counter() - start
    counts = (
        validation.class_count,
        validation.object_property_count,
        validation.data_property_count,
    )
    assert counts == (73, 32, 47), counts
    assert elapsed < 1.0, f"schema load took {elapsed:.3f}s"
    report(f"schema stats 73/32/47 in {elapsed * 1000:.0f} ms")


def test_annotation_audit(kb_copy):
    """`kb validate` exits 0 on the shipped schema and 1 after removing a
    single label."""
    runner = CliRunner()
    clean = runner.invoke(cli_main, ["kb", "validate", "--kb", str(kb_copy)])
    assert clean.exit_code == 0, clean.output

    schema_file = kb_copy / "schema" / "aidentifyage-core.ttl"
    text = schema_file.read_text(encoding="utf-8")
    mutated = text.replace('rdfs:label "reference study" ;\n', "", 1)
    assert mutated != text
    schema_file.write_text(mutated, encoding="utf-8")
    broken = runner.invoke(cli_main, ["kb", "validate", "--kb", str(kb_copy)])
    assert broken.exit_code == 1, broken.output
    assert "missing label" in broken.output
    report("annotation audit: exit 0 shipped, exit 1 after label removal")


def test_sample_query_reproduction(shipped_store, shipped_kb):
    """The shipped sample query returns exactly one row over the demo KB,
    all six variables bound, taskType in {classification, regression},
    in under 1 s."""
    query = (shipped_kb / "queries" / "paper-query.rq").read_text(encoding="utf-8")
    start = time.perf_counter()
    table = shipped_store.sparql(query)
    elapsed = time.perf_counter() - start
    assert table.header == ["meanAge", "stdDev", "minAge", "maxAge", "modelName", "taskType"]
    assert len(table.rows) == 1
    row = table.rows[0]
    assert all(v in row for v in table.header), "all six variables must be bound"
    assert row["taskType"].lexical in ("classification", "regression")
    assert row["meanAge"].lexical == "17.2"
    assert row["stdDev"].lexical == "1.3"
    assert row["minAge"].lexical == "14.6"
    assert row["maxAge"].lexical == "19.8"
    assert row["modelName"].lexical == "demo-cnn"
    assert elapsed < 1.0, f"query took {elapsed:.3f}s"
    report(f"sample query: 1 row, 6 bindings in {elapsed * 1000:.0f} ms")


def test_cq_suite(shipped_store):
    """All 11 shipped competency questions pass over the demo KB within 5 s."""
    start = time.perf_counter()
    results = shipped_store.run_cqs()
    elapsed = time.perf_counter() - start
    assert len(results) == 11
    failures = [r.name for r in results if not r.passed]
    assert failures == [], failures
    assert elapsed < 5.0, f"CQ suite took {elapsed:.3f}s"
    report(f"CQ suite: 11/11 in {elapsed * 1000:.0f} ms")


def test_sparql_oracle_equivalence():
    """200 randomized graphs (<=50 triples) x queries (<=3 patterns, with
    star paths and filters in the mix): engine equals brute force exactly."""
    mismatches = 0
    for seed in range(200):
        rng = random.Random(1000 + seed)
        g = random_graph(rng)
        query = random_query(rng, g)
        expected = oracles.bruteforce_rows(query, g)
        actual = rows_as_tuples(evaluate(query, g))
        if actual != expected:
            mismatches += 1
    assert mismatches == 0
    report("SPARQL oracle equivalence: 200 graphs, 0 mismatches")


def test_closure_properties():
    """100 random subclass DAGs (<=10 classes, <=30 instances): closure is
    idempotent and equals the reachability oracle."""
    for seed in range(100):
        rng = random.Random(2000 + seed)
        names = [f"C{i}" for i in range(rng.randint(2, 10))]
        edges: dict[str, set[str]] = {}
        g = Graph()
        for i, a in enumerate(names):
            for b in names[i + 1 :]:  # acyclic by construction
                if rng.random() < 0.3:
                    edges.setdefault(a, set()).add(b)
                    g.add(Triple(Iri(ns.AIDA + a), SUB, Iri(ns.AIDA + b)))
        instances = {}
        for i in range(rng.randint(0, 30)):
            cls = rng.choice(names)
            instances[f"i{i}"] = cls
            g.add(Triple(Iri(ns.AIDA + f"i{i}"), TYPE, Iri(ns.AIDA + cls)))

        closed = rdfs_closure(g)
        again = rdfs_closure(closed.graph)
        assert set(again.graph.match_iter()) == set(closed.graph.match_iter()), "not idempotent"

        reach = oracles.reachable_pairs(edges)
        direct = {(a, b) for a in edges for b in edges[a]}
        actual_sub = {
            (t.subject.value[len(ns.AIDA):], t.object.value[len(ns.AIDA):])
            for t in closed.graph.match_iter(None, SUB, None)
        }
        assert actual_sub == reach | direct
        for instance, cls in instances.items():
            expected_types = {cls} | {b for (a, b) in reach if a == cls}
            actual_types = {
                t.object.value[len(ns.AIDA):]
                for t in closed.graph.match_iter(Iri(ns.AIDA + instance), TYPE, None)
            }
            assert actual_types == expected_types
    report("closure properties: 100 DAGs, idempotent, oracle-equal")


def test_notation_bijection():
    """All 32 permanent teeth x all 12 ordered system pairs round-trip to
    identity: 384 checks, 0 failures."""
    checks = 0
    failures = 0
    for fdi in PERMANENT_FDI:
        for source in SYSTEMS:
            code = convert_notation(fdi, "fdi", source)
            for target in SYSTEMS:
                if source == target:
                    continue
                checks += 1
                if convert_notation(convert_notation(code, source, target), target, source) != code:
                    failures += 1
    assert checks == 384
    assert failures == 0
    report("notation bijection: 384 checks, 0 failures")


def test_pipeline_oracle():
    """100 random fixture cases: score sum, interpolated lookup, k*sd
    interval all within 1e-9 of an independent recomputation; threshold
    probability within 1e-6 of the quadrature oracle; min <= mean <= max."""
    stages = ("A", "B", "C", "D", "E", "F", "G", "H")
    teeth = ("31", "32", "33", "34", "35", "36", "37")
    clock = dt.datetime(2025, 11, 20, 10, 0, tzinfo=dt.timezone.utc)
    for seed in range(100):
        rng = random.Random(3000 + seed)
        table = {t: {s: round(rng.uniform(0.5, 12.0), 2) for s in stages} for t in teeth}
        method = ScoringMethod(
            method_id="rand",
            name="rand",
            stages=stages,
            required_teeth=teeth,
            aggregation="sum",
            scores={"any": table},
        )
        case = CaseRecord(
            case_id=f"acc-{seed}",
            requesting_entity="x",
            examination_date=dt.date(2025, 11, 20),
            expert=Expert("E"),
            individual=Individual(),
            opg=Opg("img", dt.date(2025, 11, 12)),
            teeth=tuple(ToothRecord(fdi=f) for f in teeth),
        )
        picks = {}
        for fdi in teeth:
            stage = rng.choice(stages)
            picks[fdi] = stage
            case = engine.assign_stage(case, fdi, stage, method)

        knots = sorted({round(rng.uniform(10.0, 95.0), 1) for _ in range(rng.randint(2, 6))})
        while len(knots) < 2:
            knots = sorted({round(rng.uniform(10.0, 95.0), 1) for _ in range(4)})
        mean = 10.0
        rows = []
        for i, s in enumerate(knots):
            mean += rng.uniform(0.5, 2.0)
            rows.append(StudyRow(score=s, mean=mean, sd=0.6 + 0.15 * i))
        rows = tuple(rows)
        study = ReferenceStudy(study_id="acc-study", population="", sex="any", rows=rows)
        k = rng.choice((0.5, 1.0, 2.0, 2.5))
        threshold = rng.uniform(8.0, 25.0)

        assessment = engine.assess(
            case, method, study, assessment_id="m", k=k, threshold=threshold, clock=clock
        )

        stage_scores = [table[f][picks[f]] for f in teeth]
        total, mean, sd, low, high, probability = oracles.straight_line_pipeline(
            stage_scores,
            [(r.score, r.mean, r.sd) for r in rows],
            math.fsum(stage_scores),
            k,
            threshold,
        )
        assert abs(assessment.score - total) <= 1e-9
        assert abs(assessment.result.mean_age - mean) <= 1e-9
        assert abs(assessment.result.standard_dev - sd) <= 1e-9
        assert abs(assessment.result.min_age - low) <= 1e-9
        assert abs(assessment.result.max_age - high) <= 1e-9
        assert abs(assessment.classification.probability_at_or_above - probability) <= 1e-6
        assert assessment.result.min_age <= assessment.result.mean_age <= assessment.result.max_age
    report("pipeline oracle: 100 cases within 1e-9 / 1e-6")


def test_persistence_fault(store, monkeypatch):
    """A crash between temp-file write and rename leaves the KB parseable
    and the revision unchanged."""
    from aida.rdf.turtle import parse_turtle

    original = store.load_case("demo-0001")
    before = (store.root / "cases" / "demo-0001.ttl").read_bytes()
    revision = store.revision

    def crash() -> None:
        raise RuntimeError("killed between write and rename")

    monkeypatch.setattr(store, "_pre_replace_hook", crash)
    with pytest.raises(RuntimeError):
        store.persist_case(original.with_tooth(ToothRecord(fdi="11")))

    after = (store.root / "cases" / "demo-0001.ttl").read_bytes()
    assert after == before
    parse_turtle(after.decode("utf-8"))
    assert store.revision == revision
    from aida.store import KbStore

    reopened = KbStore(store.root)
    assert reopened.load_case("demo-0001") == original
    report("persistence fault: KB parseable, revision unchanged")
