"""Knowledge-base store: Turtle files on disk, one closed-graph snapshot
in memory.

Layout under the KB root:

    schema/*.ttl        core schema + external stubs
    cases/<id>.ttl      one document per examination
    models/<id>.ttl     registered models
    runs/<id>.ttl       inference runs (with their data collections)
    methods/<id>.json   scoring method definitions
    studies/<id>.*      reference study tables (json or csv)
    cq/NN-name.rq       competency questions + .expect contracts
    queries/*.rq        sample queries
    audit.jsonl         append-only mutation log

Writes are atomic (temp file + rename), serialized through one writer lock;
each commit swaps in a fresh snapshot and bumps the revision, so concurrent
readers always see a consistent state.
"""

from __future__ import annotations

import datetime as dt
import json
import os
import tempfile
import threading
from dataclasses import dataclass, field
from pathlib import Path

from aida import namespaces as ns
from aida.ai import InferenceRunRecord, ModelRecord, model_from_rdf, record_inference, register_model, run_from_rdf
from aida.errors import ConflictError, NotFoundError, StoreError
from aida.methods import MethodRegistry, method_to_rdf, study_to_rdf
from aida.model import CaseRecord, from_rdf, to_rdf
from aida.rdf.graph import Graph
from aida.rdf.terms import Iri
from aida.rdf.turtle import parse_turtle, serialize_turtle
from aida.reasoner import ClosedGraph, CqResult, ValidationReport, close_instances, rdfs_closure, run_cq_suite, validate_schema
from aida.sparql import ResultTable, evaluate, parse_query


@dataclass
class Snapshot:
    revision: int
    closed: ClosedGraph
    cases: dict[str, CaseRecord] = field(default_factory=dict)
    models: dict[str, ModelRecord] = field(default_factory=dict)
    runs: dict[str, InferenceRunRecord] = field(default_factory=dict)


class KbStore:
    def __init__(self, root: str | Path) -> None:
        self.root = Path(root)
        if not self.root.is_dir():
            raise StoreError(f"KB root {self.root} is not a directory")
        for sub in ("cases", "models", "runs"):
            (self.root / sub).mkdir(exist_ok=True)
        self._write_lock = threading.Lock()
        self.registry = MethodRegistry(self.root / "methods", self.root / "studies")
        self._schema_graph = self._load_schema_graph()
        self._schema_closed = rdfs_closure(self._schema_graph)
        self._snapshot = self._build_snapshot(revision=0)

    # -- loading ---------------------------------------------------------------

    def _load_schema_graph(self) -> Graph:
        schema_dir = self.root / "schema"
        files = sorted(schema_dir.glob("*.ttl"))
        if not files:
            raise StoreError(f"no schema files under {schema_dir}")
        graph = Graph(ns.DEFAULT_PREFIXES)
        for i, path in enumerate(files):
            g, _ = parse_turtle(path.read_text(encoding="utf-8"), bnode_prefix=f"sch{i}_")
            graph.update(g.match_iter())
            graph.prefixes.update(g.prefixes)
        return graph

    def _instance_graph(self) -> tuple[Graph, dict[str, CaseRecord], dict[str, ModelRecord], dict[str, InferenceRunRecord]]:
        instance = Graph(ns.DEFAULT_PREFIXES)
        for i, path in enumerate(sorted((self.root / "cases").glob("*.ttl"))):
            g, _ = parse_turtle(path.read_text(encoding="utf-8"), bnode_prefix=f"c{i}_")
            instance.update(g.match_iter())
        for i, path in enumerate(sorted((self.root / "models").glob("*.ttl"))):
            g, _ = parse_turtle(path.read_text(encoding="utf-8"), bnode_prefix=f"m{i}_")
            instance.update(g.match_iter())
        for i, path in enumerate(sorted((self.root / "runs").glob("*.ttl"))):
            g, _ = parse_turtle(path.read_text(encoding="utf-8"), bnode_prefix=f"r{i}_")
            instance.update(g.match_iter())
        for method_id in self.registry.method_ids():
            instance.update(method_to_rdf(self.registry.method(method_id)))
        for study_id in self.registry.study_ids():
            instance.update(study_to_rdf(self.registry.study(study_id)))

        cases: dict[str, CaseRecord] = {}
        type_iri = Iri(ns.RDF_TYPE)
        exam_class = Iri(ns.AIDA + "LegalDentalMedicalExamData")
        for triple in instance.match(None, type_iri, exam_class):
            record = from_rdf(instance, triple.subject)
            cases[record.case_id] = record
        models: dict[str, ModelRecord] = {}
        for triple in instance.match(None, type_iri, Iri(ns.MLS + "Model")):
            if isinstance(triple.subject, Iri) and triple.subject.value.startswith(ns.AIDA + "model/"):
                model_id = triple.subject.value[len(ns.AIDA + "model/"):]
                models[model_id] = model_from_rdf(instance, model_id)
        runs: dict[str, InferenceRunRecord] = {}
        for triple in instance.match(None, type_iri, Iri(ns.AIDA + "InferenceRun")):
            if isinstance(triple.subject, Iri) and triple.subject.value.startswith(ns.AIDA + "run/"):
                run_id = triple.subject.value[len(ns.AIDA + "run/"):]
                runs[run_id] = run_from_rdf(instance, run_id)
        return instance, cases, models, runs

    def _build_snapshot(self, revision: int) -> Snapshot:
        instance, cases, models, runs = self._instance_graph()
        closed = close_instances(self._schema_closed, instance)
        return Snapshot(revision=revision, closed=closed, cases=cases, models=models, runs=runs)

    # -- read surface ------------------------------------------------------------

    @property
    def snapshot(self) -> Snapshot:
        return self._snapshot

    @property
    def revision(self) -> int:
        return self._snapshot.revision

    @property
    def schema_graph(self) -> Graph:
        return self._schema_graph

    def validation_report(self) -> ValidationReport:
        return validate_schema(self._snapshot.closed.base, ns.AIDA)

    def schema_report(self) -> ValidationReport:
        return validate_schema(self._schema_graph, ns.AIDA)

    def load_case(self, case_id: str) -> CaseRecord:
        record = self._snapshot.cases.get(case_id)
        if record is None:
            raise NotFoundError(f"unknown case: {case_id}")
        return record

    def case_ids(self) -> list[str]:
        return sorted(self._snapshot.cases)

    def get_model(self, model_id: str) -> ModelRecord:
        record = self._snapshot.models.get(model_id)
        if record is None:
            raise NotFoundError(f"unknown model: {model_id}")
        return record

    def get_run(self, run_id: str) -> InferenceRunRecord:
        record = self._snapshot.runs.get(run_id)
        if record is None:
            raise NotFoundError(f"unknown inference run: {run_id}")
        return record

    def sparql(self, query_text: str) -> ResultTable:
        return evaluate(parse_query(query_text), self._snapshot.closed)

    def run_cqs(self) -> list[CqResult]:
        return run_cq_suite(self._snapshot.closed, self.root / "cq")

    # -- write surface -------------------------------------------------------------

    def _pre_replace_hook(self) -> None:
        """Crash-injection point between temp-file write and rename."""

    def _commit_document(self, path: Path, graph: Graph) -> None:
        text = serialize_turtle(graph)
        fd, temp_path = tempfile.mkstemp(prefix=path.name + ".", suffix=".tmp", dir=path.parent)
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as handle:
                handle.write(text)
                handle.flush()
                os.fsync(handle.fileno())
            self._pre_replace_hook()
            os.replace(temp_path, path)
        except BaseException:
            if os.path.exists(temp_path):
                os.unlink(temp_path)
            raise

    def _document_graph(self, triples) -> Graph:
        g = Graph(ns.DEFAULT_PREFIXES)
        g.update(triples)
        return g

    def _audit(self, op: str, target: str, revision: int) -> None:
        entry = {
            "ts": dt.datetime.now(dt.timezone.utc).strftime("%Y-%m-%dT%H:%M:%S.%fZ"),
            "op": op,
            "target": target,
            "revision": revision,
        }
        with open(self.root / "audit.jsonl", "a", encoding="utf-8") as handle:
            handle.write(json.dumps(entry) + "\n")

    def persist_case(self, case: CaseRecord, expect_new: bool = False) -> Iri:
        """Write-then-swap: on any failure the previous snapshot stays live."""
        with self._write_lock:
            if expect_new and case.case_id in self._snapshot.cases:
                raise ConflictError(f"case {case.case_id} already exists")
            case.validate(today=dt.date.today() if expect_new else None)
            path = self.root / "cases" / f"{case.case_id}.ttl"
            self._commit_document(path, self._document_graph(to_rdf(case)))
            revision = self._snapshot.revision + 1
            self._snapshot = self._build_snapshot(revision)
            self._audit("persist_case", case.case_id, revision)
            return case.iri

    def save_model(self, record: ModelRecord) -> Iri:
        with self._write_lock:
            if record.model_id in self._snapshot.models:
                raise ConflictError(f"model {record.model_id} already exists")
            path = self.root / "models" / f"{record.model_id}.ttl"
            self._commit_document(path, self._document_graph(register_model(record)))
            revision = self._snapshot.revision + 1
            self._snapshot = self._build_snapshot(revision)
            self._audit("save_model", record.model_id, revision)
            return record.iri

    def save_run(self, run: InferenceRunRecord) -> Iri:
        with self._write_lock:
            model = self._snapshot.models.get(run.model_id)
            if model is None:
                raise NotFoundError(f"unknown model: {run.model_id}")
            if run.run_id in self._snapshot.runs:
                raise ConflictError(f"inference run {run.run_id} already exists")
            path = self.root / "runs" / f"{run.run_id}.ttl"
            self._commit_document(path, self._document_graph(record_inference(run, model.task)))
            revision = self._snapshot.revision + 1
            self._snapshot = self._build_snapshot(revision)
            self._audit("save_run", run.run_id, revision)
            return run.iri
