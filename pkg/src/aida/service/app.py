"""FastAPI application wrapping the knowledge-base store and engine."""

from __future__ import annotations

import datetime as dt
import sys
from dataclasses import dataclass
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse

from aida import engine
from aida.ai import ingest_as_assessment
from aida.errors import AidaError, ConflictError, NotFoundError, StoreError, ValidationError
from aida.notation import PERMANENT_FDI, all_codes, convert_notation
from aida.rdf.turtle import ParseError
from aida.service import schemas
from aida.sparql import table_to_json
from aida.store import KbStore

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


@dataclass
class ServiceConfig:
    kb_root: Path = Path("kb")
    host: str = "127.0.0.1"
    port: int = 8000
    default_k: float = engine.DEFAULT_K
    band: float = engine.DEFAULT_BAND
    default_threshold: float = 18.0


def load_config(path: str | Path | None = None, **overrides) -> ServiceConfig:
    """TOML file settings, overridden by keyword flags that are not None."""
    config = ServiceConfig()
    if path is not None:
        data = tomllib.loads(Path(path).read_text(encoding="utf-8"))
        for key in ("host", "default_k", "band", "default_threshold", "port"):
            if key in data:
                setattr(config, key, type(getattr(config, key))(data[key]))
        if "kb_root" in data:
            config.kb_root = Path(data["kb_root"])
    for key, value in overrides.items():
        if value is not None:
            setattr(config, key, Path(value) if key == "kb_root" else value)
    return config


_STATUS = {
    ValidationError: 422,
    NotFoundError: 404,
    ConflictError: 409,
    StoreError: 503,
}


def create_app(store: KbStore, config: ServiceConfig | None = None) -> FastAPI:
    config = config or ServiceConfig(kb_root=store.root)
    app = FastAPI(title="aida", version="0.1.0")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    app.state.store = store
    app.state.config = config

    @app.exception_handler(AidaError)
    async def aida_error_handler(_: Request, exc: AidaError) -> JSONResponse:
        status = next((s for t, s in _STATUS.items() if isinstance(exc, t)), 500)
        return JSONResponse(
            status_code=status,
            content=schemas.Problem(code=exc.code, message=exc.message).model_dump(),
        )

    @app.exception_handler(ParseError)
    async def parse_error_handler(_: Request, exc: ParseError) -> JSONResponse:
        return JSONResponse(
            status_code=400,
            content=schemas.Problem(code="parse", message=str(exc)).model_dump(),
        )

    @app.get("/healthz", response_model=schemas.HealthResponse)
    def healthz() -> schemas.HealthResponse:
        return schemas.HealthResponse(status="ok", revision=store.revision)

    @app.get("/kb/stats", response_model=schemas.StatsResponse)
    def kb_stats() -> schemas.StatsResponse:
        report = store.schema_report()
        return schemas.StatsResponse(
            classes=report.class_count,
            object_properties=report.object_property_count,
            data_properties=report.data_property_count,
            triples=len(store.snapshot.closed.graph),
            revision=store.revision,
        )

    @app.post("/sparql", response_model=schemas.SparqlResponse)
    def sparql(request: schemas.SparqlRequest) -> schemas.SparqlResponse:
        table = store.sparql(request.query)
        payload = table_to_json(table)
        return schemas.SparqlResponse(header=payload["header"], rows=payload["rows"])

    @app.get("/cq", response_model=schemas.CqResponse)
    def cq() -> schemas.CqResponse:
        results = store.run_cqs()
        entries = [
            schemas.CqEntry(name=r.name, rows=r.rows, bound=r.bound, passed=r.passed)
            for r in results
        ]
        return schemas.CqResponse(results=entries, passed=all(r.passed for r in results))

    # -- cases -----------------------------------------------------------------

    @app.post("/cases", response_model=schemas.CaseCreated, status_code=201)
    def create_case(payload: schemas.CaseCreate) -> schemas.CaseCreated:
        record = payload.to_record()
        iri = store.persist_case(record, expect_new=True)
        return schemas.CaseCreated(case_id=record.case_id, case_iri=iri.value, revision=store.revision)

    @app.get("/cases/{case_id}", response_model=schemas.CaseOut)
    def get_case(case_id: str) -> schemas.CaseOut:
        return schemas.CaseOut.from_record(store.load_case(case_id), store.revision)

    @app.put("/cases/{case_id}/teeth/{fdi}/stage", response_model=schemas.CaseOut)
    def put_stage(case_id: str, fdi: str, payload: schemas.StageUpdate) -> schemas.CaseOut:
        case = store.load_case(case_id)
        method = store.registry.method(payload.method_id)
        updated = engine.assign_stage(case, fdi, payload.stage, method)
        store.persist_case(updated)
        return schemas.CaseOut.from_record(store.load_case(case_id), store.revision)

    @app.post("/cases/{case_id}/assess", response_model=schemas.AssessmentOut)
    def assess_case(case_id: str, payload: schemas.AssessRequest) -> schemas.AssessmentOut:
        case = store.load_case(case_id)
        method = store.registry.method(payload.method_id)
        study = store.registry.study(payload.study_id)
        threshold = payload.threshold if payload.threshold is not None else config.default_threshold
        assessment = engine.assess(
            case,
            method,
            study,
            assessment_id=f"m-{payload.method_id}-{payload.study_id}",
            sex=payload.sex,
            k=payload.k if payload.k is not None else config.default_k,
            threshold=threshold,
            band=config.band,
        )
        updated = engine.attach_report(case.with_assessment(assessment))
        store.persist_case(updated)
        return schemas.AssessmentOut.from_record(assessment)

    @app.post("/cases/{case_id}/ai-assess", response_model=schemas.AiAssessmentOut)
    def ai_assess_case(case_id: str, payload: schemas.AiAssessRequest) -> schemas.AiAssessmentOut:
        case = store.load_case(case_id)
        run = store.get_run(payload.run_id)
        model = store.get_model(run.model_id)
        assessment = ingest_as_assessment(run, model.task, case, assessment_id=f"ai-{payload.run_id}")
        updated = case.with_ai_assessment(assessment)
        if updated.assessments:
            updated = engine.attach_report(updated)
        store.persist_case(updated)
        return schemas.AiAssessmentOut.from_record(assessment)

    @app.get("/cases/{case_id}/report")
    def get_report(case_id: str, request: Request):
        case = store.load_case(case_id)
        if case.report is None:
            case = engine.attach_report(case)
        text = engine.render_report_text(case)
        accept = request.headers.get("accept", "")
        if "text/plain" in accept:
            return PlainTextResponse(text)
        report = schemas.ReportResponse(
            case_id=case.case_id,
            mean_age=case.report.mean_age,
            standard_dev=case.report.standard_dev,
            age_range_text=case.report.age_range_text,
            conclusion=case.report.conclusion,
            generated_at=case.report.timestamp.strftime("%Y-%m-%dT%H:%M:%SZ"),
            text=text,
        )
        return JSONResponse(report.model_dump())

    # -- AI provenance ------------------------------------------------------------

    @app.post("/models", response_model=schemas.ModelCreated, status_code=201)
    def create_model(payload: schemas.ModelCreate) -> schemas.ModelCreated:
        record = payload.to_record()
        iri = store.save_model(record)
        return schemas.ModelCreated(model_id=record.model_id, model_iri=iri.value, revision=store.revision)

    @app.post("/inference-runs", response_model=schemas.RunCreated, status_code=201)
    def create_run(payload: schemas.RunCreate) -> schemas.RunCreated:
        record = payload.to_record()
        iri = store.save_run(record)
        return schemas.RunCreated(run_id=record.run_id, run_iri=iri.value, revision=store.revision)

    # -- reference data -------------------------------------------------------------

    @app.get("/methods", response_model=list[schemas.MethodOut])
    def list_methods() -> list[schemas.MethodOut]:
        out = []
        for method_id in store.registry.method_ids():
            m = store.registry.method(method_id)
            out.append(
                schemas.MethodOut(
                    method_id=m.method_id,
                    name=m.name,
                    stages=list(m.stages),
                    required_teeth=list(m.required_teeth),
                    aggregation=m.aggregation,
                    note=m.note,
                )
            )
        return out

    @app.get("/studies", response_model=list[schemas.StudyOut])
    def list_studies() -> list[schemas.StudyOut]:
        out = []
        for study_id in store.registry.study_ids():
            s = store.registry.study(study_id)
            out.append(
                schemas.StudyOut(
                    study_id=s.study_id,
                    population=s.population,
                    sex=s.sex,
                    citation=s.citation,
                    min_score=s.rows[0].score,
                    max_score=s.rows[-1].score,
                )
            )
        return out

    @app.get("/notations", response_model=list[schemas.NotationEntry])
    def notations() -> list[schemas.NotationEntry]:
        return [schemas.NotationEntry(**all_codes(fdi)) for fdi in PERMANENT_FDI]

    @app.get("/notations/convert", response_model=schemas.ConvertResponse)
    def convert(code: str, source: str, target: str) -> schemas.ConvertResponse:
        return schemas.ConvertResponse(
            code=code, source=source, target=target, result=convert_notation(code, source, target)
        )

    return app


def build_app(kb_root: str | Path, config: ServiceConfig | None = None) -> FastAPI:
    store = KbStore(kb_root)
    return create_app(store, config)
