"""Operator command line.

Thin client over the core package: every service capability is reachable
headlessly against a KB directory, so CI and scripted use never need a
running server.  Exit codes: 0 success, 1 validation findings, 2 usage
error, 3 I/O error.
"""

from __future__ import annotations

import datetime as dt
import json
import sys
from pathlib import Path

import click

from aida import engine
from aida.errors import AidaError, NotFoundError, StoreError, ValidationError
from aida.notation import SYSTEMS, convert_notation
from aida.rdf.turtle import ParseError
from aida.service.schemas import CaseCreate
from aida.sparql import table_to_csv, table_to_json
from aida.store import KbStore

EXIT_OK = 0
EXIT_FINDINGS = 1
EXIT_USAGE = 2
EXIT_IO = 3


def _fail(code: int, message: str) -> "NoReturn":  # noqa: F821
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _open_store(kb: str | None) -> KbStore:
    root = Path(kb) if kb else Path.cwd() / "kb"
    try:
        return KbStore(root)
    except (StoreError, OSError) as exc:
        _fail(EXIT_IO, str(exc))
    except ParseError as exc:
        _fail(EXIT_FINDINGS, f"KB does not parse: {exc}")


_kb_option = click.option(
    "--kb",
    envvar="AIDA_KB_ROOT",
    default=None,
    help="KB root directory (default ./kb, env AIDA_KB_ROOT).",
)


@click.group()
def main() -> None:
    """Forensic dental age assessment decision support."""


# -- kb -------------------------------------------------------------------------


@main.group()
def kb() -> None:
    """Knowledge-base validation and querying."""


@kb.command("validate")
@_kb_option
def kb_validate(kb: str | None) -> None:
    """Validate the KB and print the report; exit 1 on findings."""
    store = _open_store(kb)
    report = store.validation_report()
    click.echo(report.to_text(), nl=False)
    sys.exit(EXIT_OK if report.ok() else EXIT_FINDINGS)


@kb.command("stats")
@_kb_option
def kb_stats(kb: str | None) -> None:
    """Print native entity counts of the shipped schema."""
    store = _open_store(kb)
    report = store.schema_report()
    click.echo(
        f"classes: {report.class_count}, object properties: {report.object_property_count}, "
        f"data properties: {report.data_property_count}"
    )


@kb.command("query")
@_kb_option
@click.option("-f", "--file", "query_file", required=True, type=click.Path(), help="Query file (.rq).")
@click.option("--csv", "as_csv", is_flag=True, help="CSV output (default).")
@click.option("--json", "as_json", is_flag=True, help="JSON output.")
def kb_query(kb: str | None, query_file: str, as_csv: bool, as_json: bool) -> None:
    """Run a query file against the KB."""
    store = _open_store(kb)
    try:
        text = Path(query_file).read_text(encoding="utf-8")
    except OSError as exc:
        _fail(EXIT_IO, str(exc))
    try:
        table = store.sparql(text)
    except ParseError as exc:
        _fail(EXIT_FINDINGS, f"query does not parse: {exc}")
    if as_json:
        click.echo(json.dumps(table_to_json(table), indent=2, sort_keys=True))
    else:
        click.echo(table_to_csv(table), nl=False)


@kb.group("cq")
def kb_cq() -> None:
    """Competency question suite."""


@kb_cq.command("run")
@_kb_option
def kb_cq_run(kb: str | None) -> None:
    """Run every CQ and print one pass/fail line each; exit 1 on failures."""
    store = _open_store(kb)
    try:
        results = store.run_cqs()
    except AidaError as exc:
        _fail(EXIT_IO, str(exc))
    for r in results:
        status = "pass" if r.passed else "FAIL"
        click.echo(f"{status}  {r.name}  rows={r.rows} bound={r.bound}")
    failed = [r for r in results if not r.passed]
    click.echo(f"{len(results) - len(failed)}/{len(results)} passed")
    sys.exit(EXIT_OK if not failed else EXIT_FINDINGS)


# -- case workflow -----------------------------------------------------------------


@main.group()
def case() -> None:
    """Case intake, staging, assessment, and reporting."""


@case.command("new")
@_kb_option
@click.option("-f", "--file", "case_file", required=True, type=click.Path(), help="Case JSON file.")
def case_new(kb: str | None, case_file: str) -> None:
    """Create a case from a JSON document (same schema as POST /cases)."""
    store = _open_store(kb)
    try:
        payload = json.loads(Path(case_file).read_text(encoding="utf-8"))
    except OSError as exc:
        _fail(EXIT_IO, str(exc))
    except json.JSONDecodeError as exc:
        _fail(EXIT_FINDINGS, f"case file is not valid JSON: {exc}")
    try:
        record = CaseCreate.model_validate(payload).to_record()
    except Exception as exc:
        _fail(EXIT_FINDINGS, f"case payload invalid: {exc}")
    try:
        iri = store.persist_case(record, expect_new=True)
    except AidaError as exc:
        _fail(EXIT_FINDINGS, exc.message)
    click.echo(iri.value)


@case.command("stage")
@_kb_option
@click.argument("case_id")
@click.option("--tooth", required=True, help="FDI code of the tooth.")
@click.option("--stage", "stage_label", required=True, help="Stage label to assign.")
@click.option("--method", "method_id", required=True, help="Scoring method id.")
def case_stage(kb: str | None, case_id: str, tooth: str, stage_label: str, method_id: str) -> None:
    """Assign a developmental stage to one tooth."""
    store = _open_store(kb)
    try:
        record = store.load_case(case_id)
        method = store.registry.method(method_id)
        updated = engine.assign_stage(record, tooth, stage_label, method)
        store.persist_case(updated)
    except (ValidationError, NotFoundError) as exc:
        _fail(EXIT_FINDINGS, exc.message)
    click.echo(f"{case_id}: tooth {tooth} staged {stage_label} ({method_id})")


@case.command("assess")
@_kb_option
@click.argument("case_id")
@click.option("--method", "method_id", required=True)
@click.option("--study", "study_id", required=True)
@click.option("--threshold", type=float, default=18.0, show_default=True)
@click.option("--k", type=float, default=engine.DEFAULT_K, show_default=True)
@click.option("--sex", default=None, help="Override the recorded biological sex.")
def case_assess(
    kb: str | None,
    case_id: str,
    method_id: str,
    study_id: str,
    threshold: float,
    k: float,
    sex: str | None,
) -> None:
    """Run the manual assessment pipeline and persist the result."""
    store = _open_store(kb)
    try:
        record = store.load_case(case_id)
        method = store.registry.method(method_id)
        study = store.registry.study(study_id)
        assessment = engine.assess(
            record,
            method,
            study,
            assessment_id=f"m-{method_id}-{study_id}",
            sex=sex,
            k=k,
            threshold=threshold,
        )
        updated = engine.attach_report(record.with_assessment(assessment))
        store.persist_case(updated)
    except (ValidationError, NotFoundError) as exc:
        _fail(EXIT_FINDINGS, exc.message)
    result = assessment.result
    click.echo(
        f"score {engine.format_years(assessment.score)}"
        f" -> mean {engine.format_years(result.mean_age)}"
        f", sd {engine.format_years(result.standard_dev)}"
        f", interval {engine.age_range_text(result)}"
    )
    if assessment.classification is not None:
        cls = assessment.classification
        click.echo(
            f"threshold {engine.format_years(cls.threshold)}: "
            f"p(at or above) = {cls.probability_at_or_above:.3f}, verdict {cls.verdict}"
        )


@case.command("report")
@_kb_option
@click.argument("case_id")
@click.option("--json", "as_json", is_flag=True, help="JSON output instead of text.")
def case_report(kb: str | None, case_id: str, as_json: bool) -> None:
    """Render the case report."""
    store = _open_store(kb)
    try:
        record = store.load_case(case_id)
        if record.report is None:
            record = engine.attach_report(record)
        text = engine.render_report_text(record)
    except (ValidationError, NotFoundError) as exc:
        _fail(EXIT_FINDINGS, exc.message)
    if as_json:
        click.echo(
            json.dumps(
                {
                    "case_id": record.case_id,
                    "mean_age": record.report.mean_age,
                    "standard_dev": record.report.standard_dev,
                    "age_range_text": record.report.age_range_text,
                    "conclusion": record.report.conclusion,
                    "generated_at": record.report.timestamp.strftime("%Y-%m-%dT%H:%M:%SZ"),
                    "text": text,
                },
                indent=2,
                sort_keys=True,
            )
        )
    else:
        click.echo(text, nl=False)


# -- AI provenance ---------------------------------------------------------------------


@main.group()
def ai() -> None:
    """AI model output ingestion."""


@ai.command("ingest")
@_kb_option
@click.option("-f", "--file", "ingest_file", required=True, type=click.Path(), help="Ingestion JSON file.")
@click.option("--case", "case_id", default=None, help="Also attach the run's output to this case.")
def ai_ingest(kb: str | None, ingest_file: str, case_id: str | None) -> None:
    """Register a model (if new) and an inference run from one JSON file."""
    from aida.ai import ingest_as_assessment
    from aida.errors import ConflictError
    from aida.service.schemas import AiIngestFile

    store = _open_store(kb)
    try:
        payload = json.loads(Path(ingest_file).read_text(encoding="utf-8"))
    except OSError as exc:
        _fail(EXIT_IO, str(exc))
    except json.JSONDecodeError as exc:
        _fail(EXIT_FINDINGS, f"ingestion file is not valid JSON: {exc}")
    try:
        document = AiIngestFile.model_validate(payload)
    except Exception as exc:
        _fail(EXIT_FINDINGS, f"ingestion payload invalid: {exc}")
    try:
        if document.model is not None:
            try:
                store.save_model(document.model.to_record())
                click.echo(f"model {document.model.model_id} registered")
            except ConflictError:
                click.echo(f"model {document.model.model_id} already registered")
        run = document.run.to_record()
        store.save_run(run)
        click.echo(f"run {run.run_id} recorded ({len(run.outputs)} outputs)")
        if case_id is not None:
            record = store.load_case(case_id)
            model = store.get_model(run.model_id)
            assessment = ingest_as_assessment(run, model.task, record, f"ai-{run.run_id}")
            store.persist_case(record.with_ai_assessment(assessment))
            click.echo(f"case {case_id}: AI assessment ai-{run.run_id} attached")
    except (ValidationError, NotFoundError, ConflictError) as exc:
        _fail(EXIT_FINDINGS, exc.message)


# -- notation ------------------------------------------------------------------------


@main.command("convert")
@click.option("--from", "source", required=True, type=click.Choice(SYSTEMS), help="Source system.")
@click.option("--to", "target", required=True, type=click.Choice(SYSTEMS), help="Target system.")
@click.argument("code")
def convert(source: str, target: str, code: str) -> None:
    """Convert a tooth code between notation systems."""
    try:
        click.echo(convert_notation(code, source, target))
    except ValidationError as exc:
        _fail(EXIT_FINDINGS, exc.message)


# -- service -------------------------------------------------------------------------


@main.command("serve")
@_kb_option
@click.option("--config", "config_file", type=click.Path(), default=None, help="TOML config file.")
@click.option("--host", default=None)
@click.option("--port", type=int, default=None)
def serve(kb: str | None, config_file: str | None, host: str | None, port: int | None) -> None:
    """Start the HTTP API after validating the KB."""
    import uvicorn

    from aida.service.app import create_app, load_config

    try:
        config = load_config(config_file, kb_root=kb, host=host, port=port)
    except OSError as exc:
        _fail(EXIT_IO, str(exc))
    store = _open_store(str(config.kb_root))
    report = store.validation_report()
    if not report.ok():
        click.echo(report.to_text(), nl=False, err=True)
        _fail(EXIT_FINDINGS, "KB validation failed; refusing to serve")
    app = create_app(store, config)
    uvicorn.run(app, host=config.host, port=config.port, log_level="warning")


if __name__ == "__main__":
    main()
