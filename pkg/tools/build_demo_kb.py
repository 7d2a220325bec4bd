#!/usr/bin/env python3
"""Rebuild the demo knowledge-base instance documents in kb/.

Schema files, method definitions, study tables, competency questions, and
sample queries are static; this script regenerates the case, model, run,
and collection documents through the domain API so every shipped number is
the engine's own output.
"""

from __future__ import annotations

import datetime as dt
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from aida import engine  # noqa: E402
from aida.ai import DataCollection, InferenceRunRecord, ModelOutput, ModelRecord, ingest_as_assessment, record_inference, register_model  # noqa: E402
from aida.methods import load_method, load_study  # noqa: E402
from aida.model import CaseRecord, Expert, Individual, Opg, ToothRecord, Treatment, to_rdf  # noqa: E402
from aida.namespaces import DEFAULT_PREFIXES  # noqa: E402
from aida.rdf.graph import Graph  # noqa: E402
from aida.rdf.turtle import serialize_turtle  # noqa: E402

KB = ROOT / "kb"
CLOCK = dt.datetime(2025, 11, 20, 10, 0, 0, tzinfo=dt.timezone.utc)


def write_turtle(path: Path, triples) -> None:
    g = Graph(DEFAULT_PREFIXES)
    g.update(triples)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(serialize_turtle(g), encoding="utf-8")
    print(f"wrote {path.relative_to(ROOT)} ({len(g)} triples)")


def build() -> None:
    method = load_method(KB / "methods" / "demirjian-1973.json")
    study = load_study(KB / "studies" / "demo-study.json")

    case = CaseRecord(
        case_id="demo-0001",
        requesting_entity="Family and Juvenile Court, Lisbon",
        examination_date=dt.date(2025, 11, 20),
        expert=Expert(name="M. Sousa", role_label="forensic odontologist"),
        individual=Individual(
            reported_age=17.0,
            biological_sex="male",
            identifiers=("IND-2025-113",),
        ),
        opg=Opg(
            image_id="opg-0001",
            acquisition_date=dt.date(2025, 11, 12),
            storage_ref="images/opg-0001.png",
        ),
        teeth=tuple(
            [ToothRecord(fdi=str(fdi)) for fdi in (31, 32, 33, 34, 35, 36, 37)]
            + [ToothRecord(fdi="18", treatment=Treatment(label="extracted"))]
        ),
    )

    # stage the seven required teeth at E (10 points each -> score 70)
    for fdi in method.required_teeth:
        case = engine.assign_stage(case, fdi, "E", method)

    assessment = engine.assess(
        case,
        method,
        study,
        assessment_id="m-demirjian-1973-demo-study",
        k=2.0,
        threshold=18.0,
        clock=CLOCK,
    )
    case = case.with_assessment(assessment)

    model = ModelRecord(
        model_id="demo-cnn",
        qualities=(("name", "demo-cnn"), ("task", "classification")),
        characteristics=(("architecture", "convolutional network"), ("epochs", "40")),
    )
    collection = DataCollection(
        collection_id="demo-collection",
        members=("opg-0001",),
        descriptor="Demonstration collection with the demo case image",
    )
    run = InferenceRunRecord(
        run_id="run-0001",
        model_id=model.model_id,
        collection=collection,
        outputs=(ModelOutput(opg_ref="opg-0001", threshold=18.0, probability_at_or_above=0.73),),
        timestamp=CLOCK,
    )
    ai_assessment = ingest_as_assessment(run, model.task, case, assessment_id="ai-run-0001", clock=CLOCK)
    case = case.with_ai_assessment(ai_assessment)
    case = engine.attach_report(case, clock=CLOCK)

    write_turtle(KB / "cases" / "demo-0001.ttl", to_rdf(case))
    write_turtle(KB / "models" / "demo-cnn.ttl", register_model(model))
    write_turtle(KB / "runs" / "run-0001.ttl", record_inference(run, model.task))

    print("demo assessment:", assessment.result)
    if assessment.classification:
        print("p(>= 18):", assessment.classification.probability_at_or_above)


if __name__ == "__main__":
    build()
