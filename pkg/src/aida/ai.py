"""AI assessment provenance: models, inference runs, data collections,
model outputs, and their ingestion as case assessments.

Models carry (title, value) qualities — at minimum "name" and "task" —
so the quality-node traversal used by the SPARQL console and the shipped
sample query resolves model name and task type by title filter.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field

from aida import namespaces as ns
from aida.errors import NotFoundError, ValidationError
from aida.engine import DEFAULT_BAND, ai_verdict
from aida.model import (
    AiAssessment,
    CaseRecord,
    ManualAssessment,
    datetime_literal,
    format_years,
    mint_iri,
    probability_literal,
    years_literal,
)
from aida.rdf.graph import Graph
from aida.rdf.terms import Iri, Literal, Term, Triple

_TYPE = Iri(ns.RDF_TYPE)
_MLS_MODEL = Iri(ns.MLS + "Model")
_HAS_QUALITY = Iri(ns.MLS + "hasQuality")
_HAS_VALUE = Iri(ns.MLS + "hasValue")
_TITLE = Iri(ns.DC_TITLE)

TASKS = ("classification", "regression")


@dataclass(frozen=True)
class ModelRecord:
    model_id: str
    qualities: tuple[tuple[str, str], ...]
    characteristics: tuple[tuple[str, str], ...] = ()

    def validate(self) -> None:
        tasks = [v for t, v in self.qualities if t == "task"]
        if len(tasks) != 1:
            raise ValidationError(f"model {self.model_id}: exactly one 'task' quality required")
        if tasks[0] not in TASKS:
            raise ValidationError(f"model {self.model_id}: task must be one of {TASKS}")

    @property
    def task(self) -> str:
        return next(v for t, v in self.qualities if t == "task")

    @property
    def name(self) -> str:
        return next((v for t, v in self.qualities if t == "name"), self.model_id)

    @property
    def iri(self) -> Iri:
        return mint_iri("model", self.model_id)


@dataclass(frozen=True)
class ModelOutput:
    opg_ref: str
    threshold: float | None = None
    probability_at_or_above: float | None = None
    estimated_age: float | None = None
    uncertainty: float | None = None

    @property
    def kind(self) -> str:
        return "threshold" if self.threshold is not None else "regression"

    def validate(self, task: str) -> None:
        if task == "classification":
            if self.threshold is None or self.probability_at_or_above is None:
                raise ValidationError("classification output needs threshold and probability")
            if not 0 <= self.probability_at_or_above <= 1:
                raise ValidationError("probability must lie in [0, 1]")
        else:
            if self.estimated_age is None or self.estimated_age <= 0:
                raise ValidationError("regression output needs a positive estimated age")


@dataclass(frozen=True)
class DataCollection:
    collection_id: str
    members: tuple[str, ...]
    descriptor: str = ""

    def validate(self) -> None:
        if len(set(self.members)) != len(self.members):
            raise ValidationError(f"collection {self.collection_id}: duplicate members")

    @property
    def iri(self) -> Iri:
        return mint_iri("collection", self.collection_id)


@dataclass(frozen=True)
class InferenceRunRecord:
    run_id: str
    model_id: str
    collection: DataCollection
    outputs: tuple[ModelOutput, ...]
    timestamp: dt.datetime = field(
        default_factory=lambda: dt.datetime(2000, 1, 1, tzinfo=dt.timezone.utc)
    )
    #: named statistical assessment measures, stored verbatim
    measures: tuple[tuple[str, str], ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "measures", tuple(sorted(self.measures)))

    def validate(self, task: str) -> None:
        self.collection.validate()
        if not self.outputs:
            raise ValidationError(f"run {self.run_id}: at least one output required")
        for output in self.outputs:
            output.validate(task)
            if output.opg_ref not in self.collection.members:
                raise ValidationError(
                    f"run {self.run_id}: output for {output.opg_ref} references an image "
                    f"outside collection {self.collection.collection_id}"
                )

    @property
    def iri(self) -> Iri:
        return mint_iri("run", self.run_id)

    def output_for(self, opg_ref: str) -> ModelOutput:
        for output in self.outputs:
            if output.opg_ref == opg_ref:
                return output
        raise NotFoundError(f"run {self.run_id} has no output for image {opg_ref}")


# -- RDF projection --------------------------------------------------------------


def register_model(record: ModelRecord) -> list[Triple]:
    """Triples for one model: mls typing plus titled quality nodes."""
    record.validate()
    node = record.iri
    triples = [Triple(node, _TYPE, _MLS_MODEL)]
    for i, (title, value) in enumerate(record.qualities, start=1):
        quality = Iri(node.value + f"/quality/{i}")
        triples.append(Triple(node, _HAS_QUALITY, quality))
        triples.append(Triple(quality, _TITLE, Literal(title)))
        triples.append(Triple(quality, _HAS_VALUE, Literal(value)))
    for i, (name, value) in enumerate(record.characteristics, start=1):
        characteristic = Iri(node.value + f"/characteristic/{i}")
        triples.append(Triple(node, Iri(ns.AIDA + "hasModelCharacteristic"), characteristic))
        triples.append(Triple(characteristic, _TYPE, Iri(ns.AIDA + "ModelCharacteristic")))
        triples.append(Triple(characteristic, _TITLE, Literal(name)))
        triples.append(Triple(characteristic, _HAS_VALUE, Literal(value)))
    return triples


def record_inference(run: InferenceRunRecord, task: str) -> list[Triple]:
    """Triples for a run, its data collection, and per-image outputs."""
    run.validate(task)
    node = run.iri
    collection = run.collection.iri
    triples = [
        Triple(node, _TYPE, Iri(ns.AIDA + "InferenceRun")),
        Triple(node, Iri(ns.AIDA + "runIdentifier"), Literal(run.run_id)),
        Triple(node, Iri(ns.AIDA + "runTimestamp"), datetime_literal(run.timestamp)),
        Triple(node, Iri(ns.AIDA + "hasModel"), mint_iri("model", run.model_id)),
        Triple(node, Iri(ns.AIDA + "hasDataCollection"), collection),
        Triple(collection, _TYPE, Iri(ns.AIDA + "DataCollection")),
        Triple(collection, Iri(ns.AIDA + "collectionIdentifier"), Literal(run.collection.collection_id)),
    ]
    if run.collection.descriptor:
        triples.append(
            Triple(collection, Iri(ns.AIDA + "collectionDescriptor"), Literal(run.collection.descriptor))
        )
    for member in run.collection.members:
        triples.append(Triple(collection, Iri(ns.AIDA + "containsOPG"), mint_iri("opg", member)))
    for i, (title, value) in enumerate(run.measures, start=1):
        measure = Iri(node.value + f"/measure/{i}")
        triples.append(Triple(node, _HAS_QUALITY, measure))
        triples.append(Triple(measure, _TYPE, Iri(ns.AIDA + "StatisticalAssessmentMeasure")))
        triples.append(Triple(measure, _TITLE, Literal(title)))
        triples.append(Triple(measure, _HAS_VALUE, Literal(value)))
    for i, output in enumerate(run.outputs, start=1):
        out_node = Iri(node.value + f"/output/{i}")
        kind = "ThresholdModelOutput" if output.kind == "threshold" else "RegressionModelOutput"
        triples.append(Triple(node, Iri(ns.AIDA + "producesOutput"), out_node))
        triples.append(Triple(out_node, _TYPE, Iri(ns.AIDA + kind)))
        triples.append(Triple(out_node, Iri(ns.AIDA + "refersToOPG"), mint_iri("opg", output.opg_ref)))
        if output.kind == "threshold":
            triples.append(Triple(out_node, Iri(ns.AIDA + "thresholdYears"), years_literal(output.threshold)))
            triples.append(
                Triple(out_node, Iri(ns.AIDA + "probabilityAtOrAbove"), probability_literal(output.probability_at_or_above))
            )
        else:
            triples.append(Triple(out_node, Iri(ns.AIDA + "estimatedAgeValue"), years_literal(output.estimated_age)))
            if output.uncertainty is not None:
                triples.append(Triple(out_node, Iri(ns.AIDA + "uncertaintyValue"), years_literal(output.uncertainty)))
    return triples


def ingest_as_assessment(
    run: InferenceRunRecord,
    task: str,
    case: CaseRecord,
    assessment_id: str,
    clock: dt.datetime | None = None,
) -> AiAssessment:
    """Turn the run's output for the case's image into a typed assessment."""
    output = run.output_for(case.opg.image_id)
    timestamp = clock or run.timestamp
    if task == "classification":
        assessment = AiAssessment(
            assessment_id=assessment_id,
            kind="threshold",
            run_id=run.run_id,
            threshold=output.threshold,
            probability_at_or_above=output.probability_at_or_above,
            timestamp=timestamp,
        )
    else:
        assessment = AiAssessment(
            assessment_id=assessment_id,
            kind="regression",
            run_id=run.run_id,
            estimated_age=output.estimated_age,
            uncertainty=output.uncertainty,
            timestamp=timestamp,
        )
    assessment.validate()
    return assessment


# -- reading provenance back from the graph ---------------------------------------


def model_from_rdf(g: Graph, model_id: str) -> ModelRecord:
    node = mint_iri("model", model_id)
    if Triple(node, _TYPE, _MLS_MODEL) not in g:
        raise NotFoundError(f"unknown model: {model_id}")
    qualities = []
    for t in g.match(node, _HAS_QUALITY):
        title = g.value(t.object, _TITLE)
        value = g.value(t.object, _HAS_VALUE)
        if isinstance(title, Literal) and isinstance(value, Literal):
            qualities.append((title.lexical, value.lexical))
    characteristics = []
    for t in g.match(node, Iri(ns.AIDA + "hasModelCharacteristic")):
        title = g.value(t.object, _TITLE)
        value = g.value(t.object, _HAS_VALUE)
        if isinstance(title, Literal) and isinstance(value, Literal):
            characteristics.append((title.lexical, value.lexical))
    record = ModelRecord(
        model_id=model_id,
        qualities=tuple(sorted(qualities)),
        characteristics=tuple(sorted(characteristics)),
    )
    record.validate()
    return record


def run_from_rdf(g: Graph, run_id: str) -> InferenceRunRecord:
    node = mint_iri("run", run_id)
    if Triple(node, _TYPE, Iri(ns.AIDA + "InferenceRun")) not in g:
        raise NotFoundError(f"unknown inference run: {run_id}")
    model_ref = g.value(node, Iri(ns.AIDA + "hasModel"))
    collection_ref = g.value(node, Iri(ns.AIDA + "hasDataCollection"))
    if model_ref is None or collection_ref is None:
        raise ValidationError(f"run {run_id}: incomplete provenance in the graph")
    members = tuple(
        _opg_id(t.object) for t in g.match(collection_ref, Iri(ns.AIDA + "containsOPG"))
    )
    descriptor = g.value(collection_ref, Iri(ns.AIDA + "collectionDescriptor"))
    collection_id = g.value(collection_ref, Iri(ns.AIDA + "collectionIdentifier"))
    outputs = []
    for t in g.match(node, Iri(ns.AIDA + "producesOutput")):
        out = t.object
        threshold = _num(g.value(out, Iri(ns.AIDA + "thresholdYears")))
        probability = _num(g.value(out, Iri(ns.AIDA + "probabilityAtOrAbove")))
        estimated = _num(g.value(out, Iri(ns.AIDA + "estimatedAgeValue")))
        uncertainty = _num(g.value(out, Iri(ns.AIDA + "uncertaintyValue")))
        outputs.append(
            ModelOutput(
                opg_ref=_opg_id(g.value(out, Iri(ns.AIDA + "refersToOPG"))),
                threshold=threshold,
                probability_at_or_above=probability,
                estimated_age=estimated,
                uncertainty=uncertainty,
            )
        )
    measures = []
    for t in g.match(node, _HAS_QUALITY):
        title = g.value(t.object, _TITLE)
        value = g.value(t.object, _HAS_VALUE)
        if isinstance(title, Literal) and isinstance(value, Literal):
            measures.append((title.lexical, value.lexical))
    timestamp_term = g.value(node, Iri(ns.AIDA + "runTimestamp"))
    from aida.model import parse_datetime

    return InferenceRunRecord(
        run_id=run_id,
        model_id=_model_id(model_ref),
        collection=DataCollection(
            collection_id=collection_id.lexical if isinstance(collection_id, Literal) else "",
            members=tuple(sorted(members)),
            descriptor=descriptor.lexical if isinstance(descriptor, Literal) else "",
        ),
        outputs=tuple(sorted(outputs, key=lambda o: o.opg_ref)),
        timestamp=parse_datetime(timestamp_term.lexical)
        if isinstance(timestamp_term, Literal)
        else dt.datetime(2000, 1, 1, tzinfo=dt.timezone.utc),
        measures=tuple(sorted(measures)),
    )


def _opg_id(term: Term | None) -> str:
    prefix = ns.AIDA + "opg/"
    if isinstance(term, Iri) and term.value.startswith(prefix):
        return term.value[len(prefix):]
    raise ValidationError(f"expected an image IRI, found {term.n3() if term else None}")


def _model_id(term: Term) -> str:
    prefix = ns.AIDA + "model/"
    if isinstance(term, Iri) and term.value.startswith(prefix):
        return term.value[len(prefix):]
    raise ValidationError(f"expected a model IRI, found {term.n3()}")


def _num(term: Term | None) -> float | None:
    if term is None or not isinstance(term, Literal):
        return None
    return float(term.lexical)


# -- comparison --------------------------------------------------------------------


@dataclass(frozen=True)
class Discrepancy:
    kind: str  # "regression" or "threshold"
    age_difference: float | None = None
    manual_verdict: str | None = None
    ai_verdict: str | None = None
    agree: bool | None = None

    def summary(self) -> str:
        if self.kind == "regression":
            sign = "+" if self.age_difference >= 0 else ""
            return f"age difference {sign}{format_years(self.age_difference)} years (AI minus manual)"
        state = "agree" if self.agree else "disagree"
        return f"threshold verdicts {state}: manual {self.manual_verdict}, AI {self.ai_verdict}"


def compare_assessments(
    manual: ManualAssessment,
    ai: AiAssessment,
    manual_case_id: str,
    ai_case_id: str,
    band: float = DEFAULT_BAND,
) -> Discrepancy:
    """Discrepancy between a manual and an AI assessment of the same case."""
    if manual_case_id != ai_case_id:
        raise ValidationError(
            f"assessments reference different cases: {manual_case_id} vs {ai_case_id}"
        )
    if ai.kind == "regression":
        return Discrepancy(kind="regression", age_difference=ai.estimated_age - manual.result.mean_age)
    if manual.classification is None:
        raise ValidationError("manual assessment carries no threshold classification to compare")
    manual_verdict = manual.classification.verdict
    machine_verdict = ai_verdict(ai, band)
    return Discrepancy(
        kind="threshold",
        manual_verdict=manual_verdict,
        ai_verdict=machine_verdict,
        agree=manual_verdict == machine_verdict,
    )
