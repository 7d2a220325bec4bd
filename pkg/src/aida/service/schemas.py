"""Request/response models for the HTTP API."""

from __future__ import annotations

import datetime as dt

from pydantic import BaseModel, ConfigDict, Field

from aida import model as dm
from aida.ai import DataCollection, InferenceRunRecord, ModelOutput, ModelRecord


class Problem(BaseModel):
    code: str
    message: str


class ExpertIn(BaseModel):
    name: str
    role_label: str = "forensic expert"


class IndividualIn(BaseModel):
    reported_age: float | None = None
    biological_sex: str = "unknown"
    identifiers: list[str] = Field(default_factory=list)


class OpgIn(BaseModel):
    image_id: str
    acquisition_date: dt.date
    storage_ref: str | None = None


class TreatmentIn(BaseModel):
    label: str
    note: str | None = None


class ToothIn(BaseModel):
    fdi: str
    treatment: TreatmentIn | None = None


class CaseCreate(BaseModel):
    model_config = ConfigDict(extra="forbid")

    case_id: str
    requesting_entity: str
    examination_date: dt.date
    expert: ExpertIn
    individual: IndividualIn = Field(default_factory=IndividualIn)
    opg: OpgIn
    teeth: list[ToothIn] = Field(default_factory=list)

    def to_record(self) -> dm.CaseRecord:
        return dm.CaseRecord(
            case_id=self.case_id,
            requesting_entity=self.requesting_entity,
            examination_date=self.examination_date,
            expert=dm.Expert(name=self.expert.name, role_label=self.expert.role_label),
            individual=dm.Individual(
                reported_age=self.individual.reported_age,
                biological_sex=self.individual.biological_sex,
                identifiers=tuple(self.individual.identifiers),
            ),
            opg=dm.Opg(
                image_id=self.opg.image_id,
                acquisition_date=self.opg.acquisition_date,
                storage_ref=self.opg.storage_ref,
            ),
            teeth=tuple(
                sorted(
                    (
                        dm.ToothRecord(
                            fdi=t.fdi,
                            treatment=dm.Treatment(t.treatment.label, t.treatment.note)
                            if t.treatment
                            else None,
                        )
                        for t in self.teeth
                    ),
                    key=lambda t: t.fdi,
                )
            ),
        )


class StageOut(BaseModel):
    stage: str
    method_id: str


class ToothOut(BaseModel):
    fdi: str
    uns: str
    palmer: str
    haderup: str | None = None
    treatment: TreatmentIn | None = None
    stage: StageOut | None = None


class ClassificationOut(BaseModel):
    threshold: float
    probability_at_or_above: float
    verdict: str


class AssessmentOut(BaseModel):
    assessment_id: str
    method_id: str
    study_id: str
    score: float
    mean_age: float
    standard_dev: float
    min_age: float
    max_age: float
    k: float
    clamped: bool
    classification: ClassificationOut | None = None
    timestamp: str

    @classmethod
    def from_record(cls, a: dm.ManualAssessment) -> "AssessmentOut":
        classification = None
        if a.classification is not None:
            classification = ClassificationOut(
                threshold=a.classification.threshold,
                probability_at_or_above=a.classification.probability_at_or_above,
                verdict=a.classification.verdict,
            )
        return cls(
            assessment_id=a.assessment_id,
            method_id=a.method_id,
            study_id=a.study_id,
            score=a.score,
            mean_age=a.result.mean_age,
            standard_dev=a.result.standard_dev,
            min_age=a.result.min_age,
            max_age=a.result.max_age,
            k=a.k,
            clamped=a.clamped,
            classification=classification,
            timestamp=a.timestamp.strftime("%Y-%m-%dT%H:%M:%SZ"),
        )


class AiAssessmentOut(BaseModel):
    assessment_id: str
    kind: str
    run_id: str
    threshold: float | None = None
    probability_at_or_above: float | None = None
    estimated_age: float | None = None
    uncertainty: float | None = None
    timestamp: str

    @classmethod
    def from_record(cls, a: dm.AiAssessment) -> "AiAssessmentOut":
        return cls(
            assessment_id=a.assessment_id,
            kind=a.kind,
            run_id=a.run_id,
            threshold=a.threshold,
            probability_at_or_above=a.probability_at_or_above,
            estimated_age=a.estimated_age,
            uncertainty=a.uncertainty,
            timestamp=a.timestamp.strftime("%Y-%m-%dT%H:%M:%SZ"),
        )


class CaseOut(BaseModel):
    case_id: str
    case_iri: str
    requesting_entity: str
    examination_date: dt.date
    expert: ExpertIn
    individual: IndividualIn
    opg: OpgIn
    teeth: list[ToothOut]
    assessments: list[AssessmentOut]
    ai_assessments: list[AiAssessmentOut]
    revision: int

    @classmethod
    def from_record(cls, record: dm.CaseRecord, revision: int) -> "CaseOut":
        from aida.notation import all_codes

        teeth = []
        for t in record.teeth:
            codes = all_codes(t.fdi)
            teeth.append(
                ToothOut(
                    fdi=t.fdi,
                    uns=codes["uns"],
                    palmer=codes["palmer"],
                    haderup=codes.get("haderup"),
                    treatment=TreatmentIn(label=t.treatment.label, note=t.treatment.note)
                    if t.treatment
                    else None,
                    stage=StageOut(stage=t.stage.stage_label, method_id=t.stage.method_id)
                    if t.stage
                    else None,
                )
            )
        return cls(
            case_id=record.case_id,
            case_iri=record.iri.value,
            requesting_entity=record.requesting_entity,
            examination_date=record.examination_date,
            expert=ExpertIn(name=record.expert.name, role_label=record.expert.role_label),
            individual=IndividualIn(
                reported_age=record.individual.reported_age,
                biological_sex=record.individual.biological_sex,
                identifiers=list(record.individual.identifiers),
            ),
            opg=OpgIn(
                image_id=record.opg.image_id,
                acquisition_date=record.opg.acquisition_date,
                storage_ref=record.opg.storage_ref,
            ),
            teeth=teeth,
            assessments=[AssessmentOut.from_record(a) for a in record.assessments],
            ai_assessments=[AiAssessmentOut.from_record(a) for a in record.ai_assessments],
            revision=revision,
        )


class CaseCreated(BaseModel):
    case_id: str
    case_iri: str
    revision: int


class StageUpdate(BaseModel):
    stage: str
    method_id: str


class AssessRequest(BaseModel):
    method_id: str
    study_id: str
    threshold: float | None = None
    k: float | None = None
    sex: str | None = None


class AiAssessRequest(BaseModel):
    run_id: str


class QualityIn(BaseModel):
    title: str
    value: str


class ModelCreate(BaseModel):
    model_id: str
    qualities: list[QualityIn]
    characteristics: list[QualityIn] = Field(default_factory=list)

    def to_record(self) -> ModelRecord:
        return ModelRecord(
            model_id=self.model_id,
            qualities=tuple((q.title, q.value) for q in self.qualities),
            characteristics=tuple((q.title, q.value) for q in self.characteristics),
        )


class ModelCreated(BaseModel):
    model_id: str
    model_iri: str
    revision: int


class CollectionIn(BaseModel):
    collection_id: str
    members: list[str]
    descriptor: str = ""


class OutputIn(BaseModel):
    opg_ref: str
    threshold: float | None = None
    probability_at_or_above: float | None = None
    estimated_age: float | None = None
    uncertainty: float | None = None


class RunCreate(BaseModel):
    run_id: str
    model_id: str
    collection: CollectionIn
    outputs: list[OutputIn]
    timestamp: dt.datetime | None = None
    measures: list[QualityIn] = Field(default_factory=list)

    def to_record(self) -> InferenceRunRecord:
        return InferenceRunRecord(
            run_id=self.run_id,
            model_id=self.model_id,
            collection=DataCollection(
                collection_id=self.collection.collection_id,
                members=tuple(self.collection.members),
                descriptor=self.collection.descriptor,
            ),
            outputs=tuple(
                ModelOutput(
                    opg_ref=o.opg_ref,
                    threshold=o.threshold,
                    probability_at_or_above=o.probability_at_or_above,
                    estimated_age=o.estimated_age,
                    uncertainty=o.uncertainty,
                )
                for o in self.outputs
            ),
            timestamp=self.timestamp or dt.datetime(2000, 1, 1, tzinfo=dt.timezone.utc),
            measures=tuple((m.title, m.value) for m in self.measures),
        )


class AiIngestFile(BaseModel):
    """One-file AI output ingestion: optional model block plus run block."""

    model: ModelCreate | None = None
    run: RunCreate


class RunCreated(BaseModel):
    run_id: str
    run_iri: str
    revision: int


class SparqlRequest(BaseModel):
    query: str


class SparqlResponse(BaseModel):
    header: list[str]
    rows: list[dict[str, dict | None]]


class CqEntry(BaseModel):
    name: str
    rows: int
    bound: str
    passed: bool


class CqResponse(BaseModel):
    results: list[CqEntry]
    passed: bool


class StatsResponse(BaseModel):
    classes: int
    object_properties: int
    data_properties: int
    triples: int
    revision: int


class HealthResponse(BaseModel):
    status: str
    revision: int


class ReportResponse(BaseModel):
    case_id: str
    mean_age: float
    standard_dev: float
    age_range_text: str
    conclusion: str
    generated_at: str
    text: str


class MethodOut(BaseModel):
    method_id: str
    name: str
    stages: list[str]
    required_teeth: list[str]
    aggregation: str
    note: str | None = None


class StudyOut(BaseModel):
    study_id: str
    population: str
    sex: str
    citation: str | None = None
    min_score: float
    max_score: float


class NotationEntry(BaseModel):
    fdi: str
    uns: str
    palmer: str
    haderup: str | None = None


class ConvertResponse(BaseModel):
    code: str
    source: str
    target: str
    result: str
