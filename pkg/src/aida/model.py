"""Typed case records and their bidirectional mapping to RDF.

A case document is a self-contained Turtle file: the examination root, the
persons, the imaging, the staged teeth, any assessments, and the report.
`to_rdf` / `from_rdf` round-trip exactly; triples the mapper does not
recognize survive as annotations on the record.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field, replace
from pathlib import Path
from urllib.parse import quote

from aida import namespaces as ns
from aida.errors import NotFoundError, ValidationError
from aida.notation import all_codes, is_permanent, is_valid_fdi
from aida.rdf.graph import Graph
from aida.rdf.terms import Iri, Literal, Term, Triple
from aida.rdf.turtle import parse_turtle
from aida.reasoner import ClosedGraph, ValidationReport, validate_schema

SEXES = ("female", "male", "unknown")
VERDICTS = ("above", "below", "indeterminate")

_TYPE = Iri(ns.RDF_TYPE)


def mint_iri(kind: str, identifier: str) -> Iri:
    return Iri(ns.AIDA + kind + "/" + quote(identifier, safe="/"))


# -- literal helpers ---------------------------------------------------------


def years_literal(value: float) -> Literal:
    """Decimal literal at the 0.01-year resolution used for ages."""
    return Literal(format_years(value), Iri(ns.XSD_DECIMAL))


def format_years(value: float) -> str:
    text = f"{value:.2f}".rstrip("0").rstrip(".")
    return text if text not in ("", "-") else "0"


def probability_literal(value: float) -> Literal:
    text = f"{value:.4f}".rstrip("0").rstrip(".")
    return Literal(text if text else "0", Iri(ns.XSD_DECIMAL))


def date_literal(value: dt.date) -> Literal:
    return Literal(value.isoformat(), Iri(ns.XSD_DATE))


def datetime_literal(value: dt.datetime) -> Literal:
    if value.tzinfo is None:
        value = value.replace(tzinfo=dt.timezone.utc)
    value = value.astimezone(dt.timezone.utc)
    return Literal(value.strftime("%Y-%m-%dT%H:%M:%SZ"), Iri(ns.XSD_DATETIME))


def bool_literal(value: bool) -> Literal:
    return Literal("true" if value else "false", Iri(ns.XSD_BOOLEAN))


def parse_date(lexical: str) -> dt.date:
    return dt.date.fromisoformat(lexical)


def parse_datetime(lexical: str) -> dt.datetime:
    text = lexical.replace("Z", "+00:00")
    return dt.datetime.fromisoformat(text).astimezone(dt.timezone.utc)


# -- records -----------------------------------------------------------------


@dataclass(frozen=True)
class Expert:
    name: str
    role_label: str = "forensic expert"


@dataclass(frozen=True)
class Individual:
    reported_age: float | None = None
    biological_sex: str = "unknown"
    identifiers: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "identifiers", tuple(sorted(self.identifiers)))

    def validate(self) -> None:
        if self.biological_sex not in SEXES:
            raise ValidationError(f"biological sex must be one of {SEXES}")
        if self.reported_age is not None and not 0 <= self.reported_age <= 150:
            raise ValidationError("reported age must lie in [0, 150]")


@dataclass(frozen=True)
class Opg:
    image_id: str
    acquisition_date: dt.date
    storage_ref: str | None = None


@dataclass(frozen=True)
class Treatment:
    label: str
    note: str | None = None


@dataclass(frozen=True)
class ToothStageRecord:
    stage_label: str
    method_id: str


@dataclass(frozen=True)
class ToothRecord:
    fdi: str
    treatment: Treatment | None = None
    stage: ToothStageRecord | None = None

    def validate(self) -> None:
        if not is_valid_fdi(self.fdi):
            raise ValidationError(f"invalid FDI code: {self.fdi!r}")


@dataclass(frozen=True)
class StudyResult:
    mean_age: float
    standard_dev: float
    min_age: float
    max_age: float

    def validate(self) -> None:
        if self.standard_dev < 0:
            raise ValidationError("standard deviation must be non-negative")
        if not self.min_age <= self.mean_age <= self.max_age:
            raise ValidationError("result must satisfy min <= mean <= max")


@dataclass(frozen=True)
class ThresholdClassification:
    threshold: float
    probability_at_or_above: float
    verdict: str

    def validate(self) -> None:
        if not 0 <= self.probability_at_or_above <= 1:
            raise ValidationError("probability must lie in [0, 1]")
        if self.verdict not in VERDICTS:
            raise ValidationError(f"verdict must be one of {VERDICTS}")


@dataclass(frozen=True)
class ManualAssessment:
    assessment_id: str
    method_id: str
    study_id: str
    score: float
    result: StudyResult
    k: float
    clamped: bool = False
    classification: ThresholdClassification | None = None
    timestamp: dt.datetime = field(
        default_factory=lambda: dt.datetime(2000, 1, 1, tzinfo=dt.timezone.utc)
    )


@dataclass(frozen=True)
class AiAssessment:
    assessment_id: str
    kind: str  # "threshold" or "regression"
    run_id: str
    threshold: float | None = None
    probability_at_or_above: float | None = None
    estimated_age: float | None = None
    uncertainty: float | None = None
    timestamp: dt.datetime = field(
        default_factory=lambda: dt.datetime(2000, 1, 1, tzinfo=dt.timezone.utc)
    )

    def validate(self) -> None:
        if self.kind == "threshold":
            if self.threshold is None or self.probability_at_or_above is None:
                raise ValidationError("threshold assessment needs threshold and probability")
            if not 0 <= self.probability_at_or_above <= 1:
                raise ValidationError("probability must lie in [0, 1]")
        elif self.kind == "regression":
            if self.estimated_age is None or self.estimated_age <= 0:
                raise ValidationError("regression assessment needs a positive estimated age")
        else:
            raise ValidationError(f"unknown AI assessment kind: {self.kind!r}")


@dataclass(frozen=True)
class ReportRecord:
    mean_age: float
    standard_dev: float
    age_range_text: str
    conclusion: str
    timestamp: dt.datetime


Annotation = tuple[Term, Term, Term]


@dataclass(frozen=True)
class CaseRecord:
    case_id: str
    requesting_entity: str
    examination_date: dt.date
    expert: Expert
    individual: Individual
    opg: Opg
    teeth: tuple[ToothRecord, ...] = ()
    assessments: tuple[ManualAssessment, ...] = ()
    ai_assessments: tuple[AiAssessment, ...] = ()
    report: ReportRecord | None = None
    annotations: tuple[Annotation, ...] = ()

    def __post_init__(self) -> None:
        # canonical ordering, so records compare equal across round trips
        object.__setattr__(self, "teeth", tuple(sorted(self.teeth, key=lambda t: t.fdi)))
        object.__setattr__(
            self, "assessments", tuple(sorted(self.assessments, key=lambda a: a.assessment_id))
        )
        object.__setattr__(
            self, "ai_assessments", tuple(sorted(self.ai_assessments, key=lambda a: a.assessment_id))
        )

    def validate(self, today: dt.date | None = None) -> None:
        if not self.case_id:
            raise ValidationError("case id must be non-empty")
        if today is not None and self.examination_date > today:
            raise ValidationError("examination date lies in the future")
        self.individual.validate()
        seen = set()
        for tooth in self.teeth:
            tooth.validate()
            if tooth.fdi in seen:
                raise ValidationError(f"duplicate tooth {tooth.fdi} in teeth set")
            seen.add(tooth.fdi)
        for assessment in self.ai_assessments:
            assessment.validate()
        for assessment in self.assessments:
            assessment.result.validate()
            if assessment.classification is not None:
                assessment.classification.validate()

    def tooth(self, fdi: str) -> ToothRecord:
        for t in self.teeth:
            if t.fdi == fdi:
                return t
        raise NotFoundError(f"tooth {fdi} is not in the teeth set")

    def with_tooth(self, tooth: ToothRecord) -> "CaseRecord":
        rest = tuple(t for t in self.teeth if t.fdi != tooth.fdi)
        ordered = tuple(sorted(rest + (tooth,), key=lambda t: t.fdi))
        return replace(self, teeth=ordered)

    def with_assessment(self, assessment: ManualAssessment) -> "CaseRecord":
        rest = tuple(a for a in self.assessments if a.assessment_id != assessment.assessment_id)
        ordered = tuple(sorted(rest + (assessment,), key=lambda a: a.assessment_id))
        return replace(self, assessments=ordered)

    def with_ai_assessment(self, assessment: AiAssessment) -> "CaseRecord":
        rest = tuple(a for a in self.ai_assessments if a.assessment_id != assessment.assessment_id)
        ordered = tuple(sorted(rest + (assessment,), key=lambda a: a.assessment_id))
        return replace(self, ai_assessments=ordered)

    # -- IRIs ----------------------------------------------------------------

    @property
    def iri(self) -> Iri:
        return mint_iri("case", self.case_id)

    def assessment_iri(self, assessment_id: str) -> Iri:
        return mint_iri("case", f"{self.case_id}/assessment/{assessment_id}")


# -- to_rdf -------------------------------------------------------------------


def _a(kind: str) -> Iri:
    return Iri(ns.AIDA + kind)


def to_rdf(case: CaseRecord) -> list[Triple]:
    """Emit the case document triples; the record must pass `validate`."""
    case.validate()
    triples: list[Triple] = []
    c = case.iri
    add = triples.append

    add(Triple(c, _TYPE, _a("LegalDentalMedicalExamData")))
    add(Triple(c, _a("caseIdentifier"), Literal(case.case_id)))
    add(Triple(c, _a("requestingEntity"), Literal(case.requesting_entity)))
    add(Triple(c, _a("examinationDate"), date_literal(case.examination_date)))

    expert = mint_iri("case", f"{case.case_id}/expert")
    role = mint_iri("case", f"{case.case_id}/expert/role")
    add(Triple(c, _a("hasForensicExpert"), expert))
    add(Triple(expert, _TYPE, _a("ForensicExpertPerson")))
    add(Triple(expert, Iri(ns.FOAF + "name"), Literal(case.expert.name)))
    add(Triple(expert, _a("hasForensicRole"), role))
    add(Triple(role, _TYPE, _a("ForensicExpertRole")))
    add(Triple(role, _a("roleLabel"), Literal(case.expert.role_label)))

    individual = mint_iri("case", f"{case.case_id}/individual")
    add(Triple(c, _a("concernsIndividual"), individual))
    add(Triple(individual, _TYPE, _a("ForensicIndividualCasePerson")))
    if case.individual.reported_age is not None:
        add(Triple(individual, _a("reportedAge"), years_literal(case.individual.reported_age)))
    add(Triple(individual, _a("biologicalSex"), Literal(case.individual.biological_sex)))
    for ident in case.individual.identifiers:
        add(Triple(individual, _a("personIdentifier"), Literal(ident)))

    opg = mint_iri("opg", case.opg.image_id)
    add(Triple(c, _a("hasOPG"), opg))
    add(Triple(opg, _TYPE, _a("OPG")))
    add(Triple(opg, _a("imageIdentifier"), Literal(case.opg.image_id)))
    add(Triple(opg, _a("acquisitionDate"), date_literal(case.opg.acquisition_date)))
    if case.opg.storage_ref is not None:
        add(Triple(opg, _a("storageReference"), Literal(case.opg.storage_ref)))

    teeth_set = mint_iri("opg", f"{case.opg.image_id}/teeth")
    add(Triple(opg, _a("hasTeethSet"), teeth_set))
    add(Triple(teeth_set, _TYPE, _a("TeethSet")))
    add(Triple(teeth_set, _a("derivedFromOPG"), opg))

    for tooth in case.teeth:
        node = mint_iri("opg", f"{case.opg.image_id}/teeth/{tooth.fdi}")
        add(Triple(teeth_set, _a("hasTooth"), node))
        kind = "PermanentTooth" if is_permanent(tooth.fdi) else "DeciduousTooth"
        add(Triple(node, _TYPE, _a(kind)))
        codes = all_codes(tooth.fdi)
        add(Triple(node, _a("fdiCode"), Literal(codes["fdi"])))
        add(Triple(node, _a("unsCode"), Literal(codes["uns"])))
        add(Triple(node, _a("palmerCode"), Literal(codes["palmer"])))
        if "haderup" in codes:
            add(Triple(node, _a("haderupCode"), Literal(codes["haderup"])))
        if tooth.treatment is not None:
            treatment = mint_iri("opg", f"{case.opg.image_id}/teeth/{tooth.fdi}/treatment")
            add(Triple(node, _a("hasTreatmentOption"), treatment))
            add(Triple(treatment, _TYPE, _a("TreatmentOption")))
            add(Triple(treatment, _a("treatmentLabel"), Literal(tooth.treatment.label)))
            if tooth.treatment.note is not None:
                add(Triple(treatment, _a("treatmentNote"), Literal(tooth.treatment.note)))
        if tooth.stage is not None:
            stage = mint_iri("opg", f"{case.opg.image_id}/teeth/{tooth.fdi}/stage")
            add(Triple(node, _a("hasToothStage"), stage))
            add(Triple(stage, _TYPE, _a("ToothStage")))
            add(Triple(stage, _a("stageLabel"), Literal(tooth.stage.stage_label)))
            add(Triple(stage, _a("assignedByMethod"), mint_iri("method", tooth.stage.method_id)))

    for assessment in case.assessments:
        triples.extend(_manual_assessment_triples(case, assessment, teeth_set))
    for assessment in case.ai_assessments:
        triples.extend(_ai_assessment_triples(case, assessment))

    if case.report is not None:
        report = mint_iri("case", f"{case.case_id}/report")
        add(Triple(c, _a("hasReportData"), report))
        add(Triple(report, _TYPE, _a("ReportData")))
        add(Triple(report, _a("meanAge"), years_literal(case.report.mean_age)))
        add(Triple(report, _a("standardDev"), years_literal(case.report.standard_dev)))
        add(Triple(report, _a("ageRangeText"), Literal(case.report.age_range_text)))
        add(Triple(report, _a("conclusionText"), Literal(case.report.conclusion)))
        add(Triple(report, _a("reportTimestamp"), datetime_literal(case.report.timestamp)))
        for assessment in case.assessments:
            add(Triple(report, _a("reportsAssessment"), case.assessment_iri(assessment.assessment_id)))
        for assessment in case.ai_assessments:
            add(Triple(report, _a("reportsAssessment"), case.assessment_iri(assessment.assessment_id)))

    for s, p, o in case.annotations:
        add(Triple(s, p, o))
    return triples


def _manual_assessment_triples(
    case: CaseRecord, assessment: ManualAssessment, teeth_set: Iri
) -> list[Triple]:
    node = case.assessment_iri(assessment.assessment_id)
    triples = [
        Triple(node, _TYPE, _a("DentalAgeAssessment")),
        Triple(node, _a("assessesCase"), case.iri),
        Triple(node, _a("basedOnTeethSet"), teeth_set),
        Triple(node, _a("usesScoringMethod"), mint_iri("method", assessment.method_id)),
        Triple(node, _a("appliesReferenceStudy"), mint_iri("study", assessment.study_id)),
        Triple(node, _a("maturityScoreValue"), years_literal(assessment.score)),
        Triple(node, _a("meanAge"), years_literal(assessment.result.mean_age)),
        Triple(node, _a("standardDev"), years_literal(assessment.result.standard_dev)),
        Triple(node, _a("minimumProbableAge"), years_literal(assessment.result.min_age)),
        Triple(node, _a("maximumProbableAge"), years_literal(assessment.result.max_age)),
        Triple(node, _a("intervalMultiplier"), years_literal(assessment.k)),
        Triple(node, _a("clampWarning"), bool_literal(assessment.clamped)),
        Triple(node, _a("assessmentTimestamp"), datetime_literal(assessment.timestamp)),
    ]
    if assessment.classification is not None:
        triples.extend(_classification_triples(node, assessment.classification))
    return triples


def _classification_triples(node: Iri, cls: ThresholdClassification) -> list[Triple]:
    verdict = Iri(node.value + "/verdict")
    threshold = Iri(node.value + "/threshold")
    return [
        Triple(node, _a("hasThresholdClassification"), verdict),
        Triple(verdict, _TYPE, _a("ThresholdClassificationVerdict")),
        Triple(verdict, _a("probabilityAtOrAbove"), probability_literal(cls.probability_at_or_above)),
        Triple(verdict, _a("verdictLabel"), Literal(cls.verdict)),
        Triple(verdict, _a("appliesThreshold"), threshold),
        Triple(threshold, _TYPE, _a("LegalAgeThreshold")),
        Triple(threshold, _a("thresholdYears"), years_literal(cls.threshold)),
    ]


def _ai_assessment_triples(case: CaseRecord, assessment: AiAssessment) -> list[Triple]:
    node = case.assessment_iri(assessment.assessment_id)
    kind = "AIDentalAgeThresholdAssessment" if assessment.kind == "threshold" else "AIRegDentalAgeAssessment"
    triples = [
        Triple(node, _TYPE, _a(kind)),
        Triple(node, _a("assessesCase"), case.iri),
        Triple(node, _a("hasInferenceRun"), mint_iri("run", assessment.run_id)),
        Triple(node, _a("assessmentTimestamp"), datetime_literal(assessment.timestamp)),
    ]
    if assessment.kind == "threshold":
        triples.append(Triple(node, _a("thresholdYears"), years_literal(assessment.threshold)))
        triples.append(
            Triple(node, _a("probabilityAtOrAbove"), probability_literal(assessment.probability_at_or_above))
        )
    else:
        triples.append(Triple(node, _a("estimatedAgeValue"), years_literal(assessment.estimated_age)))
        if assessment.uncertainty is not None:
            triples.append(Triple(node, _a("uncertaintyValue"), years_literal(assessment.uncertainty)))
    return triples


# -- from_rdf ------------------------------------------------------------------


class _Reader:
    """Cursor over one case subgraph, tracking which triples were consumed."""

    def __init__(self, g: Graph) -> None:
        self.g = g
        self.consumed: set[Triple] = set()
        self.subjects: set[Term] = set()

    def one(self, s: Term, p: str, required: bool = False) -> Term | None:
        triples = self.g.match(s, _a(p))
        if not triples:
            if required:
                raise ValidationError(f"missing required property {p} on {s.n3()}")
            return None
        self.consumed.add(triples[0])
        return triples[0].object

    def many(self, s: Term, p: str) -> list[Term]:
        triples = self.g.match(s, _a(p))
        self.consumed.update(triples)
        return [t.object for t in triples]

    def foaf(self, s: Term, local: str) -> Term | None:
        triples = self.g.match(s, Iri(ns.FOAF + local))
        if not triples:
            return None
        self.consumed.add(triples[0])
        return triples[0].object

    def mark_types(self, s: Term) -> None:
        self.subjects.add(s)
        self.consumed.update(self.g.match(s, _TYPE))


def _text(term: Term | None) -> str | None:
    if term is None:
        return None
    if not isinstance(term, Literal):
        raise ValidationError(f"expected a literal, found {term.n3()}")
    return term.lexical


def _number(term: Term | None) -> float | None:
    text = _text(term)
    return None if text is None else float(text)


def _local_id(term: Term, kind: str) -> str:
    prefix = ns.AIDA + kind + "/"
    if isinstance(term, Iri) and term.value.startswith(prefix):
        return term.value[len(prefix):]
    raise ValidationError(f"expected a {kind} IRI, found {term.n3()}")


def case_types(g: Graph | ClosedGraph, iri: Iri) -> set[str]:
    target = g.graph if isinstance(g, ClosedGraph) else g
    return {
        t.object.value[len(ns.AIDA):]
        for t in target.match_iter(iri, _TYPE)
        if isinstance(t.object, Iri) and t.object.value.startswith(ns.AIDA)
    }


def from_rdf(g: Graph | ClosedGraph, iri: Iri) -> CaseRecord:
    """Reconstruct a case record; the graph may also hold schema triples."""
    base = g.base if isinstance(g, ClosedGraph) else g
    types = case_types(g, iri)
    if "LegalDentalMedicalExamData" not in types:
        raise NotFoundError(f"type not recognized for {iri.n3()}")

    r = _Reader(base)
    r.mark_types(iri)
    case_id = _text(r.one(iri, "caseIdentifier", required=True))
    requesting = _text(r.one(iri, "requestingEntity", required=True))
    exam_date = parse_date(_text(r.one(iri, "examinationDate", required=True)))

    expert_node = r.one(iri, "hasForensicExpert", required=True)
    r.mark_types(expert_node)
    name = _text(r.foaf(expert_node, "name")) or ""
    role_node = r.one(expert_node, "hasForensicRole")
    role_label = "forensic expert"
    if role_node is not None:
        r.mark_types(role_node)
        role_label = _text(r.one(role_node, "roleLabel")) or role_label
    expert = Expert(name=name, role_label=role_label)

    individual_node = r.one(iri, "concernsIndividual", required=True)
    r.mark_types(individual_node)
    individual = Individual(
        reported_age=_number(r.one(individual_node, "reportedAge")),
        biological_sex=_text(r.one(individual_node, "biologicalSex")) or "unknown",
        identifiers=tuple(sorted(_text(t) for t in r.many(individual_node, "personIdentifier"))),
    )

    opg_node = r.one(iri, "hasOPG", required=True)
    r.mark_types(opg_node)
    opg = Opg(
        image_id=_text(r.one(opg_node, "imageIdentifier", required=True)),
        acquisition_date=parse_date(_text(r.one(opg_node, "acquisitionDate", required=True))),
        storage_ref=_text(r.one(opg_node, "storageReference")),
    )

    teeth: list[ToothRecord] = []
    teeth_set = r.one(opg_node, "hasTeethSet")
    if teeth_set is not None:
        r.mark_types(teeth_set)
        r.one(teeth_set, "derivedFromOPG")
        for tooth_node in r.many(teeth_set, "hasTooth"):
            r.mark_types(tooth_node)
            fdi = _text(r.one(tooth_node, "fdiCode", required=True))
            for code_prop in ("unsCode", "palmerCode", "haderupCode"):
                r.one(tooth_node, code_prop)
            treatment = None
            treatment_node = r.one(tooth_node, "hasTreatmentOption")
            if treatment_node is not None:
                r.mark_types(treatment_node)
                treatment = Treatment(
                    label=_text(r.one(treatment_node, "treatmentLabel", required=True)),
                    note=_text(r.one(treatment_node, "treatmentNote")),
                )
            stage = None
            stage_node = r.one(tooth_node, "hasToothStage")
            if stage_node is not None:
                r.mark_types(stage_node)
                stage = ToothStageRecord(
                    stage_label=_text(r.one(stage_node, "stageLabel", required=True)),
                    method_id=_local_id(r.one(stage_node, "assignedByMethod", required=True), "method"),
                )
            teeth.append(ToothRecord(fdi=fdi, treatment=treatment, stage=stage))
    teeth.sort(key=lambda t: t.fdi)

    manual: list[ManualAssessment] = []
    ai: list[AiAssessment] = []
    prefix = iri.value + "/assessment/"
    for t in base.match(None, _a("assessesCase"), iri):
        node = t.subject
        r.consumed.add(t)
        node_types = case_types(base, node)
        assessment_id = node.value[len(prefix):] if isinstance(node, Iri) and node.value.startswith(prefix) else node.n3()
        r.mark_types(node)
        if "DentalAgeAssessment" in node_types:
            manual.append(_read_manual(r, node, assessment_id))
        elif "AIDentalAgeThresholdAssessment" in node_types or "AIRegDentalAgeAssessment" in node_types:
            ai.append(_read_ai(r, node, assessment_id))
    manual.sort(key=lambda a: a.assessment_id)
    ai.sort(key=lambda a: a.assessment_id)

    report = None
    report_node = r.one(iri, "hasReportData")
    if report_node is not None:
        r.mark_types(report_node)
        r.many(report_node, "reportsAssessment")
        report = ReportRecord(
            mean_age=_number(r.one(report_node, "meanAge", required=True)),
            standard_dev=_number(r.one(report_node, "standardDev", required=True)),
            age_range_text=_text(r.one(report_node, "ageRangeText", required=True)),
            conclusion=_text(r.one(report_node, "conclusionText", required=True)),
            timestamp=parse_datetime(_text(r.one(report_node, "reportTimestamp", required=True))),
        )

    annotations = tuple(
        (t.subject, t.predicate, t.object)
        for t in base
        if t.subject in r.subjects and t not in r.consumed
    )
    record = CaseRecord(
        case_id=case_id,
        requesting_entity=requesting,
        examination_date=exam_date,
        expert=expert,
        individual=individual,
        opg=opg,
        teeth=tuple(teeth),
        assessments=tuple(manual),
        ai_assessments=tuple(ai),
        report=report,
        annotations=annotations,
    )
    record.validate()
    return record


def _read_manual(r: _Reader, node: Term, assessment_id: str) -> ManualAssessment:
    r.one(node, "basedOnTeethSet")
    classification = None
    verdict_node = r.one(node, "hasThresholdClassification")
    if verdict_node is not None:
        r.mark_types(verdict_node)
        threshold_node = r.one(verdict_node, "appliesThreshold", required=True)
        r.mark_types(threshold_node)
        classification = ThresholdClassification(
            threshold=_number(r.one(threshold_node, "thresholdYears", required=True)),
            probability_at_or_above=_number(r.one(verdict_node, "probabilityAtOrAbove", required=True)),
            verdict=_text(r.one(verdict_node, "verdictLabel", required=True)),
        )
    return ManualAssessment(
        assessment_id=assessment_id,
        method_id=_local_id(r.one(node, "usesScoringMethod", required=True), "method"),
        study_id=_local_id(r.one(node, "appliesReferenceStudy", required=True), "study"),
        score=_number(r.one(node, "maturityScoreValue", required=True)),
        result=StudyResult(
            mean_age=_number(r.one(node, "meanAge", required=True)),
            standard_dev=_number(r.one(node, "standardDev", required=True)),
            min_age=_number(r.one(node, "minimumProbableAge", required=True)),
            max_age=_number(r.one(node, "maximumProbableAge", required=True)),
        ),
        k=_number(r.one(node, "intervalMultiplier", required=True)),
        clamped=_text(r.one(node, "clampWarning")) == "true",
        classification=classification,
        timestamp=parse_datetime(_text(r.one(node, "assessmentTimestamp", required=True))),
    )


def _read_ai(r: _Reader, node: Term, assessment_id: str) -> AiAssessment:
    node_types = case_types(r.g, node)
    kind = "threshold" if "AIDentalAgeThresholdAssessment" in node_types else "regression"
    return AiAssessment(
        assessment_id=assessment_id,
        kind=kind,
        run_id=_local_id(r.one(node, "hasInferenceRun", required=True), "run"),
        threshold=_number(r.one(node, "thresholdYears")),
        probability_at_or_above=_number(r.one(node, "probabilityAtOrAbove")),
        estimated_age=_number(r.one(node, "estimatedAgeValue")),
        uncertainty=_number(r.one(node, "uncertaintyValue")),
        timestamp=parse_datetime(_text(r.one(node, "assessmentTimestamp", required=True))),
    )


# -- schema loading -------------------------------------------------------------


def load_schema(path: str | Path) -> tuple[Graph, ValidationReport]:
    """Load the schema from a Turtle file or a directory of Turtle files."""
    p = Path(path)
    files = sorted(p.glob("*.ttl")) if p.is_dir() else [p]
    if not files:
        raise NotFoundError(f"no Turtle files under {p}")
    graph = Graph()
    for i, f in enumerate(files):
        g, _ = parse_turtle(f.read_text(encoding="utf-8"), bnode_prefix=f"s{i}_")
        graph.update(g.match_iter())
        graph.prefixes.update(g.prefixes)
    report = validate_schema(graph, ns.AIDA)
    return graph, report
