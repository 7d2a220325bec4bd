import datetime as dt

import pytest

from aida import namespaces as ns
from aida.ai import (
    DataCollection,
    InferenceRunRecord,
    ModelOutput,
    ModelRecord,
    compare_assessments,
    ingest_as_assessment,
    model_from_rdf,
    record_inference,
    register_model,
    run_from_rdf,
)
from aida.errors import NotFoundError, ValidationError
from aida.model import (
    AiAssessment,
    CaseRecord,
    Expert,
    Individual,
    ManualAssessment,
    Opg,
    StudyResult,
    ThresholdClassification,
    to_rdf,
)
from aida.rdf import Graph, Iri, Literal, Triple
from aida.sparql import evaluate, parse_query

CLOCK = dt.datetime(2025, 11, 20, 10, 0, tzinfo=dt.timezone.utc)


def demo_model(task: str = "classification") -> ModelRecord:
    return ModelRecord(
        model_id="demo-cnn",
        qualities=(("name", "demo-cnn"), ("task", task)),
        characteristics=(("epochs", "40"),),
    )


def demo_run(**overrides) -> InferenceRunRecord:
    base = dict(
        run_id="run-1",
        model_id="demo-cnn",
        collection=DataCollection("col-1", members=("img-1",), descriptor="demo"),
        outputs=(ModelOutput(opg_ref="img-1", threshold=18.0, probability_at_or_above=0.73),),
        timestamp=CLOCK,
    )
    base.update(overrides)
    return InferenceRunRecord(**base)


def demo_case() -> CaseRecord:
    return CaseRecord(
        case_id="c-1",
        requesting_entity="Court",
        examination_date=dt.date(2025, 11, 20),
        expert=Expert("E"),
        individual=Individual(),
        opg=Opg("img-1", dt.date(2025, 11, 12)),
    )


def manual_assessment() -> ManualAssessment:
    return ManualAssessment(
        assessment_id="m-1",
        method_id="demirjian-1973",
        study_id="demo-study",
        score=70.0,
        result=StudyResult(17.2, 1.3, 14.6, 19.8),
        k=2.0,
        classification=ThresholdClassification(18.0, 0.2691503745093613, "below"),
        timestamp=CLOCK,
    )


SAMPLE_QUERY = """
PREFIX aida: <https://aidentifyage.github.io/ontology/AIdentifyAGE#>
PREFIX dc:   <http://purl.org/dc/terms/>
PREFIX mls:  <http://www.w3.org/ns/mls#>
PREFIX rdfs: <http://www.w3.org/2000/01/rdf-schema#>

SELECT ?meanAge ?stdDev ?minAge ?maxAge ?modelName ?taskType
WHERE {
    ?assessment a aida:DentalAgeAssessment ;
        aida:standardDev ?stdDev ;
        aida:meanAge ?meanAge ;
        aida:minimumProbableAge ?minAge ;
        aida:maximumProbableAge ?maxAge .
    ?aiAssessment a/rdfs:subClassOf* aida:AIDentalAgeAssessment ;
        aida:hasInferenceRun ?inferenceRun .
    ?inferenceRun a aida:InferenceRun ;
             aida:hasModel ?model .
    ?model a mls:Model .
    ?model mls:hasQuality ?qTask .
    ?qTask dc:title ?title ;
           mls:hasValue ?taskType .
    FILTER(STR(?title) = "task")
    ?model mls:hasQuality ?qName .
    ?qName dc:title ?name ;
           mls:hasValue ?modelName .
    FILTER(STR(?name) = "name")
}
"""


def subclass_axioms() -> list[Triple]:
    sub = Iri(ns.RDFS_SUBCLASSOF)
    return [
        Triple(Iri(ns.AIDA + "AIDentalAgeThresholdAssessment"), sub, Iri(ns.AIDA + "AIDentalAgeAssessment")),
        Triple(Iri(ns.AIDA + "AIRegDentalAgeAssessment"), sub, Iri(ns.AIDA + "AIDentalAgeAssessment")),
    ]


class TestRegisterModel:
    def test_model_discoverable_via_quality_shape(self):
        model = demo_model()
        run = demo_run()
        case = demo_case().with_assessment(manual_assessment())
        case = case.with_ai_assessment(ingest_as_assessment(run, model.task, case, "ai-1"))
        g = Graph()
        g.update(register_model(model))
        g.update(record_inference(run, model.task))
        g.update(to_rdf(case))
        g.update(subclass_axioms())
        table = evaluate(parse_query(SAMPLE_QUERY), g)
        assert len(table.rows) == 1
        row = table.rows[0]
        assert row["taskType"].lexical == "classification"
        assert row["modelName"].lexical == "demo-cnn"
        assert row["meanAge"].lexical == "17.2"

    def test_model_without_task_quality_rejected(self):
        with pytest.raises(ValidationError):
            register_model(ModelRecord(model_id="x", qualities=(("name", "x"),)))

    def test_two_task_qualities_rejected(self):
        with pytest.raises(ValidationError):
            register_model(
                ModelRecord(
                    model_id="x",
                    qualities=(("task", "classification"), ("task", "regression")),
                )
            )

    def test_unknown_task_value_rejected(self):
        with pytest.raises(ValidationError):
            register_model(ModelRecord(model_id="x", qualities=(("task", "clustering"),)))

    def test_both_qualities_retrievable_by_title_filter(self):
        g = Graph()
        g.update(register_model(demo_model()))
        for title, expected in (("task", "classification"), ("name", "demo-cnn")):
            q = parse_query(
                f"PREFIX mls: <{ns.MLS}> PREFIX dc: <{ns.DC}>\n"
                "SELECT ?v WHERE { ?m mls:hasQuality ?q . ?q dc:title ?t ; mls:hasValue ?v . "
                f'FILTER(STR(?t) = "{title}") }}'
            )
            rows = evaluate(q, g).rows
            assert [r["v"].lexical for r in rows] == [expected]


class TestRecordInference:
    def test_triple_count_for_single_output_run(self):
        triples = record_inference(demo_run(), "classification")
        # run: type + id + timestamp + model + collection link = 5
        # collection: type + id + descriptor + 1 member = 4
        # output: link + type + image + threshold + probability = 5
        assert len(triples) == 14

    def test_zero_outputs_rejected(self):
        with pytest.raises(ValidationError):
            record_inference(demo_run(outputs=()), "classification")

    def test_output_outside_collection_rejected(self):
        run = demo_run(
            outputs=(ModelOutput(opg_ref="img-999", threshold=18.0, probability_at_or_above=0.5),)
        )
        with pytest.raises(ValidationError) as err:
            record_inference(run, "classification")
        assert "img-999" in str(err.value)

    def test_duplicate_members_rejected(self):
        run = demo_run(collection=DataCollection("col-1", members=("img-1", "img-1")))
        with pytest.raises(ValidationError):
            record_inference(run, "classification")

    def test_round_trip_through_graph(self):
        run = demo_run()
        g = Graph()
        g.update(record_inference(run, "classification"))
        back = run_from_rdf(g, "run-1")
        assert back == run
        g2 = Graph()
        g2.update(register_model(demo_model()))
        assert model_from_rdf(g2, "demo-cnn").qualities == tuple(sorted(demo_model().qualities))


class TestIngest:
    def test_classification_yields_threshold_subclass(self):
        model = demo_model()
        case = demo_case()
        assessment = ingest_as_assessment(demo_run(), model.task, case, "ai-1")
        assert assessment.kind == "threshold"
        g = Graph()
        g.update(to_rdf(case.with_ai_assessment(assessment)))
        g.update(subclass_axioms())
        q = parse_query(
            f"PREFIX aida: <{ns.AIDA}> PREFIX rdfs: <{ns.RDFS}>\n"
            "SELECT ?x WHERE { ?x a/rdfs:subClassOf* aida:AIDentalAgeAssessment . }"
        )
        assert len(evaluate(q, g).rows) == 1

    def test_regression_yields_regression_subclass(self):
        model = demo_model(task="regression")
        run = demo_run(outputs=(ModelOutput(opg_ref="img-1", estimated_age=17.8),))
        assessment = ingest_as_assessment(run, model.task, demo_case(), "ai-1")
        assert assessment.kind == "regression"
        assert assessment.estimated_age == 17.8
        g = Graph()
        g.update(to_rdf(demo_case().with_ai_assessment(assessment)))
        types = {t.object.value for t in g.match_iter(None, Iri(ns.RDF_TYPE), None)}
        assert ns.AIDA + "AIRegDentalAgeAssessment" in types

    def test_run_without_output_for_case_image_rejected(self):
        run = demo_run(
            collection=DataCollection("col-1", members=("img-2",)),
            outputs=(ModelOutput(opg_ref="img-2", threshold=18.0, probability_at_or_above=0.5),),
        )
        with pytest.raises(NotFoundError):
            ingest_as_assessment(run, "classification", demo_case(), "ai-1")

    def test_provenance_complete_by_graph_traversal(self):
        model = demo_model()
        run = demo_run()
        case = demo_case()
        assessment = ingest_as_assessment(run, model.task, case, "ai-1")
        g = Graph()
        g.update(register_model(model))
        g.update(record_inference(run, model.task))
        g.update(to_rdf(case.with_ai_assessment(assessment)))
        # walk: assessment -> run -> model -> name/task; run -> timestamp, collection
        a_node = case.assessment_iri("ai-1")
        run_node = g.value(a_node, Iri(ns.AIDA + "hasInferenceRun"))
        assert run_node is not None
        model_node = g.value(run_node, Iri(ns.AIDA + "hasModel"))
        collection_node = g.value(run_node, Iri(ns.AIDA + "hasDataCollection"))
        timestamp = g.value(run_node, Iri(ns.AIDA + "runTimestamp"))
        assert model_node is not None and collection_node is not None and timestamp is not None
        titles = {
            g.value(t.object, Iri(ns.DC_TITLE)).lexical
            for t in g.match_iter(model_node, Iri(ns.MLS + "hasQuality"), None)
        }
        assert titles == {"name", "task"}


class TestCompare:
    def test_regression_difference(self):
        ai = AiAssessment(
            assessment_id="ai-1", kind="regression", run_id="r", estimated_age=17.8, timestamp=CLOCK
        )
        d = compare_assessments(manual_assessment(), ai, "c-1", "c-1")
        assert d.age_difference == pytest.approx(0.6, abs=1e-9)
        assert "+0.6" in d.summary()

    def test_threshold_disagreement_flagged(self):
        ai = AiAssessment(
            assessment_id="ai-1",
            kind="threshold",
            run_id="r",
            threshold=18.0,
            probability_at_or_above=0.73,
            timestamp=CLOCK,
        )
        d = compare_assessments(manual_assessment(), ai, "c-1", "c-1")
        assert d.manual_verdict == "below" and d.ai_verdict == "above"
        assert d.agree is False

    def test_identical_assessments_zero_discrepancy(self):
        ai = AiAssessment(
            assessment_id="ai-1",
            kind="regression",
            run_id="r",
            estimated_age=17.2,
            timestamp=CLOCK,
        )
        d = compare_assessments(manual_assessment(), ai, "c-1", "c-1")
        assert d.age_difference == pytest.approx(0.0, abs=1e-12)

    def test_case_mismatch_rejected(self):
        ai = AiAssessment(
            assessment_id="ai-1", kind="regression", run_id="r", estimated_age=17.8, timestamp=CLOCK
        )
        with pytest.raises(ValidationError):
            compare_assessments(manual_assessment(), ai, "c-1", "c-2")
