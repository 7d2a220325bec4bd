import datetime as dt
import math
import random

import pytest

from aida import engine
from aida.errors import ValidationError, NotFoundError
from aida.methods import ReferenceStudy, ScoringMethod, StudyRow, load_method, load_study
from aida.model import CaseRecord, Expert, Individual, Opg, StudyResult, ToothRecord, Treatment
from tests.oracles import normal_tail_quad, straight_line_pipeline

CLOCK = dt.datetime(2025, 11, 20, 10, 0, tzinfo=dt.timezone.utc)


def fixture_method(score: float = 10.0) -> ScoringMethod:
    teeth = ("31", "32", "33", "34", "35", "36", "37")
    stages = ("A", "B", "C", "D", "E", "F", "G", "H")
    table = {t: {s: score + i for i, s in enumerate(stages)} for t in teeth}
    # stage E sits at index 4; score offsets keep the map monotone in stage order
    return ScoringMethod(
        method_id="fixture",
        name="fixture",
        stages=stages,
        required_teeth=teeth,
        aggregation="sum",
        scores={"any": table},
    )


def uniform_method() -> ScoringMethod:
    teeth = ("31", "32", "33", "34", "35", "36", "37")
    stages = ("A", "B", "C", "D", "E", "F", "G", "H")
    return ScoringMethod(
        method_id="uniform",
        name="uniform",
        stages=stages,
        required_teeth=teeth,
        aggregation="sum",
        scores={"any": {t: {s: 10.0 for s in stages} for t in teeth}},
    )


def fixture_study() -> ReferenceStudy:
    return ReferenceStudy(
        study_id="fixture-study",
        population="test",
        sex="any",
        rows=(
            StudyRow(50.0, 14.5, 1.0),
            StudyRow(60.0, 16.0, 1.1),
            StudyRow(70.0, 17.2, 1.3),
            StudyRow(80.0, 18.9, 1.45),
        ),
    )


def bare_case(teeth=()) -> CaseRecord:
    return CaseRecord(
        case_id="c-1",
        requesting_entity="Court",
        examination_date=dt.date(2025, 11, 20),
        expert=Expert("E"),
        individual=Individual(biological_sex="male"),
        opg=Opg("img", dt.date(2025, 11, 12)),
        teeth=tuple(teeth),
    )


def staged_case(method: ScoringMethod, stage: str = "E") -> CaseRecord:
    case = bare_case(ToothRecord(fdi=f) for f in method.required_teeth)
    for fdi in method.required_teeth:
        case = engine.assign_stage(case, fdi, stage, method)
    return case


class TestAssignStage:
    def test_demirjian_stage_e_accepted(self, shipped_kb):
        method = load_method(shipped_kb / "methods" / "demirjian-1973.json")
        case = bare_case([ToothRecord(fdi="37")])
        updated = engine.assign_stage(case, "37", "E", method)
        assert updated.tooth("37").stage.stage_label == "E"
        assert updated.tooth("37").stage.method_id == "demirjian-1973"

    def test_impermissible_stage_rejected(self, shipped_kb):
        method = load_method(shipped_kb / "methods" / "demirjian-1973.json")
        case = bare_case([ToothRecord(fdi="37")])
        with pytest.raises(ValidationError) as err:
            engine.assign_stage(case, "37", "Z", method)
        assert "not permissible" in str(err.value)

    def test_treated_tooth_rejected_with_explanation(self):
        method = uniform_method()
        case = bare_case([ToothRecord(fdi="31", treatment=Treatment("extracted"))])
        with pytest.raises(ValidationError) as err:
            engine.assign_stage(case, "31", "E", method)
        assert "extracted" in str(err.value)

    def test_unknown_tooth(self):
        with pytest.raises(NotFoundError):
            engine.assign_stage(bare_case(), "31", "E", uniform_method())

    def test_reassignment_overwrites(self):
        method = uniform_method()
        case = bare_case([ToothRecord(fdi="31")])
        case = engine.assign_stage(case, "31", "D", method)
        case = engine.assign_stage(case, "31", "E", method)
        assert case.tooth("31").stage.stage_label == "E"


class TestMaturityScore:
    def test_seven_teeth_at_ten_sum_to_seventy(self):
        case = staged_case(uniform_method())
        assert engine.maturity_score(case, uniform_method(), "male") == 70.0

    def test_singleton_method(self):
        method = ScoringMethod(
            method_id="single",
            name="single",
            stages=("A",),
            required_teeth=("31",),
            aggregation="sum",
            scores={"any": {"31": {"A": 3.5}}},
        )
        case = engine.assign_stage(bare_case([ToothRecord(fdi="31")]), "31", "A", method)
        assert engine.maturity_score(case, method, "female") == 3.5

    def test_permutation_invariance(self):
        method = fixture_method()
        case = staged_case(method)
        shuffled = bare_case(reversed(case.teeth))
        assert engine.maturity_score(case, method, "male") == engine.maturity_score(
            shuffled, method, "male"
        )

    def test_missing_stages_listed(self):
        method = uniform_method()
        case = bare_case([ToothRecord(fdi=f) for f in method.required_teeth])
        case = engine.assign_stage(case, "31", "E", method)
        with pytest.raises(ValidationError) as err:
            engine.maturity_score(case, method, "male")
        message = str(err.value)
        for fdi in ("32", "33", "34", "35", "36", "37"):
            assert fdi in message
        assert "31" not in message.split(":")[-1]

    def test_sex_specific_table(self):
        stages = ("A",)
        method = ScoringMethod(
            method_id="sexed",
            name="sexed",
            stages=stages,
            required_teeth=("31",),
            aggregation="sum",
            scores={"female": {"31": {"A": 1.0}}, "male": {"31": {"A": 2.0}}},
        )
        case = engine.assign_stage(bare_case([ToothRecord(fdi="31")]), "31", "A", method)
        assert engine.maturity_score(case, method, "female") == 1.0
        assert engine.maturity_score(case, method, "male") == 2.0

    def test_mean_aggregation(self):
        method = ScoringMethod(
            method_id="avg",
            name="avg",
            stages=("A",),
            required_teeth=("31", "32"),
            aggregation="mean",
            scores={"any": {"31": {"A": 2.0}, "32": {"A": 4.0}}},
        )
        case = bare_case([ToothRecord(fdi="31"), ToothRecord(fdi="32")])
        case = engine.assign_stage(case, "31", "A", method)
        case = engine.assign_stage(case, "32", "A", method)
        assert engine.maturity_score(case, method, "male") == 3.0

    def test_monotone_in_single_stage_upgrade(self):
        method = fixture_method()
        lower = staged_case(method, stage="D")
        higher = engine.assign_stage(lower, "34", "E", method)
        assert engine.maturity_score(higher, method, "male") > engine.maturity_score(
            lower, method, "male"
        )


class TestEstimateAge:
    def test_exact_knot(self):
        result, clamped = engine.estimate_age(70.0, fixture_study(), k=2.0)
        assert (result.mean_age, result.standard_dev) == (17.2, 1.3)
        assert not clamped

    def test_k_interval(self):
        result, _ = engine.estimate_age(70.0, fixture_study(), k=2.0)
        assert result.min_age == pytest.approx(14.6, abs=1e-12)
        assert result.max_age == pytest.approx(19.8, abs=1e-12)

    def test_linear_midpoint(self):
        result, _ = engine.estimate_age(65.0, fixture_study(), k=2.0)
        assert result.mean_age == pytest.approx(16.6, abs=1e-12)

    def test_clamp_below_with_warning(self):
        result, clamped = engine.estimate_age(10.0, fixture_study())
        assert clamped
        assert result.mean_age == 14.5

    def test_clamp_above_with_warning(self):
        result, clamped = engine.estimate_age(999.0, fixture_study())
        assert clamped
        assert result.mean_age == 18.9

    def test_empty_table_rejected(self):
        study = ReferenceStudy(study_id="empty", population="", sex="any", rows=())
        with pytest.raises(ValidationError):
            engine.estimate_age(50.0, study)

    def test_explicit_bounds_override_k_rule(self):
        study = ReferenceStudy(
            study_id="explicit",
            population="",
            sex="any",
            rows=(StudyRow(10.0, 14.0, 1.0, 12.0, 16.5), StudyRow(20.0, 15.0, 1.0, 13.0, 17.5)),
        )
        result, _ = engine.estimate_age(15.0, study, k=2.0)
        assert result.min_age == pytest.approx(12.5)
        assert result.max_age == pytest.approx(17.0)

    def test_interpolation_monotone_in_score(self):
        study = fixture_study()
        means = [engine.estimate_age(s, study)[0].mean_age for s in range(50, 81)]
        assert all(b >= a for a, b in zip(means, means[1:]))

    def test_min_mean_max_invariant_for_all_k(self):
        for k in (0.0, 0.5, 1.0, 2.0, 3.0):
            result, _ = engine.estimate_age(63.0, fixture_study(), k=k)
            assert result.min_age <= result.mean_age <= result.max_age

    def test_negative_k_rejected(self):
        with pytest.raises(ValidationError):
            engine.estimate_age(70.0, fixture_study(), k=-1.0)


class TestClassifyThreshold:
    def fixture_result(self) -> StudyResult:
        return StudyResult(mean_age=17.2, standard_dev=1.3, min_age=14.6, max_age=19.8)

    def test_demo_probability_against_quadrature(self):
        cls = engine.classify_threshold(self.fixture_result(), 18.0)
        expected = normal_tail_quad(17.2, 1.3, 18.0)
        assert cls.probability_at_or_above == pytest.approx(expected, abs=1e-6)
        assert cls.probability_at_or_above == pytest.approx(0.269, abs=5e-4)
        assert cls.verdict == "below"

    def test_threshold_at_mean_is_half(self):
        cls = engine.classify_threshold(self.fixture_result(), 17.2)
        assert cls.probability_at_or_above == pytest.approx(0.5, abs=1e-12)
        assert cls.verdict == "indeterminate"

    def test_degenerate_sd(self):
        result = StudyResult(mean_age=19.0, standard_dev=0.0, min_age=19.0, max_age=19.0)
        cls = engine.classify_threshold(result, 18.0)
        assert cls.probability_at_or_above == 1.0
        assert cls.verdict == "above"
        below = engine.classify_threshold(result, 20.0)
        assert below.probability_at_or_above == 0.0
        assert below.verdict == "below"

    def test_probability_strictly_decreasing_in_threshold(self):
        result = self.fixture_result()
        probs = [
            engine.classify_threshold(result, t).probability_at_or_above
            for t in (14.0, 16.0, 17.2, 18.0, 20.0, 25.0)
        ]
        assert all(b < a for a, b in zip(probs, probs[1:]))

    def test_band_rule(self):
        assert engine.verdict_for(0.73) == "above"
        assert engine.verdict_for(0.269) == "below"
        assert engine.verdict_for(0.5) == "indeterminate"
        assert engine.verdict_for(0.69) == "indeterminate"
        assert engine.verdict_for(0.95, band=0.4) == "above"


class TestPipelineOracle:
    @pytest.mark.parametrize("seed", range(10))
    def test_full_pipeline_matches_straight_line_recompute(self, seed):
        rng = random.Random(seed)
        stages = ("A", "B", "C", "D", "E", "F", "G", "H")
        teeth = ("31", "32", "33", "34", "35", "36", "37")
        table = {
            t: {s: round(rng.uniform(0.5, 12.0), 2) for s in stages} for t in teeth
        }
        method = ScoringMethod(
            method_id="rand",
            name="rand",
            stages=stages,
            required_teeth=teeth,
            aggregation="sum",
            scores={"any": table},
        )
        case = bare_case(ToothRecord(fdi=f) for f in teeth)
        picks = {}
        for fdi in teeth:
            stage = rng.choice(stages)
            picks[fdi] = stage
            case = engine.assign_stage(case, fdi, stage, method)

        base = sorted(round(rng.uniform(20.0, 90.0), 1) for _ in range(4))
        while len(set(base)) < 4:
            base = sorted(round(rng.uniform(20.0, 90.0), 1) for _ in range(4))
        study_rows = tuple(
            StudyRow(score=s, mean=12.0 + i * 2.1, sd=0.8 + 0.1 * i) for i, s in enumerate(base)
        )
        study = ReferenceStudy(study_id="rand-study", population="", sex="any", rows=study_rows)
        k = rng.choice((1.0, 1.5, 2.0))
        threshold = rng.uniform(13.0, 21.0)

        assessment = engine.assess(
            case, method, study, assessment_id="m-1", k=k, threshold=threshold, clock=CLOCK
        )

        stage_scores = [table[f][picks[f]] for f in teeth]
        score = math.fsum(stage_scores)
        total, mean, sd, low, high, probability = straight_line_pipeline(
            stage_scores,
            [(r.score, r.mean, r.sd) for r in study_rows],
            score,
            k,
            threshold,
        )
        assert assessment.score == pytest.approx(total, abs=1e-9)
        assert assessment.result.mean_age == pytest.approx(mean, abs=1e-9)
        assert assessment.result.standard_dev == pytest.approx(sd, abs=1e-9)
        assert assessment.result.min_age == pytest.approx(low, abs=1e-9)
        assert assessment.result.max_age == pytest.approx(high, abs=1e-9)
        assert assessment.classification.probability_at_or_above == pytest.approx(
            probability, abs=1e-6
        )
        assert assessment.result.min_age <= assessment.result.mean_age <= assessment.result.max_age


class TestReport:
    def demo_assessed_case(self, shipped_kb) -> CaseRecord:
        method = load_method(shipped_kb / "methods" / "demirjian-1973.json")
        study = load_study(shipped_kb / "studies" / "demo-study.json")
        case = staged_case_from(method)
        assessment = engine.assess(
            case, method, study, assessment_id="m-1", k=2.0, threshold=18.0, clock=CLOCK
        )
        return case.with_assessment(assessment)

    def test_report_echoes_fixture_numbers(self, shipped_kb):
        case = self.demo_assessed_case(shipped_kb)
        report = engine.generate_report(case, clock=CLOCK)
        assert report.age_range_text == "[14.6, 19.8]"
        assert report.mean_age == 17.2
        assert report.standard_dev == 1.3

    def test_report_lists_manual_and_ai_sections(self, shipped_kb):
        from aida.model import AiAssessment

        case = self.demo_assessed_case(shipped_kb)
        case = case.with_ai_assessment(
            AiAssessment(
                assessment_id="ai-1",
                kind="threshold",
                run_id="run-0001",
                threshold=18.0,
                probability_at_or_above=0.73,
                timestamp=CLOCK,
            )
        )
        case = engine.attach_report(case, clock=CLOCK)
        text = engine.render_report_text(case)
        assert "MANUAL ASSESSMENTS" in text
        assert "AI ASSESSMENTS" in text
        assert "run run-0001" in text
        assert "[14.6, 19.8]" in text

    def test_render_is_deterministic(self, shipped_kb):
        case = engine.attach_report(self.demo_assessed_case(shipped_kb), clock=CLOCK)
        assert engine.render_report_text(case) == engine.render_report_text(case)

    def test_no_assessment_is_an_error(self):
        with pytest.raises(ValidationError):
            engine.generate_report(bare_case())

    def test_clamp_warning_propagates_into_report(self):
        method = uniform_method()
        case = staged_case(method, stage="A")  # uniform table: score 70 at any stage
        # study whose table starts above the score, forcing a clamp
        narrow = ReferenceStudy(
            study_id="narrow",
            population="",
            sex="any",
            rows=(StudyRow(80.0, 17.0, 1.0), StudyRow(90.0, 18.0, 1.0)),
        )
        assessment = engine.assess(case, method, narrow, assessment_id="m-1", clock=CLOCK)
        assert assessment.clamped
        case = case.with_assessment(assessment)
        text = engine.render_report_text(engine.attach_report(case, clock=CLOCK))
        assert "clamped" in text


def staged_case_from(method) -> CaseRecord:
    case = bare_case(ToothRecord(fdi=f) for f in method.required_teeth)
    for fdi in method.required_teeth:
        case = engine.assign_stage(case, fdi, "E", method)
    return case


class TestMethodStudyLoading:
    def test_shipped_method_loads(self, shipped_kb):
        method = load_method(shipped_kb / "methods" / "demirjian-1973.json")
        assert method.stages == ("A", "B", "C", "D", "E", "F", "G", "H")
        assert len(method.required_teeth) == 7

    def test_score_table_totality_enforced(self):
        with pytest.raises(ValidationError) as err:
            ScoringMethod(
                method_id="partial",
                name="partial",
                stages=("A", "B"),
                required_teeth=("31",),
                aggregation="sum",
                scores={"any": {"31": {"A": 1.0}}},
            ).validate()
        assert "misses stages B" in str(err.value)

    def test_unknown_aggregation_rejected(self):
        with pytest.raises(ValidationError):
            ScoringMethod(
                method_id="x", name="x", stages=("A",), required_teeth=(), aggregation="median"
            ).validate()

    def test_study_monotonicity_enforced(self):
        with pytest.raises(ValidationError):
            ReferenceStudy(
                study_id="bad",
                population="",
                sex="any",
                rows=(StudyRow(10.0, 15.0, 1.0), StudyRow(20.0, 14.0, 1.0)),
            ).validate()
        with pytest.raises(ValidationError):
            ReferenceStudy(
                study_id="bad2",
                population="",
                sex="any",
                rows=(StudyRow(10.0, 15.0, 1.0), StudyRow(10.0, 16.0, 1.0)),
            ).validate()

    def test_shipped_study_loads(self, shipped_kb):
        study = load_study(shipped_kb / "studies" / "demo-study.json")
        assert study.rows[2] == StudyRow(70.0, 17.2, 1.3)

    def test_csv_study(self, tmp_path):
        path = tmp_path / "csv-study.csv"
        path.write_text("score,mean,sd\n10,14.0,1.0\n20,15.0,1.1\n", encoding="utf-8")
        study = load_study(path)
        assert study.study_id == "csv-study"
        assert study.rows[1].mean == 15.0
