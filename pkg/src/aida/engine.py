"""Manual dental age assessment pipeline.

Stage assignment -> maturity score aggregation -> reference-study lookup ->
probable age interval -> legal-threshold classification -> report.  All
operations are pure given (case, method, study); the store layer owns
persistence and auditing.
"""

from __future__ import annotations

import datetime as dt
import math
from bisect import bisect_left
from dataclasses import replace

from aida.errors import NotFoundError, ValidationError
from aida.methods import ReferenceStudy, ScoringMethod
from aida.model import (
    AiAssessment,
    CaseRecord,
    ManualAssessment,
    ReportRecord,
    StudyResult,
    ThresholdClassification,
    ToothRecord,
    ToothStageRecord,
    format_years,
)

#: Half-width of the probability band around 0.5 treated as indeterminate.
DEFAULT_BAND = 0.2

#: Interval multiplier: mean +/- k*sd covers ~95% under the normal model.
DEFAULT_K = 2.0


def assign_stage(case: CaseRecord, fdi: str, stage_label: str, method: ScoringMethod) -> CaseRecord:
    """Record a developmental stage for one tooth; returns the updated case.

    Re-assignment overwrites the previous stage; the store writes the audit
    entry.  Teeth with a treatment option are refused: a treated tooth's
    development is not scoreable."""
    tooth = case.tooth(fdi)
    if tooth.treatment is not None:
        raise ValidationError(
            f"tooth {fdi} has treatment option {tooth.treatment.label!r}; "
            "stage assignment is not applicable"
        )
    if not method.permits(stage_label):
        raise ValidationError(
            f"stage {stage_label!r} not permissible for method {method.method_id} "
            f"(permissible: {', '.join(method.stages)})"
        )
    staged = ToothRecord(
        fdi=tooth.fdi,
        treatment=tooth.treatment,
        stage=ToothStageRecord(stage_label=stage_label, method_id=method.method_id),
    )
    return case.with_tooth(staged)


def maturity_score(case: CaseRecord, method: ScoringMethod, sex: str) -> float:
    """Aggregate per-tooth stage scores according to the method's rule."""
    missing = []
    contributions = []
    for fdi in method.required_teeth:
        try:
            tooth = case.tooth(fdi)
        except NotFoundError:
            missing.append(fdi)
            continue
        if tooth.stage is None:
            missing.append(fdi)
            continue
        contributions.append(method.score_for(fdi, tooth.stage.stage_label, sex))
    if missing:
        raise ValidationError(
            f"method {method.method_id} requires a stage on teeth: {', '.join(sorted(missing))}"
        )
    if method.aggregation == "sum":
        return math.fsum(contributions)
    if method.aggregation == "mean":
        return math.fsum(contributions) / len(contributions)
    raise ValidationError(f"aggregation {method.aggregation!r} has no built-in rule")


def _interpolate(x: float, x0: float, y0: float, x1: float, y1: float) -> float:
    if x1 == x0:
        return y0
    return y0 + (y1 - y0) * (x - x0) / (x1 - x0)


def estimate_age(score: float, study: ReferenceStudy, k: float = DEFAULT_K) -> tuple[StudyResult, bool]:
    """Monotone piecewise-linear lookup of (mean, sd) plus the k*sd interval.

    Scores outside the table clamp to its ends; the returned flag marks the
    clamp so reports can carry the warning.  Studies with explicit per-row
    age bounds use those instead of the k rule."""
    study.validate()
    if k < 0:
        raise ValidationError("interval multiplier k must be non-negative")
    rows = study.rows
    clamped = False
    if score <= rows[0].score:
        clamped = score < rows[0].score
        row = rows[0]
        mean, sd = row.mean, row.sd
        bounds = (row.min_age, row.max_age) if study.has_explicit_bounds else None
    elif score >= rows[-1].score:
        clamped = score > rows[-1].score
        row = rows[-1]
        mean, sd = row.mean, row.sd
        bounds = (row.min_age, row.max_age) if study.has_explicit_bounds else None
    else:
        idx = bisect_left([r.score for r in rows], score)
        lo, hi = rows[idx - 1], rows[idx]
        if rows[idx].score == score:
            lo = hi = rows[idx]
        mean = _interpolate(score, lo.score, lo.mean, hi.score, hi.mean)
        sd = _interpolate(score, lo.score, lo.sd, hi.score, hi.sd)
        if study.has_explicit_bounds:
            bounds = (
                _interpolate(score, lo.score, lo.min_age, hi.score, hi.min_age),
                _interpolate(score, lo.score, lo.max_age, hi.score, hi.max_age),
            )
        else:
            bounds = None
    if bounds is None:
        bounds = (mean - k * sd, mean + k * sd)
    result = StudyResult(mean_age=mean, standard_dev=sd, min_age=bounds[0], max_age=bounds[1])
    result.validate()
    return result, clamped


def normal_cdf(z: float) -> float:
    return 0.5 * (1.0 + math.erf(z / math.sqrt(2.0)))


def probability_at_or_above(mean: float, sd: float, threshold: float) -> float:
    """P(age >= threshold) under the normal completion of (mean, sd)."""
    if sd <= 0:
        return 1.0 if mean >= threshold else 0.0
    return 1.0 - normal_cdf((threshold - mean) / sd)


def verdict_for(probability: float, band: float = DEFAULT_BAND) -> str:
    if probability > 0.5 + band:
        return "above"
    if probability < 0.5 - band:
        return "below"
    return "indeterminate"


def classify_threshold(
    result: StudyResult, threshold: float, band: float = DEFAULT_BAND
) -> ThresholdClassification:
    p = probability_at_or_above(result.mean_age, result.standard_dev, threshold)
    cls = ThresholdClassification(
        threshold=threshold, probability_at_or_above=p, verdict=verdict_for(p, band)
    )
    cls.validate()
    return cls


def assess(
    case: CaseRecord,
    method: ScoringMethod,
    study: ReferenceStudy,
    assessment_id: str,
    sex: str | None = None,
    k: float = DEFAULT_K,
    threshold: float | None = None,
    band: float = DEFAULT_BAND,
    clock: dt.datetime | None = None,
) -> ManualAssessment:
    """Full pipeline for one case against one method and one study."""
    sex_used = sex or case.individual.biological_sex
    score = maturity_score(case, method, sex_used)
    result, clamped = estimate_age(score, study, k)
    classification = None if threshold is None else classify_threshold(result, threshold, band)
    timestamp = clock or dt.datetime.now(dt.timezone.utc).replace(microsecond=0)
    return ManualAssessment(
        assessment_id=assessment_id,
        method_id=method.method_id,
        study_id=study.study_id,
        score=score,
        result=result,
        k=k,
        clamped=clamped,
        classification=classification,
        timestamp=timestamp,
    )


# -- reporting -------------------------------------------------------------------


def age_range_text(result: StudyResult) -> str:
    return f"[{format_years(result.min_age)}, {format_years(result.max_age)}]"


def _conclusion(assessment: ManualAssessment) -> str:
    parts = [
        f"Estimated dental age {format_years(assessment.result.mean_age)} years "
        f"(standard deviation {format_years(assessment.result.standard_dev)}); "
        f"probable age interval {age_range_text(assessment.result)} years "
        f"(k = {format_years(assessment.k)})."
    ]
    if assessment.classification is not None:
        cls = assessment.classification
        parts.append(
            f"Probability of age at or above {format_years(cls.threshold)} years: "
            f"{cls.probability_at_or_above:.3f} (verdict: {cls.verdict}); "
            "normal distribution assumed."
        )
    if assessment.clamped:
        parts.append("Warning: maturity score fell outside the reference table and was clamped.")
    return " ".join(parts)


def generate_report(case: CaseRecord, clock: dt.datetime | None = None) -> ReportRecord:
    """Report data for a case; requires at least one manual assessment."""
    if not case.assessments:
        raise ValidationError(f"case {case.case_id} has no assessment with a result")
    primary = case.assessments[-1]
    timestamp = clock or primary.timestamp
    return ReportRecord(
        mean_age=primary.result.mean_age,
        standard_dev=primary.result.standard_dev,
        age_range_text=age_range_text(primary.result),
        conclusion=_conclusion(primary),
        timestamp=timestamp,
    )


def attach_report(case: CaseRecord, clock: dt.datetime | None = None) -> CaseRecord:
    return replace(case, report=generate_report(case, clock))


def render_report_text(case: CaseRecord) -> str:
    """Deterministic plain-text report for the case."""
    if case.report is None:
        raise ValidationError(f"case {case.case_id} has no generated report")
    lines = [
        "DENTAL AGE ASSESSMENT REPORT",
        f"case: {case.case_id}",
        f"requesting entity: {case.requesting_entity}",
        f"examination date: {case.examination_date.isoformat()}",
        f"forensic expert: {case.expert.name} ({case.expert.role_label})",
        f"individual: biological sex {case.individual.biological_sex}"
        + (
            f", reported age {format_years(case.individual.reported_age)}"
            if case.individual.reported_age is not None
            else ""
        ),
        f"orthopantomography: {case.opg.image_id} ({case.opg.acquisition_date.isoformat()})",
        "",
        "MANUAL ASSESSMENTS",
    ]
    for a in case.assessments:
        lines.append(
            f"- {a.assessment_id}: method {a.method_id}, study {a.study_id}, "
            f"maturity score {format_years(a.score)}"
        )
        lines.append(
            f"  mean age {format_years(a.result.mean_age)} years, "
            f"standard deviation {format_years(a.result.standard_dev)} years, "
            f"interval {age_range_text(a.result)} years (k = {format_years(a.k)})"
        )
        if a.classification is not None:
            lines.append(
                f"  threshold {format_years(a.classification.threshold)} years: "
                f"probability at or above {a.classification.probability_at_or_above:.3f}, "
                f"verdict {a.classification.verdict} (normal distribution assumed)"
            )
        if a.clamped:
            lines.append("  warning: maturity score clamped to the reference table range")
    if case.ai_assessments:
        lines.append("")
        lines.append("AI ASSESSMENTS")
        for a in case.ai_assessments:
            if a.kind == "threshold":
                lines.append(
                    f"- {a.assessment_id}: threshold model (run {a.run_id}), "
                    f"threshold {format_years(a.threshold)} years, "
                    f"probability at or above {a.probability_at_or_above:.3f}"
                )
            else:
                uncertainty = (
                    f" +/- {format_years(a.uncertainty)}" if a.uncertainty is not None else ""
                )
                lines.append(
                    f"- {a.assessment_id}: regression model (run {a.run_id}), "
                    f"estimated age {format_years(a.estimated_age)}{uncertainty} years"
                )
    lines.append("")
    lines.append(f"conclusion: {case.report.conclusion}")
    lines.append(f"generated: {case.report.timestamp.strftime('%Y-%m-%dT%H:%M:%SZ')}")
    return "\n".join(lines) + "\n"


def ai_verdict(assessment: AiAssessment, band: float = DEFAULT_BAND) -> str | None:
    if assessment.kind != "threshold" or assessment.probability_at_or_above is None:
        return None
    return verdict_for(assessment.probability_at_or_above, band)
