"""Scoring methods and reference studies.

Both are data-driven: method definitions are JSON files (stage list,
per-sex per-tooth stage-to-score table, aggregation rule, required teeth)
and reference studies are JSON or CSV score-to-age tables.  Shipped tables
are demonstration data; published coefficient tables drop in without code
changes.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path

from aida import namespaces as ns
from aida.errors import NotFoundError, ValidationError
from aida.notation import is_valid_fdi
from aida.rdf.terms import Iri, Literal, Triple
from aida.model import mint_iri, years_literal

_TYPE = Iri(ns.RDF_TYPE)

AGGREGATIONS = ("sum", "mean", "custom-table")

#: method-id prefix to the specific schema class used for typing instances
_METHOD_CLASSES = (
    ("demirjian", "DemirjianScoringMethod"),
    ("haavikko", "HaavikkoScoringMethod"),
    ("kullman", "KullmanScoringMethod"),
    ("mfh", "MoorreesFanningHuntScoringMethod"),
    ("moorrees", "MoorreesFanningHuntScoringMethod"),
)


@dataclass(frozen=True)
class ScoringMethod:
    method_id: str
    name: str
    stages: tuple[str, ...]
    required_teeth: tuple[str, ...]
    aggregation: str
    scores: dict[str, dict[str, dict[str, float]]] | None = None
    note: str | None = None

    def validate(self) -> None:
        if not self.stages:
            raise ValidationError(f"method {self.method_id}: no permissible stages")
        if len(set(self.stages)) != len(self.stages):
            raise ValidationError(f"method {self.method_id}: duplicate stages")
        if self.aggregation not in AGGREGATIONS:
            raise ValidationError(f"method {self.method_id}: unknown aggregation {self.aggregation!r}")
        for fdi in self.required_teeth:
            if not is_valid_fdi(fdi):
                raise ValidationError(f"method {self.method_id}: invalid required tooth {fdi!r}")
        if self.scores is not None:
            for sex, by_tooth in self.scores.items():
                for fdi in self.required_teeth:
                    table = by_tooth.get(fdi)
                    if table is None:
                        raise ValidationError(
                            f"method {self.method_id}: score table ({sex}) misses tooth {fdi}"
                        )
                    missing = [s for s in self.stages if s not in table]
                    if missing:
                        raise ValidationError(
                            f"method {self.method_id}: score table ({sex}, tooth {fdi}) "
                            f"misses stages {', '.join(missing)}"
                        )

    def permits(self, stage: str) -> bool:
        return stage in self.stages

    def score_for(self, fdi: str, stage: str, sex: str) -> float:
        if self.scores is None:
            raise ValidationError(f"method {self.method_id} has no stage-to-score mapping")
        by_tooth = self.scores.get(sex) or self.scores.get("any")
        if by_tooth is None:
            raise ValidationError(f"method {self.method_id}: no score table for sex {sex!r}")
        table = by_tooth.get(fdi)
        if table is None or stage not in table:
            raise ValidationError(f"method {self.method_id}: no score for tooth {fdi} stage {stage}")
        return table[stage]

    @property
    def iri(self) -> Iri:
        return mint_iri("method", self.method_id)


@dataclass(frozen=True)
class StudyRow:
    score: float
    mean: float
    sd: float
    min_age: float | None = None
    max_age: float | None = None


@dataclass(frozen=True)
class ReferenceStudy:
    study_id: str
    population: str
    sex: str
    rows: tuple[StudyRow, ...]
    citation: str | None = None
    min_applicable_age: float | None = None
    max_applicable_age: float | None = None

    def validate(self) -> None:
        if not self.rows:
            raise ValidationError(f"study {self.study_id}: empty score-to-age table")
        scores = [r.score for r in self.rows]
        means = [r.mean for r in self.rows]
        if any(b <= a for a, b in zip(scores, scores[1:])):
            raise ValidationError(f"study {self.study_id}: scores must be strictly increasing")
        if any(b <= a for a, b in zip(means, means[1:])):
            raise ValidationError(f"study {self.study_id}: mean ages must be strictly increasing")
        if any(r.sd < 0 for r in self.rows):
            raise ValidationError(f"study {self.study_id}: negative standard deviation")
        explicit = [r.min_age is not None or r.max_age is not None for r in self.rows]
        if any(explicit) and not all(r.min_age is not None and r.max_age is not None for r in self.rows):
            raise ValidationError(
                f"study {self.study_id}: explicit age bounds must cover every row"
            )

    @property
    def has_explicit_bounds(self) -> bool:
        return self.rows[0].min_age is not None

    @property
    def iri(self) -> Iri:
        return mint_iri("study", self.study_id)


# -- loading -------------------------------------------------------------------


def load_method(path: str | Path) -> ScoringMethod:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    try:
        scores = data.get("scores")
        method = ScoringMethod(
            method_id=data["method_id"],
            name=data.get("name", data["method_id"]),
            stages=tuple(data["stages"]),
            required_teeth=tuple(data.get("required_teeth", ())),
            aggregation=data.get("aggregation", "sum"),
            scores={sex: {t: dict(v) for t, v in by_tooth.items()} for sex, by_tooth in scores.items()}
            if scores
            else None,
            note=data.get("note"),
        )
    except KeyError as exc:
        raise ValidationError(f"{path}: missing method field {exc}") from None
    method.validate()
    return method


def load_study(path: str | Path) -> ReferenceStudy:
    p = Path(path)
    if p.suffix == ".csv":
        return _study_from_csv(p)
    data = json.loads(p.read_text(encoding="utf-8"))
    try:
        rows = tuple(
            StudyRow(
                score=float(r["score"]),
                mean=float(r["mean"]),
                sd=float(r["sd"]),
                min_age=float(r["min"]) if "min" in r else None,
                max_age=float(r["max"]) if "max" in r else None,
            )
            for r in data["rows"]
        )
        study = ReferenceStudy(
            study_id=data["study_id"],
            population=data.get("population", ""),
            sex=data.get("sex", "any"),
            rows=rows,
            citation=data.get("citation"),
            min_applicable_age=data.get("min_age"),
            max_applicable_age=data.get("max_age"),
        )
    except KeyError as exc:
        raise ValidationError(f"{path}: missing study field {exc}") from None
    study.validate()
    return study


def _study_from_csv(path: Path) -> ReferenceStudy:
    text = path.read_text(encoding="utf-8")
    reader = csv.DictReader(io.StringIO(text))
    rows = []
    for record in reader:
        rows.append(
            StudyRow(
                score=float(record["score"]),
                mean=float(record["mean"]),
                sd=float(record["sd"]),
                min_age=float(record["min"]) if record.get("min") else None,
                max_age=float(record["max"]) if record.get("max") else None,
            )
        )
    study = ReferenceStudy(study_id=path.stem, population="", sex="any", rows=tuple(rows))
    study.validate()
    return study


class MethodRegistry:
    """Methods and studies resolved from the KB's `methods/` and `studies/`."""

    def __init__(self, methods_dir: Path, studies_dir: Path) -> None:
        self.methods_dir = Path(methods_dir)
        self.studies_dir = Path(studies_dir)

    def method(self, method_id: str) -> ScoringMethod:
        path = self.methods_dir / f"{method_id}.json"
        if not path.exists():
            raise NotFoundError(f"unknown method: {method_id}")
        return load_method(path)

    def study(self, study_id: str) -> ReferenceStudy:
        for suffix in (".json", ".csv"):
            path = self.studies_dir / f"{study_id}{suffix}"
            if path.exists():
                return load_study(path)
        raise NotFoundError(f"unknown study: {study_id}")

    def method_ids(self) -> list[str]:
        return sorted(p.stem for p in self.methods_dir.glob("*.json"))

    def study_ids(self) -> list[str]:
        return sorted({p.stem for p in self.studies_dir.glob("*.json")} | {p.stem for p in self.studies_dir.glob("*.csv")})


# -- RDF projection --------------------------------------------------------------


def _method_class(method_id: str) -> str:
    for prefix, cls in _METHOD_CLASSES:
        if method_id.startswith(prefix):
            return cls
    return "ScoringMethod"


def method_to_rdf(method: ScoringMethod) -> list[Triple]:
    """Structural view of a method for querying; score tables stay in JSON."""
    node = method.iri
    staging = Iri(node.value + "/stages")
    aggregation = Iri(node.value + "/aggregation")
    triples = [
        Triple(node, _TYPE, Iri(ns.AIDA + _method_class(method.method_id))),
        Triple(node, Iri(ns.AIDA + "methodIdentifier"), Literal(method.method_id)),
        Triple(node, Iri(ns.RDFS_LABEL), Literal(method.name)),
        Triple(node, Iri(ns.AIDA + "hasStagingSystem"), staging),
        Triple(staging, _TYPE, Iri(ns.AIDA + "StagingSystem")),
        Triple(node, Iri(ns.AIDA + "hasAggregationProcedure"), aggregation),
        Triple(aggregation, _TYPE, Iri(ns.AIDA + "AggregationProcedure")),
        Triple(aggregation, Iri(ns.AIDA + "aggregationRule"), Literal(method.aggregation)),
    ]
    for stage in method.stages:
        stage_node = Iri(node.value + "/stage/" + stage)
        triples.append(Triple(staging, Iri(ns.AIDA + "permitsStage"), stage_node))
        triples.append(Triple(stage_node, _TYPE, Iri(ns.AIDA + "Stage")))
        triples.append(Triple(stage_node, Iri(ns.AIDA + "stageCode"), Literal(stage)))
    if method.scores is not None:
        mapping = Iri(node.value + "/score-mapping")
        triples.append(Triple(node, Iri(ns.AIDA + "hasStageToScoreMapping"), mapping))
        triples.append(Triple(mapping, _TYPE, Iri(ns.AIDA + "StageToScoreMapping")))
    return triples


def study_to_rdf(study: ReferenceStudy) -> list[Triple]:
    node = study.iri
    data_node = Iri(node.value + "/data")
    coeff_node = Iri(node.value + "/coefficients")
    triples = [
        Triple(node, _TYPE, Iri(ns.AIDA + "ReferenceStudy")),
        Triple(node, Iri(ns.AIDA + "studyIdentifier"), Literal(study.study_id)),
        Triple(node, Iri(ns.AIDA + "populationDescriptor"), Literal(study.population)),
        Triple(node, Iri(ns.AIDA + "sexApplicability"), Literal(study.sex)),
        Triple(node, Iri(ns.AIDA + "hasDataReferenceStudy"), data_node),
        Triple(data_node, _TYPE, Iri(ns.AIDA + "DataReferenceStudy")),
        Triple(node, Iri(ns.AIDA + "hasCoefficientMaturityData"), coeff_node),
        Triple(coeff_node, _TYPE, Iri(ns.AIDA + "CoefficientMaturityData")),
    ]
    if study.citation:
        triples.append(Triple(node, Iri(ns.AIDA + "provenanceCitation"), Literal(study.citation)))
    if study.min_applicable_age is not None:
        triples.append(Triple(node, Iri(ns.AIDA + "minimumApplicableAge"), years_literal(study.min_applicable_age)))
    if study.max_applicable_age is not None:
        triples.append(Triple(node, Iri(ns.AIDA + "maximumApplicableAge"), years_literal(study.max_applicable_age)))
    return triples
