// JSON shapes of the case-service API (snake_case mirrors the wire format).

export interface TreatmentIn {
  label: string;
  note?: string | null;
}

export interface StageOut {
  stage: string;
  method_id: string;
}

export interface ToothOut {
  fdi: string;
  uns: string;
  palmer: string;
  haderup?: string | null;
  treatment?: TreatmentIn | null;
  stage?: StageOut | null;
}

export interface ClassificationOut {
  threshold: number;
  probability_at_or_above: number;
  verdict: string;
}

export interface AssessmentOut {
  assessment_id: string;
  method_id: string;
  study_id: string;
  score: number;
  mean_age: number;
  standard_dev: number;
  min_age: number;
  max_age: number;
  k: number;
  clamped: boolean;
  classification?: ClassificationOut | null;
  timestamp: string;
}

export interface AiAssessmentOut {
  assessment_id: string;
  kind: string;
  run_id: string;
  threshold?: number | null;
  probability_at_or_above?: number | null;
  estimated_age?: number | null;
  uncertainty?: number | null;
  timestamp: string;
}

export interface CaseOut {
  case_id: string;
  case_iri: string;
  requesting_entity: string;
  examination_date: string;
  expert: { name: string; role_label: string };
  individual: {
    reported_age?: number | null;
    biological_sex: string;
    identifiers: string[];
  };
  opg: { image_id: string; acquisition_date: string; storage_ref?: string | null };
  teeth: ToothOut[];
  assessments: AssessmentOut[];
  ai_assessments: AiAssessmentOut[];
  revision: number;
}

export interface MethodOut {
  method_id: string;
  name: string;
  stages: string[];
  required_teeth: string[];
  aggregation: string;
  note?: string | null;
}

export interface StudyOut {
  study_id: string;
  population: string;
  sex: string;
  citation?: string | null;
  min_score: number;
  max_score: number;
}

export interface NotationEntry {
  fdi: string;
  uns: string;
  palmer: string;
  haderup?: string | null;
}

export interface SparqlCell {
  type: "iri" | "literal" | "bnode";
  value: string;
  datatype?: string;
  lang?: string;
}

export interface SparqlResponse {
  header: string[];
  rows: Record<string, SparqlCell | null>[];
}

export interface CqEntry {
  name: string;
  rows: number;
  bound: string;
  passed: boolean;
}

export interface CqResponse {
  results: CqEntry[];
  passed: boolean;
}

export interface ReportResponse {
  case_id: string;
  mean_age: number;
  standard_dev: number;
  age_range_text: string;
  conclusion: string;
  generated_at: string;
  text: string;
}

export interface Problem {
  code: string;
  message: string;
}

export class ApiError extends Error {
  readonly status: number;
  readonly code: string;

  constructor(status: number, problem: Problem) {
    super(problem.message);
    this.status = status;
    this.code = problem.code;
  }
}
