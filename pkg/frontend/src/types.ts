/** Wire types for the prediction service API. */

export interface SliderField {
  name: string;
  kind: "int" | "real";
  min: number;
  max: number;
  step: number;
}

export interface EnumField {
  name: string;
  kind: "enum";
  values: string[];
}

export type FieldSpec = SliderField | EnumField;

export function isEnumField(field: FieldSpec): field is EnumField {
  return field.kind === "enum";
}

export interface ModelInfo {
  model_kind: string;
  format_version: number;
  created_at: string;
  training_meta: Record<string, unknown>;
  fields: FieldSpec[];
  band_thresholds: number[];
  band_names: string[];
}

export interface PredictRequest {
  designation: number;
  resource_allocation: number;
  mental_fatigue_score: number;
  gender: string;
  company_type: string;
  wfh_setup: string;
}

export interface ModelMeta {
  model_kind: string;
  format_version: number;
  mean_cv_r2: number | null;
}

export interface PredictResponse {
  burn_rate_raw: number;
  burn_rate: number;
  risk_band: string;
  model_meta: ModelMeta;
}

export interface ErrorBody {
  errors: string[];
}
