import {
  FieldSpec,
  ModelInfo,
  PredictRequest,
  PredictResponse,
  isEnumField,
} from "./types.js";

/** Client-side state backing the what-if form. */
export interface FormState {
  values: Record<string, number | string>;
  pending: boolean;
  lastResponse: PredictResponse | null;
  fieldErrors: Record<string, string>;
  formErrors: string[];
}

function decimalPlaces(step: number): number {
  const text = String(step);
  const dot = text.indexOf(".");
  return dot < 0 ? 0 : text.length - dot - 1;
}

/** Snap a raw slider value onto the field's step grid, clamped to its range. */
export function clampToField(field: FieldSpec, raw: number): number {
  if (isEnumField(field)) {
    throw new Error(`field ${field.name} is not numeric`);
  }
  const bounded = Math.min(field.max, Math.max(field.min, raw));
  const steps = Math.round((bounded - field.min) / field.step);
  const snapped = field.min + steps * field.step;
  const value = Number(snapped.toFixed(decimalPlaces(field.step)));
  return Math.min(field.max, Math.max(field.min, value));
}

/** Default for one field: the midpoint rounded down, or the first choice. */
export function defaultForField(field: FieldSpec): number | string {
  if (isEnumField(field)) {
    return field.values[0];
  }
  const midpoint = (field.min + field.max) / 2;
  if (field.kind === "int") {
    return Math.floor(midpoint);
  }
  const steps = Math.floor((midpoint - field.min) / field.step + 1e-6);
  const snapped = field.min + steps * field.step;
  return Number(snapped.toFixed(decimalPlaces(field.step)));
}

/** Build the initial form state from the served model descriptor. */
export function buildFormFromModelInfo(info: ModelInfo): FormState {
  const values: Record<string, number | string> = {};
  for (const field of info.fields) {
    values[field.name] = defaultForField(field);
  }
  return {
    values,
    pending: false,
    lastResponse: null,
    fieldErrors: {},
    formErrors: [],
  };
}

export function fieldNames(info: ModelInfo): string[] {
  return info.fields.map((field) => field.name);
}

/** Serialize the form into the exact request schema the service expects. */
export function serializeRequest(state: FormState): PredictRequest {
  return {
    designation: Number(state.values["designation"]),
    resource_allocation: Number(state.values["resource_allocation"]),
    mental_fatigue_score: Number(state.values["mental_fatigue_score"]),
    gender: String(state.values["gender"]),
    company_type: String(state.values["company_type"]),
    wfh_setup: String(state.values["wfh_setup"]),
  };
}
