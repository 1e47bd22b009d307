/**
 * Responses recorded from a live service instance.
 *
 * Captured verbatim from GET /api/v1/model and POST /api/v1/predict so
 * the tests exercise the exact wire shapes the service emits.
 */
import { ErrorBody, ModelInfo, PredictRequest, PredictResponse } from "../src/types.js";

export const MODEL_INFO: ModelInfo = {
  model_kind: "Svr",
  format_version: 1,
  created_at: "2026-08-19T13:01:32+00:00",
  training_meta: {
    c: 1.0,
    epsilon: 0.1,
    gamma: 0.1666666666666667,
    mean_cv_r2: 0.93,
    n_rows: 80,
    seed: 0,
  },
  fields: [
    { name: "designation", kind: "int", min: 0, max: 5, step: 1 },
    { name: "resource_allocation", kind: "int", min: 1, max: 10, step: 1 },
    { name: "mental_fatigue_score", kind: "real", min: 0.0, max: 10.0, step: 0.1 },
    { name: "gender", kind: "enum", values: ["Female", "Male"] },
    { name: "company_type", kind: "enum", values: ["Service", "Product"] },
    { name: "wfh_setup", kind: "enum", values: ["Yes", "No"] },
  ],
  band_thresholds: [0.3333333333333333, 0.6666666666666666],
  band_names: ["Low", "Moderate", "High"],
};

export interface RecordedExchange {
  request: PredictRequest;
  response: PredictResponse;
}

export const PREDICTIONS: RecordedExchange[] = [
  {
    request: {
      designation: 2,
      resource_allocation: 5,
      mental_fatigue_score: 6.5,
      gender: "Female",
      company_type: "Service",
      wfh_setup: "Yes",
    },
    response: {
      burn_rate_raw: 0.4815986465758061,
      burn_rate: 0.4815986465758061,
      risk_band: "Moderate",
      model_meta: { model_kind: "Svr", format_version: 1, mean_cv_r2: 0.93 },
    },
  },
  {
    request: {
      designation: 4,
      resource_allocation: 9,
      mental_fatigue_score: 9.0,
      gender: "Male",
      company_type: "Product",
      wfh_setup: "No",
    },
    response: {
      burn_rate_raw: 0.8016370352702198,
      burn_rate: 0.8016370352702198,
      risk_band: "High",
      model_meta: { model_kind: "Svr", format_version: 1, mean_cv_r2: 0.93 },
    },
  },
  {
    request: {
      designation: 0,
      resource_allocation: 1,
      mental_fatigue_score: 0.5,
      gender: "Male",
      company_type: "Service",
      wfh_setup: "Yes",
    },
    response: {
      burn_rate_raw: 0.1457402885976808,
      burn_rate: 0.1457402885976808,
      risk_band: "Low",
      model_meta: { model_kind: "Svr", format_version: 1, mean_cv_r2: 0.93 },
    },
  },
];

/** A request the service rejected, with its status and body. */
export const BAD_REQUEST: { request: Record<string, unknown>; status: number; body: ErrorBody } = {
  request: {
    designation: 2,
    resource_allocation: 5,
    mental_fatigue_score: 42,
    company_type: "Service",
    wfh_setup: "Yes",
  },
  status: 400,
  body: {
    errors: ["gender: missing", "mental_fatigue_score: must lie between 0 and 10"],
  },
};
