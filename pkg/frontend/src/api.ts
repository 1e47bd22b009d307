import { ErrorBody, ModelInfo, PredictRequest, PredictResponse } from "./types.js";

/** Minimal slice of the fetch contract used here, injectable for tests. */
export type FetchLike = (url: string, init?: RequestInit) => Promise<{
  ok: boolean;
  status: number;
  json(): Promise<unknown>;
}>;

/** Outcome of one predict round trip, normalized for the UI. */
export type SubmitOutcome =
  | { kind: "result"; response: PredictResponse }
  | { kind: "rejected"; fieldErrors: Record<string, string>; formErrors: string[] }
  | { kind: "unreachable"; message: string };

/**
 * Split service error strings into per-field messages.
 *
 * The service reports validation failures as "field: message" lines.
 * Lines whose prefix is not a known field stay form-level.
 */
export function mapServerErrors(
  messages: string[],
  fieldNames: string[],
): { fieldErrors: Record<string, string>; formErrors: string[] } {
  const fieldErrors: Record<string, string> = {};
  const formErrors: string[] = [];
  for (const message of messages) {
    const sep = message.indexOf(": ");
    const prefix = sep >= 0 ? message.slice(0, sep) : "";
    if (sep >= 0 && fieldNames.includes(prefix)) {
      fieldErrors[prefix] = message.slice(sep + 2);
    } else {
      formErrors.push(message);
    }
  }
  return { fieldErrors, formErrors };
}

/** Fetch the served model descriptor. Throws when the service is unreachable. */
export async function fetchModelInfo(
  origin: string,
  fetchFn: FetchLike = fetch,
): Promise<ModelInfo> {
  const resp = await fetchFn(`${origin}/api/v1/model`);
  if (!resp.ok) {
    throw new Error(`model endpoint returned status ${resp.status}`);
  }
  return (await resp.json()) as ModelInfo;
}

/** POST one prediction request and normalize every outcome. */
export async function postPredict(
  origin: string,
  request: PredictRequest,
  fieldNames: string[],
  fetchFn: FetchLike = fetch,
): Promise<SubmitOutcome> {
  let resp: Awaited<ReturnType<FetchLike>>;
  try {
    resp = await fetchFn(`${origin}/api/v1/predict`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(request),
    });
  } catch (err) {
    const message = err instanceof Error ? err.message : String(err);
    return { kind: "unreachable", message };
  }
  if (resp.ok) {
    return { kind: "result", response: (await resp.json()) as PredictResponse };
  }
  if (resp.status === 400) {
    const body = (await resp.json()) as ErrorBody;
    return { kind: "rejected", ...mapServerErrors(body.errors, fieldNames) };
  }
  return { kind: "unreachable", message: `service returned status ${resp.status}` };
}
