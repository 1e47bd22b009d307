import { PredictRequest } from "./types.js";

/** One scored what-if submission. */
export interface HistoryEntry {
  request: PredictRequest;
  burnRate: number;
  riskBand: string;
}

export const HISTORY_LIMIT = 10;

/** Prepend an entry, keeping only the newest HISTORY_LIMIT rows. */
export function pushHistory(rows: HistoryEntry[], entry: HistoryEntry): HistoryEntry[] {
  return [entry, ...rows].slice(0, HISTORY_LIMIT);
}

function formatSigned(delta: number): string {
  const rounded = Number(delta.toFixed(2));
  return rounded >= 0 ? `+${rounded}` : String(rounded);
}

/**
 * Human-readable differences between consecutive submissions.
 *
 * Numeric inputs show signed changes, enum inputs show the switch, and
 * the scored burn rate closes the list. The first submission has no
 * reference point and yields no deltas.
 */
export function describeDeltas(prev: HistoryEntry | null, next: HistoryEntry): string[] {
  if (prev === null) {
    return [];
  }
  const lines: string[] = [];
  const keys = Object.keys(next.request) as (keyof PredictRequest)[];
  for (const key of keys) {
    const before = prev.request[key];
    const after = next.request[key];
    if (before === after) {
      continue;
    }
    if (typeof before === "number" && typeof after === "number") {
      lines.push(`${key} ${formatSigned(after - before)}`);
    } else {
      lines.push(`${key} ${before} to ${after}`);
    }
  }
  if (prev.burnRate !== next.burnRate) {
    lines.push(`burn rate ${formatSigned(next.burnRate - prev.burnRate)}`);
  }
  return lines;
}
