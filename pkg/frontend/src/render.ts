/** Pure display helpers, kept DOM-free so they test in isolation. */

const BAND_COLORS = ["#2e7d32", "#f9a825", "#c62828"];
const UNKNOWN_BAND_COLOR = "#546e7a";

/** The score string shown to the user: the service value to 2 decimals. */
export function formatBurnRate(burnRate: number): string {
  return burnRate.toFixed(2);
}

/** Gauge fill for a score on the 0 to 1 scale, as a 0 to 100 percentage. */
export function gaugePercent(burnRate: number): number {
  const clamped = Math.min(1, Math.max(0, burnRate));
  return clamped * 100;
}

/** Color for a band name, by its position in the served band list. */
export function bandColor(band: string, bandNames: string[]): string {
  const index = bandNames.indexOf(band);
  if (index < 0 || index >= BAND_COLORS.length) {
    return UNKNOWN_BAND_COLOR;
  }
  return BAND_COLORS[index];
}
