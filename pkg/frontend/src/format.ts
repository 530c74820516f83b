/** Display formatting. Every number shown in a panel passes through
 * fmt4 so the rendered text is a pure function of the API payload. */

import type { ReportRow } from "./types.js";

/** Four-decimal fixed-point, the convention used across the panels. */
export function fmt4(value: number): string {
  return value.toFixed(4);
}

/** Two decimals, used for percentages in editors (not result grids). */
export function fmt2(value: number): string {
  return value.toFixed(2);
}

/** The over-capacity badge comes from the API's own flag, never from a
 * client-side comparison against 100. */
export function badge(row: ReportRow): string {
  return row.bottleneck ? " [!]" : "";
}

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}
