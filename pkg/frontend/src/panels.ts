/** Pure HTML-string renderers for the four task panels and the shared
 * overlay editor.  No DOM access here, so every render is unit-testable
 * against recorded API payloads. */

import { badge, escapeHtml, fmt2, fmt4 } from "./format.js";
import type {
  BestFitResult,
  CohortResult,
  EvaluationResult,
  FeasibilityVerdict,
  FieldError,
  ReportRow,
  SessionState,
  TaskKind,
  TaskResult,
} from "./types.js";

// ---------------------------------------------------------------------------
// results grid

export function renderReportGrid(rows: ReportRow[]): string {
  const body = rows
    .map(
      (r) => `<tr class="${r.bottleneck ? "bottleneck" : ""}">` +
        `<td>${escapeHtml(r.name)}</td>` +
        `<td class="num">${r.spaces}</td>` +
        `<td class="num">${fmt4(r.usedHours)}</td>` +
        `<td class="num">${fmt4(r.availableHours)}</td>` +
        `<td class="num">${fmt4(r.percentUsed)}${badge(r)}</td>` +
        `<td class="num">${fmt4(r.patientsTreated)}</td>` +
        `</tr>`,
    )
    .join("");
  return (
    `<table class="report"><thead><tr>` +
    `<th>Resource</th><th>Spaces</th><th>Used hrs</th>` +
    `<th>Avail hrs</th><th>% used</th><th>Treated</th>` +
    `</tr></thead><tbody>${body}</tbody></table>`
  );
}

export function renderCohort(result: CohortResult, state: SessionState): string {
  const typeName = (g: number): string =>
    state.types.find((t) => t.typeId === g)?.name ?? `Type ${g}`;
  const perType = result.perType
    .map(
      (t) =>
        `<tr><td>${escapeHtml(typeName(t.g))}</td>` +
        `<td class="num">${fmt4(t.count)}</td></tr>`,
    )
    .join("");
  const perSub = result.perSubType
    .map(
      (s) =>
        `<tr><td>[${s.g}][${s.p}]</td><td class="num">${fmt4(s.count)}</td></tr>`,
    )
    .join("");
  const warnings = result.warnings
    .map((w) => `<p class="warning">${escapeHtml(w)}</p>`)
    .join("");
  return (
    `<p class="capacity">Capacity <strong>${fmt4(result.total)}</strong>` +
    ` &middot; revenue ${fmt4(result.totalRevenue)}</p>` +
    warnings +
    `<table class="counts"><thead><tr><th>Patient type</th><th>Count</th></tr></thead>` +
    `<tbody>${perType}</tbody></table>` +
    `<table class="counts"><thead><tr><th>Sub-type</th><th>Count</th></tr></thead>` +
    `<tbody>${perSub}</tbody></table>` +
    renderReportGrid(result.report)
  );
}

export function renderEvaluation(result: EvaluationResult): string {
  const summary = result.flagged.length
    ? `<p class="verdict over">Over capacity: ${result.flagged
        .map(escapeHtml)
        .join(", ")}</p>`
    : `<p class="verdict ok">All resources within capacity</p>`;
  return summary + renderReportGrid(result.report);
}

export function renderFeasibility(result: FeasibilityVerdict, state: SessionState): string {
  const head = result.feasible
    ? `<p class="verdict ok">FEASIBLE</p>`
    : `<p class="verdict over">INFEASIBLE</p>`;
  const rows = result.violations
    .map(
      (v) =>
        `<tr><td>${escapeHtml(v.resource)}</td>` +
        `<td class="num">${fmt4(v.excessHours)}</td></tr>`,
    )
    .join("");
  const table = rows
    ? `<table class="counts"><thead><tr><th>Resource</th><th>Excess hrs</th></tr></thead>` +
      `<tbody>${rows}</tbody></table>`
    : "";
  const cohort = result.impliedCohort
    ? renderCohort(result.impliedCohort, state)
    : "";
  return head + table + cohort;
}

export function renderBestFit(result: BestFitResult, state: SessionState): string {
  const rows = result.deviations
    .map(
      (d) =>
        `<tr><td>${escapeHtml(d.target)}</td>` +
        `<td class="num">${fmt4(d.unmet)}</td></tr>`,
    )
    .join("");
  const note = result.throughputMaximized
    ? `<p class="note">Targets met; cohort re-maximized for throughput.</p>`
    : "";
  return (
    `<p class="capacity">Objective <strong>${fmt4(result.objectiveValue)}</strong></p>` +
    note +
    `<table class="counts"><thead><tr><th>Target</th><th>Unmet</th></tr></thead>` +
    `<tbody>${rows}</tbody></table>` +
    renderCohort(result.cohort, state)
  );
}

export function renderTaskResult(task: TaskResult, state: SessionState): string {
  const stamp = `<p class="meta">${escapeHtml(task.kind)} &middot; ${fmt4(
    task.elapsedMs,
  )} ms</p>`;
  switch (task.kind) {
    case "evaluateAllocation":
      return stamp + renderEvaluation(task.result as EvaluationResult);
    case "feasibility":
      return stamp + renderFeasibility(task.result as FeasibilityVerdict, state);
    case "bestFit":
      return stamp + renderBestFit(task.result as BestFitResult, state);
    default:
      return stamp + renderCohort(task.result as CohortResult, state);
  }
}

// ---------------------------------------------------------------------------
// overlay editor

export function renderMixEditor(state: SessionState): string {
  const caseError = state.caseMixError ?? 0;
  const caseRows = state.types
    .map((t) => {
      const pct = state.caseMix[String(t.typeId)] ?? 0;
      return (
        `<tr><td>${escapeHtml(t.name)}</td>` +
        `<td><input type="number" min="0" step="0.01" ` +
        `data-mix="case" data-g="${t.typeId}" value="${fmt2(pct)}"></td></tr>`
      );
    })
    .join("");
  const subRows = state.subMix
    .map(
      (s) =>
        `<tr><td>[${s.g}][${s.p}]</td>` +
        `<td><input type="number" min="0" step="0.01" ` +
        `data-mix="sub" data-g="${s.g}" data-p="${s.p}" value="${fmt2(s.percent)}"></td>` +
        `<td class="num suberror" data-error-for="${s.g}">` +
        `${fmt2(state.subMixErrors[String(s.g)] ?? 0)}%</td></tr>`,
    )
    .join("");
  return (
    `<p class="mix-error ${caseError > 0 ? "bad" : "ok"}">` +
    `Case mix error: <span id="case-mix-error">${fmt2(caseError)}</span>%</p>` +
    `<button data-op="fix-mix">Fix Error</button>` +
    `<button data-op="even-mix">Even</button>` +
    `<table class="editor"><tbody>${caseRows}</tbody></table>` +
    `<table class="editor"><tbody>${subRows}</tbody></table>`
  );
}

export function renderScheduleEditor(state: SessionState): string {
  const m = state.mss;
  const stepper = (key: string, value: number): string =>
    `<label>${key} <input type="number" min="1" data-mss="${key}" value="${value}"></label>`;
  return (
    stepper("weeks", m.weeks) +
    stepper("daysPerWeek", m.daysPerWeek) +
    stepper("sessionsPerDay", m.sessionsPerDay) +
    `<label>sessionHours <input type="number" min="0.5" step="0.5" ` +
    `data-mss="sessionHours" value="${m.sessionHours}"></label>` +
    `<p>Total sessions: <span id="total-sessions">${m.totalSessions}</span>` +
    ` &middot; unassigned: <span id="unassigned">${state.unassignedSessions}</span></p>` +
    `<button data-op="even-sessions">Set Even Number</button>`
  );
}

// ---------------------------------------------------------------------------
// gating: a task button is enabled exactly when the server would accept
// the task, using only fields the server itself returned.

export function mixIsValid(state: SessionState): boolean {
  if (state.caseMixError === null || state.caseMixError > 0) return false;
  return Object.values(state.subMixErrors).every((err) => err === 0);
}

export function canRunTask(state: SessionState, kind: TaskKind): boolean {
  switch (kind) {
    case "basicTheatre":
      return mixIsValid(state) && Object.keys(state.sessionAssignments).length > 0;
    case "basicBeds":
    case "advanced":
      return mixIsValid(state);
    case "evaluateAllocation":
      return state.hasAllocation;
    case "feasibility":
      return (
        Object.keys(state.targets.type).length > 0 ||
        state.targets.sub.length > 0 ||
        state.hasAllocation
      );
    case "bestFit":
      return (
        Object.keys(state.targets.type).length > 0 ||
        state.targets.sub.length > 0
      );
  }
}

export function renderErrors(errors: FieldError[]): string {
  const items = errors
    .map(
      (e) =>
        `<li><strong>${escapeHtml(e.field)}</strong>: ${escapeHtml(e.message)}</li>`,
    )
    .join("");
  return `<ul class="errors">${items}</ul>`;
}
