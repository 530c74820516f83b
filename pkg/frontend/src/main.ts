/** DOM wiring for the single-page console: one shared overlay editor
 * plus four task panels, all rendered from server responses. */

import { ApiError, Client } from "./api.js";
import {
  canRunTask,
  renderErrors,
  renderMixEditor,
  renderScheduleEditor,
  renderTaskResult,
} from "./panels.js";
import type { SessionState, TaskKind } from "./types.js";

const PANELS: { kind: TaskKind; title: string }[] = [
  { kind: "advanced", title: "Capacity assessment" },
  { kind: "basicTheatre", title: "Theatre-only estimate" },
  { kind: "evaluateAllocation", title: "Allocation evaluation" },
  { kind: "bestFit", title: "Best-fit targeting" },
];

const client = new Client();
let state: SessionState | null = null;

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node;
}

function showErrors(errors: { field: string; message: string }[]): void {
  el("errors").innerHTML = renderErrors(errors);
}

async function guarded<T>(work: () => Promise<T>): Promise<T | null> {
  try {
    el("errors").innerHTML = "";
    return await work();
  } catch (err) {
    if (err instanceof ApiError) showErrors(err.errors);
    else showErrors([{ field: "", message: String(err) }]);
    return null;
  }
}

function renderOverlay(): void {
  if (!state) return;
  el("mix-editor").innerHTML = renderMixEditor(state);
  el("schedule-editor").innerHTML = renderScheduleEditor(state);
  for (const { kind } of PANELS) {
    const button = el(`run-${kind}`) as HTMLButtonElement;
    button.disabled = !canRunTask(state, kind);
  }
  bindOverlayInputs();
}

function bindOverlayInputs(): void {
  const editors = [el("mix-editor"), el("schedule-editor")];
  for (const root of editors) {
    root.querySelectorAll<HTMLInputElement>("input[data-mix]").forEach((input) => {
      input.addEventListener("change", () => {
        const g = Number(input.dataset.g);
        const value = Number(input.value);
        const patch =
          input.dataset.mix === "case"
            ? { caseMix: { [g]: value } }
            : { subMix: [{ g, p: Number(input.dataset.p), percent: value }] };
        void applyPatch(patch);
      });
    });
    root.querySelectorAll<HTMLInputElement>("input[data-mss]").forEach((input) => {
      input.addEventListener("change", () => {
        void applyPatch({ mss: { [input.dataset.mss as string]: Number(input.value) } });
      });
    });
    root.querySelectorAll<HTMLButtonElement>("button[data-op]").forEach((button) => {
      button.addEventListener("click", () => void runOp(button.dataset.op as string));
    });
  }
}

async function applyPatch(patch: Record<string, unknown>): Promise<void> {
  if (!state) return;
  const next = await guarded(() => client.patchOverlay(state!.sessionId, patch));
  if (next) {
    state = next;
    renderOverlay();
  }
}

async function runOp(op: string): Promise<void> {
  if (!state) return;
  const id = state.sessionId;
  const next = await guarded(() => {
    if (op === "fix-mix") return client.fixMix(id, null);
    if (op === "even-mix") return client.evenMix(id);
    return client.evenSessions(id);
  });
  if (next) {
    state = next;
    renderOverlay();
  }
}

async function runTask(kind: TaskKind): Promise<void> {
  if (!state) return;
  const result = await guarded(() => client.runTask(state!.sessionId, { kind }));
  if (result) el(`result-${kind}`).innerHTML = renderTaskResult(result, state);
}

function buildPanels(): void {
  const host = el("panels");
  host.innerHTML = PANELS.map(
    ({ kind, title }) =>
      `<section class="panel"><h2>${title}</h2>` +
      `<button id="run-${kind}" disabled>Run</button>` +
      `<div id="result-${kind}" class="result"></div></section>`,
  ).join("");
  for (const { kind } of PANELS) {
    el(`run-${kind}`).addEventListener("click", () => void runTask(kind));
  }
}

async function loadProject(): Promise<void> {
  const path = (el("project-path") as HTMLInputElement).value;
  const created = await guarded(() => client.createSession(path));
  if (created) {
    state = created;
    el("project-name").textContent = created.projectName;
    renderOverlay();
  }
}

export function start(): void {
  buildPanels();
  el("load-project").addEventListener("click", () => void loadProject());
}

if (typeof document !== "undefined" && document.getElementById("panels")) {
  start();
}
