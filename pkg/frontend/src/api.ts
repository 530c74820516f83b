/** Thin JSON client for the what-if session service.  All state lives
 * server-side; the console only keeps the session id. */

import type { FieldError, SessionState, TaskKind, TaskResult } from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly errors: FieldError[],
  ) {
    super(errors.map((e) => `${e.field}: ${e.message}`).join("; "));
  }
}

function toFieldErrors(status: number, body: unknown): FieldError[] {
  const detail = (body as { detail?: unknown })?.detail;
  if (Array.isArray(detail)) {
    return detail.map((d) => ({
      field: String((d as FieldError).field ?? (d as { loc?: unknown[] }).loc?.join(".") ?? ""),
      message: String((d as FieldError).message ?? (d as { msg?: string }).msg ?? ""),
    }));
  }
  return [{ field: "", message: `HTTP ${status}` }];
}

export class Client {
  constructor(private readonly baseUrl: string = "") {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const resp = await fetch(this.baseUrl + path, {
      method,
      headers: body === undefined ? {} : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!resp.ok) {
      const payload = await resp.json().catch(() => ({}));
      throw new ApiError(resp.status, toFieldErrors(resp.status, payload));
    }
    if (resp.status === 204) return undefined as T;
    return (await resp.json()) as T;
  }

  createSession(projectPath: string): Promise<SessionState> {
    return this.request("POST", "/sessions", { projectPath });
  }

  getSession(id: string): Promise<SessionState> {
    return this.request("GET", `/sessions/${id}`);
  }

  deleteSession(id: string): Promise<void> {
    return this.request("DELETE", `/sessions/${id}`);
  }

  patchOverlay(id: string, patch: Record<string, unknown>): Promise<SessionState> {
    return this.request("PATCH", `/sessions/${id}/overlay`, patch);
  }

  fixMix(id: string, typeId: number | null): Promise<SessionState> {
    return this.request("POST", `/sessions/${id}/overlay/fix-mix`, { typeId });
  }

  evenSessions(id: string): Promise<SessionState> {
    return this.request("POST", `/sessions/${id}/overlay/even-sessions`);
  }

  evenMix(id: string): Promise<SessionState> {
    return this.request("POST", `/sessions/${id}/overlay/even-mix`);
  }

  fullMix(id: string, typeId: number): Promise<SessionState> {
    return this.request("POST", `/sessions/${id}/overlay/full-mix`, { typeId });
  }

  runTask(id: string, req: { kind: TaskKind } & Record<string, unknown>): Promise<TaskResult> {
    return this.request("POST", `/sessions/${id}/tasks`, req);
  }
}
