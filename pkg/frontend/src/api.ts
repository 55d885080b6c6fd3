/**
 * Typed client for the session service HTTP contract.
 *
 * Every method maps to one endpoint; failures become ServiceError carrying
 * the HTTP status and the service's own error message, so the UI can surface
 * them inline without guessing.
 */

import type {
  FinalizedSession,
  HealthView,
  SessionOpened,
  SessionSnapshot,
  SystemView,
} from "./types.js";

/** Error raised for any non-2xx response or network failure (status 0). */
export class ServiceError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ServiceError";
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ServiceClient {
  private readonly base: string;
  private readonly fetchImpl: FetchLike;

  constructor(baseUrl: string, fetchImpl?: FetchLike) {
    this.base = baseUrl.replace(/\/+$/, "");
    this.fetchImpl = fetchImpl ?? ((input, init) => fetch(input, init));
  }

  get baseUrl(): string {
    return this.base;
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchImpl(`${this.base}${path}`, {
        method,
        headers: body === undefined ? undefined : { "Content-Type": "application/json" },
        body: body === undefined ? undefined : JSON.stringify(body),
      });
    } catch (exc) {
      const reason = exc instanceof Error ? exc.message : String(exc);
      throw new ServiceError(0, `service unreachable: ${reason}`);
    }
    if (!response.ok) {
      let message = `HTTP ${response.status}`;
      try {
        const doc: unknown = await response.json();
        if (doc && typeof doc === "object" && "error" in doc) {
          message = String((doc as { error: unknown }).error);
        }
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ServiceError(response.status, message);
    }
    return (await response.json()) as T;
  }

  /** POST /sessions: open a session for one feature vector. */
  createSession(features: number[]): Promise<SessionOpened> {
    return this.request<SessionOpened>("POST", "/sessions", { features });
  }

  /** GET /sessions/{id}/options: current preview plus available options. */
  getOptions(sessionId: string): Promise<SessionSnapshot> {
    return this.request<SessionSnapshot>("GET", `/sessions/${sessionId}/options`);
  }

  /** POST /sessions/{id}/report: disclose one (attribute, level) pair. */
  report(sessionId: string, attribute: string, level: string): Promise<SessionSnapshot> {
    return this.request<SessionSnapshot>("POST", `/sessions/${sessionId}/report`, {
      attribute,
      level,
    });
  }

  /** POST /sessions/{id}/finalize: stop reporting and take the prediction. */
  finalize(sessionId: string): Promise<FinalizedSession> {
    return this.request<FinalizedSession>("POST", `/sessions/${sessionId}/finalize`);
  }

  /** GET /system: public tree, gains, and schema (never model parameters). */
  fetchSystem(): Promise<SystemView> {
    return this.request<SystemView>("GET", "/system");
  }

  /** GET /health. */
  health(): Promise<HealthView> {
    return this.request<HealthView>("GET", "/health");
  }
}
