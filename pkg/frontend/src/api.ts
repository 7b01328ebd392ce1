/**
 * Thin typed client for the elicitation service.
 *
 * The fetch implementation is injectable so tests (and the scripted
 * acceptance loop) can intercept every network exchange; the board never
 * talks to the service through any other channel.
 */

import type {
  AssignResponse,
  ErrorBody,
  PredictionsResponse,
  SessionSnapshot,
  ThetaResponse,
} from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** Non-2xx service reply, carrying the body's machine-readable code. */
export class ApiError extends Error {
  readonly status: number;
  readonly code: string;

  constructor(status: number, code: string, message: string) {
    super(message);
    this.name = "ApiError";
    this.status = status;
    this.code = code;
  }
}

export class ApiClient {
  private readonly baseUrl: string;
  private readonly fetchFn: FetchLike;

  constructor(baseUrl: string, fetchFn?: FetchLike) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
    this.fetchFn = fetchFn ?? globalThis.fetch.bind(globalThis);
  }

  createSession(n: number, tiers: number, names?: string[]): Promise<SessionSnapshot> {
    return this.request<SessionSnapshot>("POST", "/sessions", {
      n,
      tiers,
      names: names ?? null,
    });
  }

  getSession(sessionId: string): Promise<SessionSnapshot> {
    return this.request<SessionSnapshot>("GET", `/sessions/${sessionId}`);
  }

  assign(sessionId: string, alternative: string, tier: number): Promise<AssignResponse> {
    return this.request<AssignResponse>("POST", `/sessions/${sessionId}/assignments`, {
      alternative,
      tier,
    });
  }

  predictions(sessionId: string, alternatives: readonly string[]): Promise<PredictionsResponse> {
    const query = encodeURIComponent(alternatives.join(","));
    return this.request<PredictionsResponse>(
      "GET",
      `/sessions/${sessionId}/predictions?alts=${query}`,
    );
  }

  theta(sessionId: string): Promise<ThetaResponse> {
    return this.request<ThetaResponse>("GET", `/sessions/${sessionId}/theta`);
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchFn(this.baseUrl + path, init);
    if (!response.ok) {
      throw await this.toError(response);
    }
    return (await response.json()) as T;
  }

  private async toError(response: Response): Promise<ApiError> {
    let code = "error";
    let message = `request failed with status ${response.status}`;
    try {
      const body = (await response.json()) as Partial<ErrorBody>;
      if (typeof body.code === "string") code = body.code;
      if (typeof body.message === "string") message = body.message;
    } catch {
      // non-JSON error body: keep the generic message
    }
    return new ApiError(response.status, code, message);
  }
}
