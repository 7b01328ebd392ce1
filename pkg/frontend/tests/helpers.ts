/** Shared fakes and fixture builders for the board tests. */

import type { FetchLike } from "../src/api.js";
import type { BoardApi } from "../src/state.js";
import type {
  AssignResponse,
  PredictionsResponse,
  SessionSnapshot,
} from "../src/types.js";

/** One recorded request/response pair. */
export interface Exchange {
  method: string;
  path: string;
  body: unknown;
  status?: number;
}

export interface RecordedCall {
  method: string;
  url: string;
  body: string | null;
}

export function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

/**
 * A fetch stand-in that replays a recorded script in order and fails
 * loudly on any request the script does not expect.
 */
export function scriptedFetch(baseUrl: string, script: readonly Exchange[]) {
  let cursor = 0;
  const calls: RecordedCall[] = [];
  const fetchFn: FetchLike = (input, init) => {
    const expected = script[cursor];
    const method = init?.method ?? "GET";
    calls.push({
      method,
      url: input,
      body: typeof init?.body === "string" ? init.body : null,
    });
    if (!expected) {
      return Promise.reject(new Error(`request beyond script end: ${method} ${input}`));
    }
    cursor += 1;
    const wantUrl = baseUrl + expected.path;
    if (input !== wantUrl || method !== expected.method) {
      return Promise.reject(
        new Error(`expected ${expected.method} ${wantUrl}, got ${method} ${input}`),
      );
    }
    return Promise.resolve(jsonResponse(expected.body, expected.status ?? 200));
  };
  return {
    fetchFn,
    calls,
    remaining: () => script.length - cursor,
  };
}

export function makeSnapshot(overrides: Partial<SessionSnapshot> = {}): SessionSnapshot {
  return {
    id: "s1",
    version: 0,
    n: 4,
    names: null,
    tiers: 4,
    log: [],
    preferences: [],
    families: [[]],
    unifying: [],
    stats: { nodes: 0, lp_solves: 0 },
    ...overrides,
  };
}

export function makeAssign(overrides: Partial<AssignResponse> = {}): AssignResponse {
  return {
    version: 1,
    applied: true,
    warning: null,
    preference_count: 0,
    revised: [],
    families: [[]],
    unifying: [],
    stats: { nodes: 0, lp_solves: 0 },
    ...overrides,
  };
}

export function makePredictions(
  overrides: Partial<PredictionsResponse> = {},
): PredictionsResponse {
  return { version: 0, alternatives: [], cells: [], ...overrides };
}

export class Deferred<T> {
  readonly promise: Promise<T>;
  resolve!: (value: T) => void;
  reject!: (reason: unknown) => void;

  constructor() {
    this.promise = new Promise((resolve, reject) => {
      this.resolve = resolve;
      this.reject = reject;
    });
  }
}

type Thunk<T> = () => Promise<T>;

/**
 * BoardApi double with per-endpoint response queues.  Queue entries may
 * be values, errors, or promises (for tests that control timing).
 */
export class FakeApi implements BoardApi {
  assignCalls: Array<{ sessionId: string; alternative: string; tier: number }> = [];
  predictionCalls: Array<{ sessionId: string; alternatives: string[] }> = [];
  private assignQueue: Array<Thunk<AssignResponse>> = [];
  private predictionQueue: Array<Thunk<PredictionsResponse>> = [];

  queueAssign(entry: AssignResponse | Error | Promise<AssignResponse>): void {
    this.assignQueue.push(this.thunk(entry));
  }

  queuePredictions(entry: PredictionsResponse | Error | Promise<PredictionsResponse>): void {
    this.predictionQueue.push(this.thunk(entry));
  }

  assign(sessionId: string, alternative: string, tier: number): Promise<AssignResponse> {
    this.assignCalls.push({ sessionId, alternative, tier });
    const next = this.assignQueue.shift();
    if (!next) return Promise.reject(new Error("unexpected assign call"));
    return next();
  }

  predictions(
    sessionId: string,
    alternatives: readonly string[],
  ): Promise<PredictionsResponse> {
    this.predictionCalls.push({ sessionId, alternatives: [...alternatives] });
    const next = this.predictionQueue.shift();
    if (!next) return Promise.reject(new Error("unexpected predictions call"));
    return next();
  }

  private thunk<T>(entry: T | Error | Promise<T>): Thunk<T> {
    if (entry instanceof Error) return () => Promise.reject(entry);
    return () => Promise.resolve(entry);
  }
}
