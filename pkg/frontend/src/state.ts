/**
 * Board store: owns the client-side session state and applies the
 * optimistic-update protocol for chip drops.
 *
 * Protocol per drop: move the chip immediately, POST the assignment,
 * then reconcile.  A service error puts the chip back and raises a
 * toast; a not-applied reply (search budget warning) puts the chip back
 * and raises a banner, because the server state did not change.  At most
 * one mutation is in flight per session; reads may overlap and are
 * reconciled by version, so a response older than the displayed version
 * is discarded.  All verdicts and families shown come from service
 * payloads; nothing is inferred locally.
 */

import { ApiError } from "./api.js";
import {
  buildMatrixVm,
  emptyMatrix,
  normalizeSelection,
  type MatrixVm,
} from "./matrix.js";
import { buildThetaVm, collectSubsetKeys, type ThetaVm } from "./theta.js";
import type {
  AssignResponse,
  PredictionsResponse,
  RevisedCell,
  SessionSnapshot,
  ThetaPayload,
} from "./types.js";

/** The slice of the API surface the store needs; ApiClient satisfies it. */
export interface BoardApi {
  assign(sessionId: string, alternative: string, tier: number): Promise<AssignResponse>;
  predictions(
    sessionId: string,
    alternatives: readonly string[],
  ): Promise<PredictionsResponse>;
}

export type ChipLocation = { kind: "pool" } | { kind: "tier"; tier: number };

export interface BoardState {
  sessionId: string;
  n: number;
  names: string[] | null;
  tierCount: number;
  version: number;
  /** columns[k - 1] holds the chips of tier k; larger tier = more preferred. */
  columns: string[][];
  pool: string[];
  selection: string[];
  matrix: MatrixVm;
  theta: ThetaVm;
  revised: RevisedCell[];
  banner: string | null;
  toast: string | null;
  pendingMutation: boolean;
}

export type BoardListener = (state: BoardState) => void;

function describeError(error: unknown): string {
  if (error instanceof ApiError) return `${error.code}: ${error.message}`;
  if (error instanceof Error) return error.message;
  return String(error);
}

function sameList(a: readonly string[], b: readonly string[]): boolean {
  return a.length === b.length && a.every((item, i) => item === b[i]);
}

export class BoardStore {
  private readonly api: BoardApi;
  private readonly state: BoardState;
  private readonly listeners = new Set<BoardListener>();
  private knownSubsets: Set<string>;

  constructor(api: BoardApi, snapshot: SessionSnapshot, pool: readonly string[] = []) {
    this.api = api;
    const columns: string[][] = Array.from({ length: snapshot.tiers }, () => []);
    const assigned = new Set<string>();
    for (const entry of snapshot.log) {
      columns[entry.tier - 1]?.push(entry.alternative);
      assigned.add(entry.alternative);
    }
    this.knownSubsets = collectSubsetKeys(snapshot);
    this.state = {
      sessionId: snapshot.id,
      n: snapshot.n,
      names: snapshot.names,
      tierCount: snapshot.tiers,
      version: snapshot.version,
      columns,
      pool: pool.filter((alt) => !assigned.has(alt)),
      selection: [],
      matrix: emptyMatrix(snapshot.version),
      theta: buildThetaVm(snapshot, snapshot.version, this.knownSubsets, snapshot.names),
      revised: [],
      banner: null,
      toast: null,
      pendingMutation: false,
    };
  }

  getState(): BoardState {
    return this.state;
  }

  subscribe(listener: BoardListener): () => void {
    this.listeners.add(listener);
    return () => this.listeners.delete(listener);
  }

  /** True when the matrix on screen was computed at the displayed version. */
  matrixInSync(): boolean {
    return this.state.matrix.version === this.state.version;
  }

  /** Stage a chip in the unassigned pool. */
  addToPool(alternative: string): void {
    if (!/^[01]+$/.test(alternative) || alternative.length !== this.state.n) {
      throw new Error(`expected a 0/1 string of width ${this.state.n}`);
    }
    if (this.locate(alternative) !== null) return;
    this.state.pool.push(alternative);
    this.notify();
  }

  dismissBanner(): void {
    this.state.banner = null;
    this.notify();
  }

  dismissToast(): void {
    this.state.toast = null;
    this.notify();
  }

  async dropChip(alternative: string, tier: number): Promise<void> {
    if (tier < 1 || tier > this.state.tierCount) {
      throw new RangeError(`tier must be 1..${this.state.tierCount}, got ${tier}`);
    }
    if (this.state.pendingMutation) return;
    const origin = this.locate(alternative);
    if (origin === null) return;
    if (origin.kind === "tier" && origin.tier === tier) return;

    this.moveChip(alternative, origin, { kind: "tier", tier });
    this.state.pendingMutation = true;
    this.state.banner = null;
    this.state.toast = null;
    this.notify();

    let response: AssignResponse;
    try {
      response = await this.api.assign(this.state.sessionId, alternative, tier);
    } catch (error) {
      this.moveChip(alternative, { kind: "tier", tier }, origin);
      this.state.toast = describeError(error);
      this.state.pendingMutation = false;
      this.notify();
      return;
    }

    if (!response.applied) {
      // the server kept its previous state, so the chip goes back too
      this.moveChip(alternative, { kind: "tier", tier }, origin);
      this.state.banner = response.warning?.message ?? "assignment was not applied";
      this.state.pendingMutation = false;
      this.notify();
      return;
    }

    this.acceptTheta(response, response.version);
    this.state.revised = response.revised;
    this.state.pendingMutation = false;
    this.notify();
    await this.refreshMatrix();
  }

  /**
   * Re-query verdicts for the matrix selection (optionally replacing it).
   * Oversized selections are rejected before any request is made.
   */
  async refreshMatrix(selection?: readonly string[]): Promise<void> {
    if (selection !== undefined) {
      this.state.selection = normalizeSelection(selection);
    }
    const alts = this.state.selection;
    if (alts.length === 0) {
      this.state.matrix = emptyMatrix(this.state.version);
      this.notify();
      return;
    }
    let response: PredictionsResponse;
    try {
      response = await this.api.predictions(this.state.sessionId, alts);
    } catch (error) {
      this.state.toast = describeError(error);
      this.notify();
      return;
    }
    if (response.version < this.state.version) return;
    if (!sameList(response.alternatives, this.state.selection)) return;
    this.state.version = Math.max(this.state.version, response.version);
    this.state.matrix = buildMatrixVm(response, this.state.names);
    this.notify();
  }

  locate(alternative: string): ChipLocation | null {
    if (this.state.pool.includes(alternative)) return { kind: "pool" };
    for (let tier = 1; tier <= this.state.tierCount; tier += 1) {
      if (this.state.columns[tier - 1]?.includes(alternative)) {
        return { kind: "tier", tier };
      }
    }
    return null;
  }

  private listAt(location: ChipLocation): string[] {
    if (location.kind === "pool") return this.state.pool;
    return this.state.columns[location.tier - 1] ?? [];
  }

  private moveChip(alternative: string, from: ChipLocation, to: ChipLocation): void {
    const source = this.listAt(from);
    const index = source.indexOf(alternative);
    if (index >= 0) source.splice(index, 1);
    this.listAt(to).push(alternative);
  }

  private acceptTheta(payload: ThetaPayload, version: number): void {
    if (version < this.state.version) return;
    this.state.theta = buildThetaVm(payload, version, this.knownSubsets, this.state.names);
    this.knownSubsets = new Set([...this.knownSubsets, ...collectSubsetKeys(payload)]);
    this.state.version = version;
  }

  private notify(): void {
    for (const listener of this.listeners) listener(this.state);
  }
}
