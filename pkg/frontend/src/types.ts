/**
 * Wire-level shapes of the elicitation service JSON API.
 *
 * Alternatives travel as bit strings ("0110", leftmost character is
 * attribute 1) and attribute subsets as "+"-joined index lists ("1+3").
 * Every response body carries the session version that produced it.
 */

export type Direction = "prefer_first" | "prefer_second" | "no_prediction";

export interface LogEntry {
  alternative: string;
  tier: number;
  at: string;
}

export interface SearchStats {
  nodes: number;
  lp_solves: number;
}

/** Families block shared by snapshots, assignment replies and the theta endpoint. */
export interface ThetaPayload {
  families: string[][];
  unifying: string[];
  stats: SearchStats;
}

export interface SessionSnapshot extends ThetaPayload {
  id: string;
  version: number;
  n: number;
  names: string[] | null;
  tiers: number;
  log: LogEntry[];
  preferences: string[];
}

export interface RevisedCell {
  first: string;
  second: string;
  before: Direction;
  after: Direction;
}

export interface ServiceWarning {
  code: string;
  message: string;
}

/**
 * Reply to POST .../assignments.  `applied: false` means the server kept
 * its previous state (the families echoed are the old ones) and `warning`
 * says why; the client must undo its optimistic move.
 */
export interface AssignResponse extends ThetaPayload {
  version: number;
  applied: boolean;
  warning: ServiceWarning | null;
  preference_count: number;
  revised: RevisedCell[];
}

export interface PredictionCell {
  first: string;
  second: string;
  direction: Direction;
  observed: boolean;
}

export interface PredictionsResponse {
  version: number;
  alternatives: string[];
  cells: PredictionCell[];
}

export interface ThetaResponse extends ThetaPayload {
  version: number;
}

export interface ErrorBody {
  code: string;
  message: string;
}
